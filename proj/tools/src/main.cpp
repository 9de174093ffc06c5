#include "stream_kpca_cli/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return stream_kpca::cli::run(argc, argv, std::cout, std::cerr); }
