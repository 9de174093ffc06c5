#pragma once

#include <iosfwd>

namespace stream_kpca::cli {

/// Runs one stream-kpca command line. Summaries go to `out`; failures print a
/// single "error: <kind>: <message>" line to `err` and return nonzero.
/// Kinds: usage, config, contract, io, numerical, internal.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace stream_kpca::cli
