#pragma once

#include "stream_kpca/baselines.hpp"
#include "stream_kpca/skpca.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <variant>

namespace stream_kpca {

/// A model file: one trained model plus the optional centering mean that was
/// subtracted from the training rows.
///
/// Format (text, version 1): a "stream-kpca-model 1" line, "key value" header
/// lines, then named matrix blocks "name rows cols" followed by one row per
/// line. Numbers use format_double, so equal inputs give byte-identical files.
/// Feature maps are stored as (family, sigma, m, d, seed) and regenerated.
struct StoredModel {
  std::variant<SkpcaModel, RncaModel, NystromModel> model;
  std::optional<Vector> center;
  std::uint64_t seed = 0;  // provenance; for nystrom the reservoir seed
};

void save_model(std::ostream& out, const StoredModel& stored);
void save_model(const std::filesystem::path& path, const StoredModel& stored);
StoredModel load_model(std::istream& in);
StoredModel load_model(const std::filesystem::path& path);

}  // namespace stream_kpca
