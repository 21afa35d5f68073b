#ifndef AFDMIL_METRICS_EXPORT_HPP
#define AFDMIL_METRICS_EXPORT_HPP

#include <filesystem>
#include <optional>
#include <string>

#include "afdmil/data/bag.hpp"
#include "afdmil/model/forward.hpp"

namespace afdmil {

inline constexpr const char* kScoreHeader = "idx,x,y,y_hat,alpha,sel_ins,sel_att";

struct ScoreExport {
  std::size_t rows = 0;
  bool raster_written = false;
  std::string warning;  // why the raster was skipped, if it was
};

/// Writes one CSV row per instance (header kScoreHeader). Columns with no
/// value for this bag (no coords, channel disabled) are left blank. When
/// `raster` is given and the coordinates are distinct non-negative integers,
/// also writes an 8-bit binary PGM of the instance probabilities with gray
/// level round(255·ŷ); cells without an instance are 0.
ScoreExport export_instance_scores(const ForwardTrace& trace, const Bag& bag,
                                   const std::filesystem::path& table,
                                   const std::optional<std::filesystem::path>& raster = std::nullopt);

/// The table as text, for callers that do not want a file.
std::string format_instance_scores(const ForwardTrace& trace, const Bag& bag);

}  // namespace afdmil

#endif  // AFDMIL_METRICS_EXPORT_HPP
