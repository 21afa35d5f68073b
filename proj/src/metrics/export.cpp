#include "afdmil/metrics/export.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "afdmil/numerics/byte_io.hpp"
#include "afdmil/numerics/errors.hpp"

namespace afdmil {

namespace {

std::vector<bool> mask(const std::vector<Index>& indices, Index k) {
  std::vector<bool> m(static_cast<std::size_t>(k), false);
  for (Index i : indices) {
    m[static_cast<std::size_t>(i)] = true;
  }
  return m;
}

void check_trace(const ForwardTrace& trace, const Bag& bag) {
  const auto k = static_cast<std::size_t>(bag.size());
  const bool probs_ok = trace.instance_probs.empty() || trace.instance_probs.size() == k;
  const bool alpha_ok = trace.attention_weights.empty() || trace.attention_weights.size() == k;
  auto in_range = [&](const std::vector<Index>& idx) {
    return std::all_of(idx.begin(), idx.end(),
                       [&](Index i) { return i >= 0 && static_cast<std::size_t>(i) < k; });
  };
  if (!probs_ok || !alpha_ok || !in_range(trace.channel1_indices) ||
      !in_range(trace.channel2_indices)) {
    throw DimensionError("export: trace does not belong to bag '" + bag.id + "'");
  }
}

// Empty string when the coordinates form a usable grid.
std::string grid_problem(const Bag& bag) {
  if (!bag.coords) {
    return "bag has no coordinates";
  }
  std::set<std::pair<long long, long long>> seen;
  for (const auto& c : *bag.coords) {
    if (c[0] < 0 || c[1] < 0 || c[0] != std::floor(c[0]) || c[1] != std::floor(c[1])) {
      return fmt::format("coordinate ({}, {}) is not a non-negative integer grid cell", c[0], c[1]);
    }
    if (!seen.emplace(static_cast<long long>(c[0]), static_cast<long long>(c[1])).second) {
      return fmt::format("coordinate ({}, {}) appears twice", c[0], c[1]);
    }
  }
  return {};
}

}  // namespace

std::string format_instance_scores(const ForwardTrace& trace, const Bag& bag) {
  check_trace(trace, bag);
  const Index k = bag.size();
  const auto sel1 = mask(trace.channel1_indices, k);
  const auto sel2 = mask(trace.channel2_indices, k);
  std::string out = std::string(kScoreHeader) + "\n";
  for (Index i = 0; i < k; ++i) {
    const auto u = static_cast<std::size_t>(i);
    std::string x, y, yhat, alpha;
    if (bag.coords) {
      x = fmt::format("{}", (*bag.coords)[u][0]);
      y = fmt::format("{}", (*bag.coords)[u][1]);
    }
    if (!trace.instance_probs.empty()) {
      yhat = fmt::format("{}", trace.instance_probs[u]);
    }
    if (!trace.attention_weights.empty()) {
      alpha = fmt::format("{}", trace.attention_weights[u]);
    }
    out += fmt::format("{},{},{},{},{},{},{}\n", i, x, y, yhat, alpha, sel1[u] ? 1 : 0,
                       sel2[u] ? 1 : 0);
  }
  return out;
}

ScoreExport export_instance_scores(const ForwardTrace& trace, const Bag& bag,
                                   const std::filesystem::path& table,
                                   const std::optional<std::filesystem::path>& raster) {
  ScoreExport result;
  bytes::write_file(table, format_instance_scores(trace, bag));
  result.rows = static_cast<std::size_t>(bag.size());
  if (!raster) {
    return result;
  }
  result.warning = grid_problem(bag);
  if (result.warning.empty() && trace.instance_probs.empty()) {
    result.warning = "no instance probabilities (distillation disabled)";
  }
  if (!result.warning.empty()) {
    spdlog::warn("heatmap raster skipped for bag '{}': {}", bag.id, result.warning);
    return result;
  }
  long long width = 0, height = 0;
  for (const auto& c : *bag.coords) {
    width = std::max(width, static_cast<long long>(c[0]) + 1);
    height = std::max(height, static_cast<long long>(c[1]) + 1);
  }
  std::string pgm = fmt::format("P5\n{} {}\n255\n", width, height);
  const std::size_t header = pgm.size();
  pgm.resize(header + static_cast<std::size_t>(width * height), '\0');
  for (std::size_t i = 0; i < bag.coords->size(); ++i) {
    const auto& c = (*bag.coords)[i];
    const auto cell = static_cast<std::size_t>(static_cast<long long>(c[1]) * width +
                                               static_cast<long long>(c[0]));
    const long level = std::lround(255.0 * std::clamp(trace.instance_probs[i], 0.0, 1.0));
    pgm[header + cell] = static_cast<char>(static_cast<unsigned char>(level));
  }
  bytes::write_file(*raster, pgm);
  result.raster_written = true;
  return result;
}

}  // namespace afdmil
