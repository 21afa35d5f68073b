#include "afdmil/data/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <fmt/format.h>

#include "afdmil/numerics/errors.hpp"
#include "afdmil/numerics/rng.hpp"

namespace afdmil {

namespace {

RowVector random_unit(Rng& rng, Index dim) {
  RowVector u(dim);
  do {
    for (Index i = 0; i < dim; ++i) {
      u(i) = rng.normal();
    }
  } while (u.norm() < 1e-12);
  return u / u.norm();
}

// Unit vector orthogonal to `u` (needs dim ≥ 2).
RowVector random_orthogonal(Rng& rng, const RowVector& u) {
  RowVector v;
  do {
    v = random_unit(rng, u.size());
    v -= v.dot(u) * u;
  } while (v.norm() < 1e-6);
  return v / v.norm();
}

std::vector<std::array<double, 2>> grid_coords(Index k) {
  const auto width = static_cast<Index>(std::ceil(std::sqrt(static_cast<double>(k))));
  std::vector<std::array<double, 2>> out(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) {
    out[static_cast<std::size_t>(i)] = {static_cast<double>(i % width),
                                        static_cast<double>(i / width)};
  }
  return out;
}

// The `count` grid cells nearest a random centre, ties to the lower index.
std::vector<Index> witness_patch(Rng& rng, const std::vector<std::array<double, 2>>& coords,
                                 Index count) {
  const auto k = static_cast<Index>(coords.size());
  const auto centre = coords[static_cast<std::size_t>(rng.uniform_int(0, k - 1))];
  std::vector<Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), Index{0});
  auto dist = [&](Index i) {
    const auto& c = coords[static_cast<std::size_t>(i)];
    return (c[0] - centre[0]) * (c[0] - centre[0]) + (c[1] - centre[1]) * (c[1] - centre[1]);
  };
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return dist(a) < dist(b); });
  order.resize(static_cast<std::size_t>(count));
  return order;
}

Bag make_bag(Rng& rng, const SynthConfig& config, const std::vector<RowVector>& means, int label,
             int witness_latent, int filler_latent) {
  Bag bag;
  bag.label = label;
  const Index k = rng.uniform_int(config.k_min, config.k_max);
  bag.coords = grid_coords(k);
  std::vector<int> latent(static_cast<std::size_t>(k), filler_latent);
  if (witness_latent >= 0) {
    for (Index i : witness_patch(rng, *bag.coords, config.witness_count(k))) {
      latent[static_cast<std::size_t>(i)] = witness_latent;
    }
  }
  bag.features.resize(k, config.dim);
  for (Index i = 0; i < k; ++i) {
    const RowVector& mean = means[static_cast<std::size_t>(latent[static_cast<std::size_t>(i)])];
    for (Index j = 0; j < config.dim; ++j) {
      bag.features(i, j) = mean(j) + config.sigma * rng.normal();
    }
  }
  bag.latent = std::move(latent);
  return bag;
}

Provenance provenance_for(const SynthConfig& config, std::uint64_t seed) {
  Provenance p;
  p.kind = std::string(to_string(config.kind));
  p.seed = seed;
  p.rng = std::string(Rng::kAlgorithm);
  p.params = {
      {"bags_per_class", std::to_string(config.bags_per_class)},
      {"k_min", std::to_string(config.k_min)},
      {"k_max", std::to_string(config.k_max)},
      {"dim", std::to_string(config.dim)},
      {"witness_rate", fmt::format("{}", config.witness_rate)},
      {"min_witnesses", std::to_string(config.min_witnesses)},
      {"separation", fmt::format("{}", config.separation)},
      {"sigma", fmt::format("{}", config.sigma)},
  };
  return p;
}

// Label-1 bags are generated first, then label-0; the final order is shuffled
// and ids are assigned by position.
SynthDataset assemble(const SynthConfig& config, std::uint64_t seed, Rng& rng,
                      std::vector<RowVector> means, int pos_witness, int pos_filler,
                      int neg_witness, int neg_filler) {
  SynthDataset out;
  out.dataset.name = std::string("synth-") + std::string(to_string(config.kind));
  out.dataset.dim = config.dim;
  for (Index b = 0; b < config.bags_per_class; ++b) {
    out.dataset.bags.push_back(make_bag(rng, config, means, 1, pos_witness, pos_filler));
  }
  for (Index b = 0; b < config.bags_per_class; ++b) {
    out.dataset.bags.push_back(make_bag(rng, config, means, 0, neg_witness, neg_filler));
  }
  rng.shuffle(std::span<Bag>(out.dataset.bags));
  for (std::size_t i = 0; i < out.dataset.bags.size(); ++i) {
    out.dataset.bags[i].id = fmt::format("bag_{:04d}", i);
  }
  out.provenance = provenance_for(config, seed);
  out.means = std::move(means);
  return out;
}

}  // namespace

void SynthConfig::validate() const {
  if (!(witness_rate > 0.0 && witness_rate <= 1.0)) {
    throw ConfigError("synth: witness rate must lie in (0, 1], got " + fmt::format("{}", witness_rate));
  }
  if (k_min < 1 || k_max < k_min) {
    throw ConfigError("synth: need 1 <= k_min <= k_max, got [" + std::to_string(k_min) + ", " +
                      std::to_string(k_max) + "]");
  }
  if (min_witnesses < 1 || min_witnesses > k_min) {
    throw ConfigError("synth: witness count " + std::to_string(min_witnesses) +
                      " cannot exceed the smallest bag size k_min=" + std::to_string(k_min));
  }
  if (!(separation > 0.0) || !(sigma > 0.0)) {
    throw ConfigError("synth: separation and sigma must be positive");
  }
  if (dim < 1 || (kind == SynthKind::Subtype && dim < 2)) {
    throw ConfigError("synth: feature dim too small (" + std::to_string(dim) + ")");
  }
  if (bags_per_class < 1) {
    throw ConfigError("synth: bags per class must be >= 1");
  }
}

Index SynthConfig::witness_count(Index bag_size) const {
  // The small offset keeps e.g. 0.05 · 60 from rounding up to 4.
  const auto raw = static_cast<Index>(std::ceil(witness_rate * static_cast<double>(bag_size) - 1e-9));
  return std::min(bag_size, std::max(raw, min_witnesses));
}

SynthDataset gen_binary(const SynthConfig& config, std::uint64_t seed) {
  if (config.kind != SynthKind::Binary) {
    throw ConfigError("gen_binary: config kind is not binary");
  }
  config.validate();
  Rng rng = Rng(seed).stream("data");
  const RowVector dir = random_unit(rng, config.dim);
  std::vector<RowVector> means = {RowVector::Zero(config.dim), config.separation * dir};
  return assemble(config, seed, rng, std::move(means), 1, 0, -1, 0);
}

SynthDataset gen_subtype(const SynthConfig& config, std::uint64_t seed) {
  if (config.kind != SynthKind::Subtype) {
    throw ConfigError("gen_subtype: config kind is not subtype");
  }
  config.validate();
  Rng rng = Rng(seed).stream("data");
  const RowVector u = random_unit(rng, config.dim);
  const RowVector v = random_orthogonal(rng, u);
  const double s = config.separation;
  std::vector<RowVector> means = {-0.5 * s * u, 0.5 * s * u, (std::sqrt(3.0) / 2.0) * s * v};
  return assemble(config, seed, rng, std::move(means), 1, 2, 0, 2);
}

SynthDataset generate(const SynthConfig& config, std::uint64_t seed) {
  return config.kind == SynthKind::Binary ? gen_binary(config, seed) : gen_subtype(config, seed);
}

std::pair<Dataset, Dataset> split(const Dataset& dataset, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("split: test fraction must lie in (0, 1), got " + fmt::format("{}", test_fraction));
  }
  if (dataset.count_label(0) == 0 || dataset.count_label(1) == 0) {
    throw ConfigError("split: both labels must be present");
  }
  Rng rng = Rng(seed).stream("split");
  std::vector<bool> in_test(dataset.bags.size(), false);
  for (int label : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < dataset.bags.size(); ++i) {
      if (dataset.bags[i].label == label) {
        members.push_back(i);
      }
    }
    rng.shuffle(std::span<std::size_t>(members));
    const auto take = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(members.size())));
    for (std::size_t i = 0; i < take; ++i) {
      in_test[members[i]] = true;
    }
  }
  std::pair<Dataset, Dataset> out;
  out.first.name = dataset.name + "-train";
  out.second.name = dataset.name + "-test";
  out.first.dim = out.second.dim = dataset.dim;
  for (std::size_t i = 0; i < dataset.bags.size(); ++i) {
    (in_test[i] ? out.second : out.first).bags.push_back(dataset.bags[i]);
  }
  return out;
}

bool satisfies_mil_rule(const Bag& bag) {
  if (!bag.latent) {
    return false;
  }
  const bool any_positive = std::find(bag.latent->begin(), bag.latent->end(), 1) != bag.latent->end();
  return (bag.label == 1) == any_positive;
}

std::string_view to_string(SynthKind kind) { return kind == SynthKind::Binary ? "binary" : "subtype"; }

SynthKind parse_synth_kind(std::string_view text) {
  if (text == "binary") {
    return SynthKind::Binary;
  }
  if (text == "subtype") {
    return SynthKind::Subtype;
  }
  throw ConfigError("unknown dataset kind '" + std::string(text) + "' (expected binary|subtype)");
}

}  // namespace afdmil
