#ifndef AFDMIL_DATA_SYNTH_HPP
#define AFDMIL_DATA_SYNTH_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "afdmil/data/bag.hpp"
#include "afdmil/data/dataset_io.hpp"

namespace afdmil {

enum class SynthKind { Binary, Subtype };

struct SynthConfig {
  SynthKind kind = SynthKind::Binary;
  Index bags_per_class = 150;
  Index k_min = 50;
  Index k_max = 200;
  Index dim = 32;
  double witness_rate = 0.05;
  Index min_witnesses = 1;
  double separation = 2.0;
  double sigma = 1.0;  // per-coordinate standard deviation

  void validate() const;
  // ceil(witness_rate · K), at least min_witnesses.
  Index witness_count(Index bag_size) const;
};

struct SynthDataset {
  Dataset dataset;
  Provenance provenance;
  // Cluster mean per latent label (index 0, 1, 2); the binary generator
  // leaves index 2 empty.
  std::vector<RowVector> means;
};

/// Positive bags: witness_count(K) instances from the positive cluster laid
/// out as one contiguous patch on the coordinate grid, the rest negative.
/// Negative bags: all negative. Means are 0 and separation·u for a random
/// unit direction u.
SynthDataset gen_binary(const SynthConfig& config, std::uint64_t seed);

/// Three clusters at the corners of an equilateral triangle with side
/// `separation`: subtype A (latent 1), subtype B (latent 0) and other tissue
/// (latent 2). Label-1 bags hold A witnesses, label-0 bags B witnesses, both
/// padded with other tissue.
SynthDataset gen_subtype(const SynthConfig& config, std::uint64_t seed);

SynthDataset generate(const SynthConfig& config, std::uint64_t seed);

/// Stratified by label: round(test_fraction · count) bags of each label go to
/// the test part. Both parts keep the input order.
std::pair<Dataset, Dataset> split(const Dataset& dataset, double test_fraction, std::uint64_t seed);

/// Y = 1 iff any latent label is 1. False when the bag has no latent labels.
bool satisfies_mil_rule(const Bag& bag);

std::string_view to_string(SynthKind kind);
SynthKind parse_synth_kind(std::string_view text);

}  // namespace afdmil

#endif  // AFDMIL_DATA_SYNTH_HPP
