#ifndef AFDMIL_DATA_DATASET_IO_HPP
#define AFDMIL_DATA_DATASET_IO_HPP

#include <filesystem>
#include <map>
#include <string>

#include "afdmil/data/bag.hpp"

namespace afdmil {

inline constexpr const char* kManifestFormat = "afd-dataset/1";

// Where a dataset came from; only filled for generated data.
struct Provenance {
  std::string kind;
  std::uint64_t seed = 0;
  std::string rng;
  std::map<std::string, std::string> params;
};

/// Writes `<dir>/manifest.txt` plus one feature file per bag under
/// `<dir>/features/`, and the coordinate and latent-label sidecars under
/// `<dir>/coords/` and `<dir>/latent/` when the bags carry them. Returns the
/// manifest path.
///
/// Manifest grammar, one record per line, '#' starts a comment:
///   format afd-dataset/1
///   name <text>
///   dim <n>
///   generator.kind|seed|rng <value>      (optional)
///   generator.param.<key> <value>        (optional, repeated)
///   bag <id> <label> <K> <features> <coords|-> <latent|->
/// Paths are relative to the manifest's directory.
std::filesystem::path save_dataset(const Dataset& dataset, const std::filesystem::path& dir,
                                   const Provenance* provenance = nullptr);

/// Loads a manifest and every file it references, checking each feature
/// header and sidecar length against the manifest entry.
Dataset load_dataset(const std::filesystem::path& manifest, Provenance* provenance = nullptr);

}  // namespace afdmil

#endif  // AFDMIL_DATA_DATASET_IO_HPP
