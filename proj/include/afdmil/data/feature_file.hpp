#ifndef AFDMIL_DATA_FEATURE_FILE_HPP
#define AFDMIL_DATA_FEATURE_FILE_HPP

#include <cstdint>
#include <filesystem>
#include <string>

#include "afdmil/numerics/types.hpp"

namespace afdmil {

// Feature block layout, all little-endian:
//   "AFDF" | u32 version | u32 K | u32 n | K·n float32, row-major
inline constexpr char kFeatureMagic[4] = {'A', 'F', 'D', 'F'};
inline constexpr std::uint32_t kFeatureVersion = 1;
inline constexpr std::size_t kFeatureHeaderBytes = 16;

struct FeatureHeader {
  std::uint32_t version = kFeatureVersion;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
};

// Values are narrowed to float32 on write.
void write_features(const Matrix& features, const std::filesystem::path& path);
Matrix read_features(const std::filesystem::path& path);
FeatureHeader read_feature_header(const std::filesystem::path& path);

std::string encode_features(const Matrix& features);
Matrix decode_features(const std::string& bytes, const std::string& origin = "<memory>");

}  // namespace afdmil

#endif  // AFDMIL_DATA_FEATURE_FILE_HPP
