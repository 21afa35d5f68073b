#include "afdmil/data/feature_file.hpp"

#include <limits>

#include "afdmil/numerics/byte_io.hpp"
#include "afdmil/numerics/errors.hpp"

namespace afdmil {

namespace {

FeatureHeader parse_header(const std::string& bytes, const std::string& origin) {
  if (bytes.size() < kFeatureHeaderBytes) {
    throw FormatError(origin + ": truncated header (" + std::to_string(bytes.size()) + " bytes)");
  }
  if (bytes.compare(0, 4, kFeatureMagic, 4) != 0) {
    throw FormatError(origin + ": bad magic, expected AFDF");
  }
  FeatureHeader h;
  h.version = bytes::load<std::uint32_t>(bytes, 4);
  h.rows = bytes::load<std::uint32_t>(bytes, 8);
  h.cols = bytes::load<std::uint32_t>(bytes, 12);
  if (h.version != kFeatureVersion) {
    throw FormatError(origin + ": unsupported version " + std::to_string(h.version));
  }
  return h;
}

}  // namespace

std::string encode_features(const Matrix& features) {
  constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
  if (static_cast<std::uint64_t>(features.rows()) > kMax ||
      static_cast<std::uint64_t>(features.cols()) > kMax) {
    throw DimensionError("feature block " + shape_str(features) + " exceeds 32-bit counts");
  }
  std::string out;
  out.reserve(kFeatureHeaderBytes + static_cast<std::size_t>(features.size()) * 4);
  out.append(kFeatureMagic, 4);
  bytes::append<std::uint32_t>(out, kFeatureVersion);
  bytes::append<std::uint32_t>(out, static_cast<std::uint32_t>(features.rows()));
  bytes::append<std::uint32_t>(out, static_cast<std::uint32_t>(features.cols()));
  for (Index i = 0; i < features.size(); ++i) {
    bytes::append<float>(out, static_cast<float>(features.data()[i]));
  }
  return out;
}

Matrix decode_features(const std::string& bytes, const std::string& origin) {
  const FeatureHeader h = parse_header(bytes, origin);
  const std::uint64_t count = static_cast<std::uint64_t>(h.rows) * h.cols;
  const std::uint64_t expected = kFeatureHeaderBytes + count * 4;
  if (bytes.size() != expected) {
    throw FormatError(origin + ": header says " + std::to_string(h.rows) + "x" +
                      std::to_string(h.cols) + " (" + std::to_string(expected) +
                      " bytes) but file has " + std::to_string(bytes.size()) + " bytes");
  }
  Matrix out(static_cast<Index>(h.rows), static_cast<Index>(h.cols));
  for (std::uint64_t i = 0; i < count; ++i) {
    out.data()[i] = static_cast<double>(bytes::load<float>(bytes, kFeatureHeaderBytes + i * 4));
  }
  return out;
}

void write_features(const Matrix& features, const std::filesystem::path& path) {
  bytes::write_file(path, encode_features(features));
}

Matrix read_features(const std::filesystem::path& path) {
  return decode_features(bytes::read_file(path), path.string());
}

FeatureHeader read_feature_header(const std::filesystem::path& path) {
  return parse_header(bytes::read_file(path), path.string());
}

}  // namespace afdmil
