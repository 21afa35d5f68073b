#ifndef AFDMIL_NUMERICS_BYTE_IO_HPP
#define AFDMIL_NUMERICS_BYTE_IO_HPP

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <type_traits>
#include <utility>

namespace afdmil::bytes {

template <typename T>
T to_little(T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char raw[sizeof(T)];
    std::memcpy(raw, &value, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) {
      std::swap(raw[i], raw[sizeof(T) - 1 - i]);
    }
    std::memcpy(&value, raw, sizeof(T));
  }
  return value;
}

template <typename T>
void append(std::string& out, T value) {
  value = to_little(value);
  out.append(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T load(const std::string& in, std::size_t offset) {
  T value;
  std::memcpy(&value, in.data() + offset, sizeof(T));
  return to_little(value);
}

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace afdmil::bytes

#endif  // AFDMIL_NUMERICS_BYTE_IO_HPP
