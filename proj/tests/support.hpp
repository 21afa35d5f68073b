#ifndef AFDMIL_TESTS_SUPPORT_HPP
#define AFDMIL_TESTS_SUPPORT_HPP

#include <filesystem>
#include <random>
#include <string>

#include "afdmil/model/afd_model.hpp"
#include "afdmil/numerics/rng.hpp"
#include "oracle/straight_line.hpp"

namespace testing {

inline afdmil::Matrix random_matrix(std::mt19937_64& gen, afdmil::Index rows, afdmil::Index cols,
                                    double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  afdmil::Matrix m(rows, cols);
  for (afdmil::Index i = 0; i < m.size(); ++i) {
    m.data()[i] = dist(gen);
  }
  return m;
}

// Small model with random (non-zero) biases too, so every parameter matters.
inline afdmil::AfdModel random_model(std::uint64_t seed, afdmil::ModelDims dims) {
  afdmil::Rng rng(seed);
  afdmil::AfdModel model(dims, rng);
  std::mt19937_64 gen(seed ^ 0x5eedULL);
  for (auto& p : model.params().params()) {
    if (p.value.rows() == 1) {
      p.value = random_matrix(gen, p.value.rows(), p.value.cols(), 0.3);
    }
  }
  return model;
}

inline oracle::Weights to_oracle(const afdmil::ParamStore& params) {
  oracle::Weights w;
  for (const auto& p : params.params()) {
    oracle::Mat m(static_cast<std::size_t>(p.value.rows()),
                  oracle::Vec(static_cast<std::size_t>(p.value.cols())));
    for (afdmil::Index r = 0; r < p.value.rows(); ++r) {
      for (afdmil::Index c = 0; c < p.value.cols(); ++c) {
        m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = p.value(r, c);
      }
    }
    w.t[p.name] = std::move(m);
  }
  return w;
}

inline oracle::Mat to_oracle(const afdmil::Matrix& x) {
  oracle::Mat m(static_cast<std::size_t>(x.rows()), oracle::Vec(static_cast<std::size_t>(x.cols())));
  for (afdmil::Index r = 0; r < x.rows(); ++r) {
    for (afdmil::Index c = 0; c < x.cols(); ++c) {
      m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = x(r, c);
    }
  }
  return m;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("afdmil_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing

#endif  // AFDMIL_TESTS_SUPPORT_HPP
