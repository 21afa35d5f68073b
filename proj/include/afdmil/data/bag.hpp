#ifndef AFDMIL_DATA_BAG_HPP
#define AFDMIL_DATA_BAG_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "afdmil/numerics/types.hpp"

namespace afdmil {

enum class LatentLabel : int { Negative = 0, Positive = 1, Other = 2 };

// One slide analog: K instance feature rows sharing a single binary label.
struct Bag {
  std::string id;
  int label = 0;
  Matrix features;  // K × n
  std::optional<std::vector<std::array<double, 2>>> coords;
  // Only metrics may read this; training never does.
  std::optional<std::vector<int>> latent;

  Index size() const { return features.rows(); }
  Index dim() const { return features.cols(); }
};

struct Dataset {
  std::string name;
  Index dim = 0;
  std::vector<Bag> bags;

  std::size_t count_label(int label) const {
    std::size_t c = 0;
    for (const auto& b : bags) {
      c += b.label == label ? 1 : 0;
    }
    return c;
  }
};

/// Throws if the bag is empty, has the wrong width, or carries side tables
/// whose length differs from K.
void validate_bag(const Bag& bag, Index expected_dim);

}  // namespace afdmil

#endif  // AFDMIL_DATA_BAG_HPP
