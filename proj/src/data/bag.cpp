#include "afdmil/data/bag.hpp"

#include "afdmil/numerics/errors.hpp"

namespace afdmil {

void validate_bag(const Bag& bag, Index expected_dim) {
  if (bag.size() == 0) {
    throw EmptyBagError("bag '" + bag.id + "' has no instances");
  }
  if (bag.dim() != expected_dim) {
    throw DimensionError("bag '" + bag.id + "' has width " + std::to_string(bag.dim()) +
                         ", expected " + std::to_string(expected_dim));
  }
  if (bag.label != 0 && bag.label != 1) {
    throw FormatError("bag '" + bag.id + "' label must be 0 or 1");
  }
  if (bag.coords && static_cast<Index>(bag.coords->size()) != bag.size()) {
    throw DimensionError("bag '" + bag.id + "' has " + std::to_string(bag.coords->size()) +
                         " coordinates for " + std::to_string(bag.size()) + " instances");
  }
  if (bag.latent && static_cast<Index>(bag.latent->size()) != bag.size()) {
    throw DimensionError("bag '" + bag.id + "' has " + std::to_string(bag.latent->size()) +
                         " latent labels for " + std::to_string(bag.size()) + " instances");
  }
}

}  // namespace afdmil
