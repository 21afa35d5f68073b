#ifndef AFDMIL_MODEL_SELECTION_HPP
#define AFDMIL_MODEL_SELECTION_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "afdmil/numerics/types.hpp"

namespace afdmil {

/// Indices of the min(k, size) largest values, largest first; equal values
/// resolve to the smaller index.
std::vector<Index> top_k_indices(std::span<const double> values, std::size_t k);

/// Same ordering rule, smallest values first.
std::vector<Index> bottom_k_indices(std::span<const double> values, std::size_t k);

}  // namespace afdmil

#endif  // AFDMIL_MODEL_SELECTION_HPP
