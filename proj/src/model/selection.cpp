#include "afdmil/model/selection.hpp"

#include <algorithm>
#include <numeric>

namespace afdmil {

namespace {

template <typename Before>
std::vector<Index> select(std::span<const double> values, std::size_t k, Before before) {
  std::vector<Index> order(values.size());
  std::iota(order.begin(), order.end(), Index{0});
  const std::size_t take = std::min(k, values.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](Index a, Index b) {
                      const double va = values[static_cast<std::size_t>(a)];
                      const double vb = values[static_cast<std::size_t>(b)];
                      if (va != vb) {
                        return before(va, vb);
                      }
                      return a < b;
                    });
  order.resize(take);
  return order;
}

}  // namespace

std::vector<Index> top_k_indices(std::span<const double> values, std::size_t k) {
  return select(values, k, [](double a, double b) { return a > b; });
}

std::vector<Index> bottom_k_indices(std::span<const double> values, std::size_t k) {
  return select(values, k, [](double a, double b) { return a < b; });
}

}  // namespace afdmil
