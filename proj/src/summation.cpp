#include "gsobol/summation.hpp"

#include <algorithm>
#include <cmath>

namespace gsobol {

double pairwise_sum(std::span<const double> values) {
  return pairwise_sum(values.size(), [&](std::size_t i) { return values[i]; });
}

double sorted_percentile(const std::vector<double>& sorted_values, double q) {
  const double pos = q * static_cast<double>(sorted_values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted_values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted_values[lo] + frac * (sorted_values[hi] - sorted_values[lo]);
}

}  // namespace gsobol
