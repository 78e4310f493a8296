#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gsobol {

// Pairwise (tree) sum of term(0) + ... + term(n-1). The split points depend
// only on n, so the result is reproducible regardless of who calls it.
template <class Term>
double pairwise_sum(std::size_t begin, std::size_t end, const Term& term) {
  constexpr std::size_t kLeaf = 16;
  if (end - begin <= kLeaf) {
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i) acc += term(i);
    return acc;
  }
  const std::size_t mid = begin + (end - begin) / 2;
  return pairwise_sum(begin, mid, term) + pairwise_sum(mid, end, term);
}

template <class Term>
double pairwise_sum(std::size_t n, const Term& term) {
  return pairwise_sum(std::size_t{0}, n, term);
}

double pairwise_sum(std::span<const double> values);

// Linear-interpolated quantile q in [0, 1] of ascending values.
double sorted_percentile(const std::vector<double>& sorted_values, double q);

}  // namespace gsobol
