#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gsobol/estimators.hpp"

namespace gsobol {

// v_l = Sigma_ll / rho^2 for outputs bounded by |Y|_2 < rho; V = (sum v_l)^2.
struct BoundInputs {
  std::vector<double> v_weights;
  double rho = 1.0;
  double V = 0.0;

  double v_sum() const noexcept;
  static BoundInputs from_weights(std::vector<double> v, double rho);
};

struct DeviationBounds {
  double upper = 1.0;           // bound on P(S_N - S >= t)
  std::optional<double> lower;  // bound on P(S_N - S <= -t); empty off its domain
  double log_upper = 0.0;
  std::optional<double> log_lower;
};

// Both exponential bounds for a known S, evaluated as printed: the factor
// sum_l v_l sits inside the squared term. The lower bound needs
// t >= (1 - S)(1 + S) / (2N - (1 + S)).
DeviationBounds deviation_bounds_oracle(double S, double t, std::int64_t n,
                                        const BoundInputs& v);

// Worst case over S in [0, 1]:
//   upper: exp(-(N V / 128)(1 - 1/N)^2 (t / (1 + t))^2),  t >= 0
//   lower: exp(-(N V / 128)(t - 9 / (8N))^2),             t in (9/(8N), 1)
DeviationBounds worst_case_bounds(double t, std::int64_t n, double V);

// upper + lower of the worst-case bounds; a side outside its domain
// contributes the trivial bound 1.
double worst_case_two_sided(double t, std::int64_t n, double V);

struct SampleSizePlan {
  double t = 0.0;
  double alpha = 0.0;
  double V = 0.0;
  std::int64_t n_star = 0;
  double bound_at_n_star = 0.0;
};

// Smallest N with worst_case_two_sided(t, N, V) <= alpha, found by
// exponential search then bisection. Throws Unattainable above cap.
SampleSizePlan min_sample_size(double t, double alpha, double V,
                               std::int64_t cap = 1'000'000'000'000LL);

// Empirical v_l = (Sigma_N)_ll / rho^2. Every row of Y and Y^u must satisfy
// |row|_2 < rho.
BoundInputs estimate_v(const PickFreezeSample& s, double rho);

}  // namespace gsobol
