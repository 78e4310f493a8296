#pragma once

#include <cstdint>
#include <optional>

#include "gsobol/estimators.hpp"
#include "gsobol/models.hpp"

namespace gsobol {

// Plug-in pieces of the delta-method variance
//   sigma^2 = a^2 sum Cov(U_l,U_l') + b^2 sum Cov(V_l,V_l') + 2ab sum Cov(U_l,V_l')
// with U_l = (Y_l - m_l)(Y^u_l - m_l), V_l = (Y_l - m_l)^2 + (Y^u_l - m_l)^2,
// a = 1 / sum Var(Y_l), b = -a S / 2, and m the pooled empirical mean.
struct CltDiagnostics {
  double sigma2_hat = 0.0;
  double a_hat = 0.0;
  double b_hat = 0.0;
  // k x k moment matrices; left empty unless requested.
  Matrix u_moments;
  Matrix v_moments;
  Matrix uv_moments;
};

// sigma2_hat is the empirical variance (divisor N) of the per-replicate
// influence a sum_l U_l + b sum_l V_l, which equals the double sums above.
CltDiagnostics plug_in_sigma2(const PickFreezeSample& s, const IndexEstimate& point,
                              bool moment_matrices = false);

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
  double point = 0.0;
  double sigma2_hat = 0.0;

  double width() const noexcept { return hi - lo; }
  bool contains(double v) const noexcept { return lo <= v && v <= hi; }
};

// Standard normal quantile Phi^{-1}(p), p in (0, 1).
double normal_quantile(double p);

// point +- z_{(1+level)/2} sqrt(sigma2_hat / N)
ConfidenceInterval confidence_interval(const PickFreezeSample& s, double level);

struct CoverageReport {
  std::string model;
  SubsetU u;
  std::size_t n = 0;
  std::size_t reps = 0;
  double level = 0.0;
  double coverage = 0.0;
  double mean_width = 0.0;
  double true_value = 0.0;
};

// Pick-freeze outputs for (model, inputs, u) on a design drawn from seed.
PickFreezeSample simulate(const ModelSpec& model, const InputSpec& inputs,
                          const SubsetU& u, std::size_t n, std::uint64_t seed,
                          unsigned workers = 1);

// Share of reps whose interval contains true_index(model, c, u). Rep r
// draws from derive_seed(seed, r); reps run in parallel over workers.
CoverageReport coverage_experiment(const ModelSpec& model, InputCase c, const SubsetU& u,
                                   std::size_t n, std::size_t reps, double level,
                                   std::uint64_t seed, unsigned workers = 1);

struct BootstrapInterval {
  double point = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t resamples = 0;
};

// Percentile bootstrap for the interaction estimator S_{u+v} - S_u - S_v.
// Rows are resampled jointly across the three samples, which must come from
// the same base design.
BootstrapInterval bootstrap_closure_interval(const PickFreezeSample& s_u,
                                             const PickFreezeSample& s_v,
                                             const PickFreezeSample& s_uv, double level,
                                             std::size_t resamples, std::uint64_t seed);

}  // namespace gsobol
