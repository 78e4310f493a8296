#pragma once

#include <string>
#include <vector>

#include "gsobol/input_design.hpp"

namespace gsobol {

// Paired outputs (Y_i, Y_i^u), i = 1..N, sharing the frozen inputs X_u.
struct PickFreezeSample {
  Matrix y;
  Matrix yu;
  SubsetU u;
  std::string model_id;

  Eigen::Index n() const noexcept { return y.rows(); }
  Eigen::Index k() const noexcept { return y.cols(); }

  // Throws a domain error on shape mismatch or N < 2.
  void validate() const;
};

struct IndexEstimate {
  double value = 0.0;
  double trace_cu = 0.0;
  double trace_sigma = 0.0;
  std::size_t n = 0;
  SubsetU u;
};

// C_{u,N} (estimates Cov(Y, Y^u), not symmetric in general), Sigma_N and
// the pooled mean (Ybar + Ybar^u) / 2. Divisor N throughout.
struct EmpiricalCov {
  Matrix cu_hat;
  Matrix sigma_hat;
  Vector pooled_mean;
};

// Pooled mean computed column by column with pairwise summation.
Vector pooled_mean(const PickFreezeSample& s);

// Scale-aware zero test for denominators: 1e-12 * (max |entry|)^2.
double degenerate_threshold(const PickFreezeSample& s);

EmpiricalCov empirical_covariances(const PickFreezeSample& s);

// Tr(C_{u,N}) / Tr(Sigma_N), accumulated over rows in pairwise order.
IndexEstimate estimate_index(const PickFreezeSample& s);

// Scalar index of each output column; NaN where the column has no variance.
std::vector<double> estimate_componentwise(const PickFreezeSample& s);

// Tr(M C_{u,N}) / Tr(M Sigma_N).
double estimate_m_index(const PickFreezeSample& s, const Matrix& weight);

// S_{u+v,N} - S_{u,N} - S_{v,N}.
double estimate_closure(const PickFreezeSample& s_u, const PickFreezeSample& s_v,
                        const PickFreezeSample& s_uv);

// Restriction of a sample to output column l.
PickFreezeSample column(const PickFreezeSample& s, Eigen::Index l);

}  // namespace gsobol
