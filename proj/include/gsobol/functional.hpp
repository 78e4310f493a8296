#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "gsobol/input_design.hpp"

namespace gsobol {

// Basis coefficients <Y_i, phi_l> and <Y_i^u, phi_l>, l = 1..m_max.
struct FunctionalSample {
  Matrix coeff_y;
  Matrix coeff_yu;
  std::string basis_id;
  SubsetU u;

  Eigen::Index n() const noexcept { return coeff_y.rows(); }
  Eigen::Index m_max() const noexcept { return coeff_y.cols(); }
  void validate() const;
};

// coeff[i, l] = sum_g weights[g] * trajectories[i, g] * basis[g, l].
// The basis columns must be orthonormal under the weights within 1e-8.
Matrix project_grid(const Matrix& trajectories, const Vector& weights, const Matrix& basis);

// Throws a Basis error naming the worst Gram entry if B^t W B != Id.
void check_orthonormal(const Vector& weights, const Matrix& basis, double tol = 1e-8);

// |x|_m^2: squared norm of the first m coefficients.
double truncated_sq_norm(const Eigen::Ref<const Eigen::RowVectorXd>& coeffs, Eigen::Index m);

// S_{u,m,N}: the polarisation form
//   (1/4N) sum_i (|Y_i + Y_i^u|_m^2 - |Y_i - Y_i^u|_m^2 - |Ybar + Ybar^u|_m^2)
//   / (1/N) sum_i ((|Y_i|_m^2 + |Y_i^u|_m^2) / 2 - |(Ybar + Ybar^u) / 2|_m^2)
double estimate_functional_index(const FunctionalSample& fs, Eigen::Index m);

// m_{N} = max(1, floor(N^theta)) with theta in (1/(2 delta), 1/2) and delta > 1.
struct TruncationSchedule {
  double theta = 0.4;
  double delta = 1.5;
};

Eigen::Index m_schedule(std::size_t n, const TruncationSchedule& sched);

struct PolarTraces {
  double trace_gamma = 0.0;
  double trace_gamma_u = 0.0;
};

// Plug-in Tr(Gamma) = E|Y|^2 - |EY|^2 and
// Tr(Gamma_u) = (E|Y+Y^u|^2 - E|Y-Y^u|^2 - 4|EY|^2) / 4 with truncated norms;
// E|Y|^2 is pooled over Y and Y^u, EY is the pooled mean.
PolarTraces trace_polar(const FunctionalSample& fs, Eigen::Index m);

// e_l = E<T, phi_l>, v_l = E<T, phi_l>^2 for l = 1..L, plus an optional
// closed-form tail sum_{l > L} (v_l - e_l^2).
struct MomentTable {
  Vector e;
  Vector v;
  std::optional<double> analytic_tail;
};

// D_{N,m}(T) and the three terms of its decomposition
//   D - E|T|^2 + |ET|^2 = -U_N K + P_N L - B_m.
// E|T|^2 - |ET|^2 is taken over the tabulated range plus the analytic tail
// when present; without a tail the tabulated range is treated as complete.
struct DDecomposition {
  double d = 0.0;
  double uk = 0.0;
  double pl = 0.0;
  double b = 0.0;
  double centred_target = 0.0;  // E|T|^2 - |ET|^2
  double residual = 0.0;        // (D - target) - (-UK + PL - B)
  bool tail_truncated = false;  // no analytic tail registered
};

DDecomposition d_decomposition(const Matrix& coeff_t, const MomentTable& moments,
                               Eigen::Index m);

struct FunctionalBootstrap {
  double point = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t resamples = 0;
};

// Percentile bootstrap over replicate rows for S_{u,m,N}.
FunctionalBootstrap bootstrap_functional_interval(const FunctionalSample& fs, Eigen::Index m,
                                                  double level, std::size_t resamples,
                                                  std::uint64_t seed);

}  // namespace gsobol
