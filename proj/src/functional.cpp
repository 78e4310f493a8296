#include "gsobol/functional.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gsobol/errors.hpp"
#include "gsobol/rng.hpp"
#include "gsobol/summation.hpp"

namespace gsobol {

namespace {

void check_level(const FunctionalSample& fs, Eigen::Index m) {
  fs.validate();
  if (m < 1 || m > fs.m_max())
    fail(ErrorKind::Domain, "truncation level m=" + std::to_string(m) + " outside [1, " +
                                std::to_string(fs.m_max()) + "]");
}

Eigen::RowVectorXd column_means(const Matrix& a, Eigen::Index m) {
  const auto n = static_cast<std::size_t>(a.rows());
  Eigen::RowVectorXd out(m);
  for (Eigen::Index l = 0; l < m; ++l)
    out[l] = pairwise_sum(n, [&](std::size_t i) { return a(static_cast<Eigen::Index>(i), l); }) /
             static_cast<double>(n);
  return out;
}

}  // namespace

void FunctionalSample::validate() const {
  if (coeff_y.rows() != coeff_yu.rows() || coeff_y.cols() != coeff_yu.cols())
    fail(ErrorKind::Domain, "coefficient matrices must have the same shape");
  if (coeff_y.rows() < 2) fail(ErrorKind::Domain, "functional sample needs N >= 2");
  if (coeff_y.cols() < 1) fail(ErrorKind::Domain, "functional sample needs m_max >= 1");
}

void check_orthonormal(const Vector& weights, const Matrix& basis, double tol) {
  if (weights.size() != basis.rows())
    fail(ErrorKind::Basis, "weights and basis rows differ in length");
  const Matrix gram = basis.transpose() * weights.asDiagonal() * basis;
  Eigen::Index r = 0, c = 0;
  const Matrix dev = gram - Matrix::Identity(gram.rows(), gram.cols());
  const double worst = dev.cwiseAbs().maxCoeff(&r, &c);
  if (!(worst <= tol)) {
    std::ostringstream msg;
    msg << "basis is not orthonormal under the weights: Gram(" << r + 1 << "," << c + 1
        << ") = " << gram(r, c);
    fail(ErrorKind::Basis, msg.str());
  }
}

Matrix project_grid(const Matrix& trajectories, const Vector& weights, const Matrix& basis) {
  if (trajectories.cols() != weights.size())
    fail(ErrorKind::Domain, "trajectory grid and weights differ in length");
  check_orthonormal(weights, basis);
  return trajectories * weights.asDiagonal() * basis;
}

double truncated_sq_norm(const Eigen::Ref<const Eigen::RowVectorXd>& coeffs, Eigen::Index m) {
  return coeffs.head(m).squaredNorm();
}

double estimate_functional_index(const FunctionalSample& fs, Eigen::Index m) {
  check_level(fs, m);
  const auto n = static_cast<std::size_t>(fs.n());
  const double N = static_cast<double>(n);
  const Eigen::RowVectorXd mean_sum =
      column_means(fs.coeff_y, m) + column_means(fs.coeff_yu, m);
  const double mean_sum_sq = mean_sum.squaredNorm();

  const double num = pairwise_sum(n, [&](std::size_t i) {
                       const auto r = static_cast<Eigen::Index>(i);
                       const auto y = fs.coeff_y.row(r).head(m);
                       const auto yu = fs.coeff_yu.row(r).head(m);
                       return (y + yu).squaredNorm() - (y - yu).squaredNorm() - mean_sum_sq;
                     }) /
                     (4.0 * N);
  const double den = pairwise_sum(n, [&](std::size_t i) {
                       const auto r = static_cast<Eigen::Index>(i);
                       return 0.5 * (fs.coeff_y.row(r).head(m).squaredNorm() +
                                     fs.coeff_yu.row(r).head(m).squaredNorm()) -
                              0.25 * mean_sum_sq;
                     }) /
                     N;
  const double peak = std::max(fs.coeff_y.leftCols(m).cwiseAbs().maxCoeff(),
                               fs.coeff_yu.leftCols(m).cwiseAbs().maxCoeff());
  if (!(std::abs(den) > 1e-12 * peak * peak))
    fail(ErrorKind::Degenerate, "truncated trace of the covariance operator vanishes");
  return num / den;
}

Eigen::Index m_schedule(std::size_t n, const TruncationSchedule& sched) {
  if (n < 2) fail(ErrorKind::Domain, "truncation schedule needs N >= 2");
  if (!(sched.delta > 1.0)) fail(ErrorKind::Schedule, "decay exponent delta must exceed 1");
  const double lower = 1.0 / (2.0 * sched.delta);
  if (!(sched.theta > lower && sched.theta < 0.5)) {
    std::ostringstream msg;
    msg << "theta=" << sched.theta << " outside (" << lower << ", 0.5)";
    fail(ErrorKind::Schedule, msg.str());
  }
  const double raw = std::pow(static_cast<double>(n), sched.theta);
  return std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::floor(raw + 1e-9)));
}

PolarTraces trace_polar(const FunctionalSample& fs, Eigen::Index m) {
  check_level(fs, m);
  const auto n = static_cast<std::size_t>(fs.n());
  const double N = static_cast<double>(n);
  const Eigen::RowVectorXd mean =
      0.5 * (column_means(fs.coeff_y, m) + column_means(fs.coeff_yu, m));
  const double mean_sq = mean.squaredNorm();
  auto row_avg = [&](auto term) { return pairwise_sum(n, term) / N; };

  PolarTraces t;
  t.trace_gamma = row_avg([&](std::size_t i) {
                    const auto r = static_cast<Eigen::Index>(i);
                    return 0.5 * (fs.coeff_y.row(r).head(m).squaredNorm() +
                                  fs.coeff_yu.row(r).head(m).squaredNorm());
                  }) -
                  mean_sq;
  const double plus = row_avg([&](std::size_t i) {
    const auto r = static_cast<Eigen::Index>(i);
    return (fs.coeff_y.row(r).head(m) + fs.coeff_yu.row(r).head(m)).squaredNorm();
  });
  const double minus = row_avg([&](std::size_t i) {
    const auto r = static_cast<Eigen::Index>(i);
    return (fs.coeff_y.row(r).head(m) - fs.coeff_yu.row(r).head(m)).squaredNorm();
  });
  t.trace_gamma_u = 0.25 * (plus - minus - 4.0 * mean_sq);
  return t;
}

DDecomposition d_decomposition(const Matrix& coeff_t, const MomentTable& moments,
                               Eigen::Index m) {
  const Eigen::Index n_rows = coeff_t.rows();
  if (n_rows < 2) fail(ErrorKind::Domain, "decomposition needs N >= 2");
  if (m < 1 || m > coeff_t.cols())
    fail(ErrorKind::Domain, "truncation level outside the coefficient range");
  if (moments.e.size() != moments.v.size())
    fail(ErrorKind::Domain, "moment vectors e and v differ in length");
  if (moments.e.size() < m)
    fail(ErrorKind::Domain, "moments missing for l <= m=" + std::to_string(m));
  for (Eigen::Index l = 0; l < moments.v.size(); ++l) {
    const double e2 = moments.e[l] * moments.e[l];
    if (moments.v[l] < e2 - 1e-12 * std::max(1.0, e2))
      fail(ErrorKind::Domain, "moment table violates v_l >= e_l^2 at l=" + std::to_string(l + 1));
  }

  const auto n = static_cast<std::size_t>(n_rows);
  const double N = static_cast<double>(n);
  const auto rows = [&](auto term) { return pairwise_sum(n, term); };

  DDecomposition out;
  const Eigen::RowVectorXd mean = column_means(coeff_t, m);
  out.d = rows([&](std::size_t i) {
            return coeff_t.row(static_cast<Eigen::Index>(i)).head(m).squaredNorm();
          }) / N -
          mean.squaredNorm();

  double uk = 0.0, pl = 0.0, spread_head = 0.0;
  for (Eigen::Index l = 0; l < m; ++l) {
    const double e = moments.e[l];
    const double v = moments.v[l];
    const auto z = [&](std::size_t i) { return coeff_t(static_cast<Eigen::Index>(i), l) - e; };
    const double z_sum = rows(z);
    const double z_sq = rows([&](std::size_t i) { return z(i) * z(i); });
    // sum_{i != j} Z_il Z_jl = (sum Z)^2 - sum Z^2
    uk += (z_sum * z_sum - z_sq) / (N * N);
    pl += rows([&](std::size_t i) {
      const double c = coeff_t(static_cast<Eigen::Index>(i), l);
      return (c * c - v) - 2.0 * e * z(i);
    });
    spread_head += v - e * e;
  }
  out.uk = uk;
  out.pl = pl * (1.0 / N) * (1.0 - 1.0 / N);

  double spread_tail = 0.0;
  for (Eigen::Index l = m; l < moments.v.size(); ++l)
    spread_tail += moments.v[l] - moments.e[l] * moments.e[l];
  if (moments.analytic_tail)
    spread_tail += *moments.analytic_tail;
  else
    out.tail_truncated = true;

  out.b = spread_tail + spread_head / N;
  out.centred_target = spread_head + spread_tail;
  out.residual = (out.d - out.centred_target) - (-out.uk + out.pl - out.b);
  return out;
}

FunctionalBootstrap bootstrap_functional_interval(const FunctionalSample& fs, Eigen::Index m,
                                                  double level, std::size_t resamples,
                                                  std::uint64_t seed) {
  check_level(fs, m);
  if (resamples < 2) fail(ErrorKind::Config, "bootstrap needs at least 2 resamples");
  if (!(level > 0.0 && level < 1.0))
    fail(ErrorKind::Domain, "bootstrap level must lie in (0, 1)");
  FunctionalBootstrap out;
  out.point = estimate_functional_index(fs, m);
  out.resamples = resamples;

  const Eigen::Index n = fs.n();
  FunctionalSample boot;
  boot.coeff_y.resize(n, m);
  boot.coeff_yu.resize(n, m);
  boot.basis_id = fs.basis_id;
  boot.u = fs.u;
  std::vector<double> stats;
  stats.reserve(resamples);
  for (std::size_t b = 0; b < resamples; ++b) {
    Stream stream(stream_key(seed, "bootstrap", b));
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto r = static_cast<Eigen::Index>(stream.uniform01() * static_cast<double>(n));
      boot.coeff_y.row(i) = fs.coeff_y.row(r).head(m);
      boot.coeff_yu.row(i) = fs.coeff_yu.row(r).head(m);
    }
    try {
      stats.push_back(estimate_functional_index(boot, m));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Degenerate) throw;
    }
  }
  if (stats.size() < 2) fail(ErrorKind::Degenerate, "bootstrap resamples are all degenerate");
  std::sort(stats.begin(), stats.end());
  out.lo = sorted_percentile(stats, 0.5 * (1.0 - level));
  out.hi = sorted_percentile(stats, 0.5 * (1.0 + level));
  return out;
}

}  // namespace gsobol
