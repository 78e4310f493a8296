#include "gsobol/concentration.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "gsobol/errors.hpp"

namespace gsobol {

namespace {

void check_n(std::int64_t n) {
  if (n < 1) fail(ErrorKind::Domain, "concentration bounds need N >= 1");
}

DeviationBounds from_logs(double log_upper, std::optional<double> log_lower) {
  DeviationBounds b;
  b.log_upper = log_upper;
  b.upper = std::exp(log_upper);
  if (log_lower) {
    b.log_lower = log_lower;
    b.lower = std::exp(*log_lower);
  }
  return b;
}

}  // namespace

double BoundInputs::v_sum() const noexcept {
  return std::accumulate(v_weights.begin(), v_weights.end(), 0.0);
}

BoundInputs BoundInputs::from_weights(std::vector<double> v, double rho) {
  if (!(rho > 0.0)) fail(ErrorKind::Domain, "rho must be positive");
  BoundInputs b;
  b.v_weights = std::move(v);
  b.rho = rho;
  const double s = b.v_sum();
  b.V = s * s;
  return b;
}

DeviationBounds deviation_bounds_oracle(double S, double t, std::int64_t n,
                                        const BoundInputs& v) {
  check_n(n);
  if (!(v.rho > 0.0)) fail(ErrorKind::Domain, "rho must be positive");
  if (!(t >= 0.0)) fail(ErrorKind::Domain, "deviation t must be >= 0");
  const double N = static_cast<double>(n);
  const double sv = v.v_sum();

  // The weight sum multiplies the ratio inside the square; the worst-case
  // bound below uses V = (sum v_l)^2 consistently with this placement.
  const double up_num = t - (S + t - 1.0) * (S + 1.0) / (2.0 * N);
  const double up_den = (1.0 + S + t) + std::abs(S + t - 1.0);
  const double up_term = up_num / up_den * sv;
  const double log_upper = -(N / 32.0) * up_term * up_term;

  std::optional<double> log_lower;
  const double threshold = (1.0 - S) * (1.0 + S) / (2.0 * N - (1.0 + S));
  if (t >= threshold) {
    const double lo_num = t + (S - t - 1.0) * (S + 1.0) / (2.0 * N);
    const double lo_den = (1.0 + S - t) + std::abs(S - t - 1.0);
    const double lo_term = lo_num / lo_den * sv;
    log_lower = -(N / 32.0) * lo_term * lo_term;
  }
  return from_logs(log_upper, log_lower);
}

DeviationBounds worst_case_bounds(double t, std::int64_t n, double V) {
  check_n(n);
  if (!(V > 0.0)) fail(ErrorKind::Domain, "V must be positive");
  if (!(t >= 0.0)) fail(ErrorKind::Domain, "deviation t must be >= 0");
  const double N = static_cast<double>(n);
  const double shrink = 1.0 - 1.0 / N;
  const double ratio = t / (1.0 + t);
  const double log_upper = -(N * V / 128.0) * shrink * shrink * ratio * ratio;

  std::optional<double> log_lower;
  const double offset = 9.0 / (8.0 * N);
  if (t > offset && t < 1.0) {
    const double gap = t - offset;
    log_lower = -(N * V / 128.0) * gap * gap;
  }
  return from_logs(log_upper, log_lower);
}

double worst_case_two_sided(double t, std::int64_t n, double V) {
  const DeviationBounds b = worst_case_bounds(t, n, V);
  return b.upper + b.lower.value_or(1.0);
}

SampleSizePlan min_sample_size(double t, double alpha, double V, std::int64_t cap) {
  if (!(t > 0.0 && t < 1.0)) fail(ErrorKind::Domain, "min_sample_size needs 0 < t < 1");
  if (!(alpha > 0.0 && alpha < 1.0))
    fail(ErrorKind::Domain, "min_sample_size needs 0 < alpha < 1");
  if (!(V > 0.0)) fail(ErrorKind::Domain, "V must be positive");

  auto ok = [&](std::int64_t n) { return worst_case_two_sided(t, n, V) <= alpha; };

  // Both sides are nonincreasing in N once N > 9/(8t), so the feasible set
  // is an upper ray [N*, inf).
  std::int64_t hi = 2;
  while (!ok(hi)) {
    if (hi >= cap) {
      std::ostringstream msg;
      msg << "no N <= " << cap << " reaches alpha=" << alpha << " at t=" << t
          << " with V=" << V;
      fail(ErrorKind::Unattainable, msg.str());
    }
    hi = std::min(cap, hi * 2);
  }
  std::int64_t lo = 1;  // ok(1) is false: the lower side is undefined there
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (ok(mid))
      hi = mid;
    else
      lo = mid;
  }
  SampleSizePlan plan;
  plan.t = t;
  plan.alpha = alpha;
  plan.V = V;
  plan.n_star = hi;
  plan.bound_at_n_star = worst_case_two_sided(t, hi, V);
  return plan;
}

BoundInputs estimate_v(const PickFreezeSample& s, double rho) {
  s.validate();
  if (!(rho > 0.0)) fail(ErrorKind::Domain, "rho must be positive");
  for (Eigen::Index i = 0; i < s.n(); ++i) {
    const double ny = s.y.row(i).norm();
    const double nyu = s.yu.row(i).norm();
    if (!(ny < rho && nyu < rho)) {
      std::ostringstream msg;
      msg << "row " << i << " has norm " << std::max(ny, nyu) << " >= rho=" << rho;
      fail(ErrorKind::InvalidRho, msg.str());
    }
  }
  // Diagonal of Sigma_N only.
  const Vector m = pooled_mean(s);
  const Matrix yc = s.y.rowwise() - m.transpose();
  const Matrix yuc = s.yu.rowwise() - m.transpose();
  const Vector diag = 0.5 * (yc.colwise().squaredNorm() + yuc.colwise().squaredNorm()).transpose() /
                      static_cast<double>(s.n());
  std::vector<double> v(static_cast<std::size_t>(s.k()));
  for (Eigen::Index l = 0; l < s.k(); ++l)
    v[static_cast<std::size_t>(l)] = diag[l] / (rho * rho);
  return BoundInputs::from_weights(std::move(v), rho);
}

}  // namespace gsobol
