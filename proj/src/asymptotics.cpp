#include "gsobol/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gsobol/errors.hpp"
#include "gsobol/parallel.hpp"
#include "gsobol/rng.hpp"
#include "gsobol/summation.hpp"

namespace gsobol {

namespace {

// Empirical covariance (divisor N) of the columns of a and b.
Matrix cross_moments(const Matrix& a, const Matrix& b) {
  const Matrix ac = a.rowwise() - a.colwise().mean();
  const Matrix bc = b.rowwise() - b.colwise().mean();
  return (ac.transpose() * bc) / static_cast<double>(a.rows());
}

}  // namespace

CltDiagnostics plug_in_sigma2(const PickFreezeSample& s, const IndexEstimate& point,
                              bool moment_matrices) {
  s.validate();
  const Vector m = pooled_mean(s);
  const auto n = static_cast<std::size_t>(s.n());
  const double inv_n = 1.0 / static_cast<double>(n);

  const double total_var = point.trace_sigma;
  if (!(total_var > degenerate_threshold(s)))
    fail(ErrorKind::Degenerate, "sum of output variances vanishes");

  CltDiagnostics d;
  d.a_hat = 1.0 / total_var;
  d.b_hat = -0.5 * d.a_hat * point.value;

  // Per-replicate influence a sum_l U_l + b sum_l V_l.
  std::vector<double> influence(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    double u_sum = 0.0, v_sum = 0.0;
    for (Eigen::Index l = 0; l < s.k(); ++l) {
      const double dy = s.y(r, l) - m[l];
      const double dyu = s.yu(r, l) - m[l];
      u_sum += dy * dyu;
      v_sum += dy * dy + dyu * dyu;
    }
    influence[i] = d.a_hat * u_sum + d.b_hat * v_sum;
  }
  const double mean = inv_n * pairwise_sum(influence);
  d.sigma2_hat = inv_n * pairwise_sum(n, [&](std::size_t i) {
                   const double c = influence[i] - mean;
                   return c * c;
                 });
  d.sigma2_hat = std::max(0.0, d.sigma2_hat);

  if (moment_matrices) {
    const Matrix yc = s.y.rowwise() - m.transpose();
    const Matrix yuc = s.yu.rowwise() - m.transpose();
    const Matrix u_terms = yc.cwiseProduct(yuc);
    const Matrix v_terms = yc.cwiseAbs2() + yuc.cwiseAbs2();
    d.u_moments = cross_moments(u_terms, u_terms);
    d.v_moments = cross_moments(v_terms, v_terms);
    d.uv_moments = cross_moments(u_terms, v_terms);
  }
  return d;
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) fail(ErrorKind::Domain, "normal quantile needs p in (0,1)");
  // Acklam's rational approximation (relative error ~1e-9) followed by one
  // Halley step against erfc, which brings it to double precision.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00, 2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x = 0.0;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

ConfidenceInterval confidence_interval(const PickFreezeSample& s, double level) {
  if (!(level >= 0.0 && level < 1.0))
    fail(ErrorKind::Domain, "confidence level must lie in [0, 1)");
  const IndexEstimate point = estimate_index(s);
  const CltDiagnostics diag = plug_in_sigma2(s, point);
  const double z = level == 0.0 ? 0.0 : normal_quantile(0.5 * (1.0 + level));
  const double half = z * std::sqrt(diag.sigma2_hat / static_cast<double>(point.n));
  ConfidenceInterval ci;
  ci.point = point.value;
  ci.lo = point.value - half;
  ci.hi = point.value + half;
  ci.sigma2_hat = diag.sigma2_hat;
  return ci;
}

PickFreezeSample simulate(const ModelSpec& model, const InputSpec& inputs,
                          const SubsetU& u, std::size_t n, std::uint64_t seed,
                          unsigned workers) {
  const PickFreezeDesign design = pick_freeze_design(inputs, u, DesignConfig{n, seed});
  PickFreezeSample s;
  s.y = evaluate(model, design.x, workers);
  s.yu = evaluate(model, design.x_prime, workers);
  s.u = u;
  s.model_id = model_name(model);
  return s;
}

CoverageReport coverage_experiment(const ModelSpec& model, InputCase c, const SubsetU& u,
                                   std::size_t n, std::size_t reps, double level,
                                   std::uint64_t seed, unsigned workers) {
  if (reps == 0) fail(ErrorKind::Config, "coverage experiment needs reps >= 1");
  const double truth = true_index(model, c, u);
  const InputSpec inputs = default_inputs(model, c);

  std::vector<ConfidenceInterval> intervals(reps);
  parallel_for_chunks(reps, workers, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t r = lo; r < hi; ++r) {
      const PickFreezeSample s = simulate(model, inputs, u, n, derive_seed(seed, r));
      intervals[r] = confidence_interval(s, level);
    }
  });

  CoverageReport report;
  report.model = model_name(model);
  report.u = u;
  report.n = n;
  report.reps = reps;
  report.level = level;
  report.true_value = truth;
  std::size_t hits = 0;
  double widths = 0.0;
  for (const auto& ci : intervals) {
    hits += ci.contains(truth) ? 1 : 0;
    widths += ci.width();
  }
  report.coverage = static_cast<double>(hits) / static_cast<double>(reps);
  report.mean_width = widths / static_cast<double>(reps);
  return report;
}

BootstrapInterval bootstrap_closure_interval(const PickFreezeSample& s_u,
                                             const PickFreezeSample& s_v,
                                             const PickFreezeSample& s_uv, double level,
                                             std::size_t resamples, std::uint64_t seed) {
  if (resamples < 2) fail(ErrorKind::Config, "bootstrap needs at least 2 resamples");
  if (!(level > 0.0 && level < 1.0))
    fail(ErrorKind::Domain, "bootstrap level must lie in (0, 1)");
  BootstrapInterval out;
  out.point = estimate_closure(s_u, s_v, s_uv);
  out.resamples = resamples;

  const Eigen::Index n = s_u.n();
  auto resample = [n](const PickFreezeSample& s, const std::vector<Eigen::Index>& rows) {
    PickFreezeSample r;
    r.y.resize(n, s.k());
    r.yu.resize(n, s.k());
    for (Eigen::Index i = 0; i < n; ++i) {
      r.y.row(i) = s.y.row(rows[static_cast<std::size_t>(i)]);
      r.yu.row(i) = s.yu.row(rows[static_cast<std::size_t>(i)]);
    }
    r.u = s.u;
    return r;
  };

  std::vector<double> stats;
  stats.reserve(resamples);
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(n));
  for (std::size_t b = 0; b < resamples; ++b) {
    Stream stream(stream_key(seed, "bootstrap", b));
    for (auto& r : rows)
      r = static_cast<Eigen::Index>(stream.uniform01() * static_cast<double>(n));
    try {
      stats.push_back(
          estimate_closure(resample(s_u, rows), resample(s_v, rows), resample(s_uv, rows)));
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
