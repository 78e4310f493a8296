#include "gsobol/estimators.hpp"

#include <cmath>
#include <limits>

#include "gsobol/errors.hpp"
#include "gsobol/summation.hpp"

namespace gsobol {

namespace {

struct Traces {
  double cu = 0.0;
  double sigma = 0.0;
};

// Traces from rows centred at the pooled mean m. Algebraically identical to
// (1/N) sum <Y_i^u, Y_i> - |m|^2 and (1/N) sum (|Y_i|^2 + |Y_i^u|^2)/2 - |m|^2.
Traces centred_traces(const PickFreezeSample& s, const Vector& m) {
  const auto n = static_cast<std::size_t>(s.n());
  const double inv_n = 1.0 / static_cast<double>(n);
  Traces t;
  t.cu = inv_n * pairwise_sum(n, [&](std::size_t i) {
           const auto r = static_cast<Eigen::Index>(i);
           return (s.y.row(r) - m.transpose()).dot(s.yu.row(r) - m.transpose());
         });
  t.sigma = inv_n * pairwise_sum(n, [&](std::size_t i) {
              const auto r = static_cast<Eigen::Index>(i);
              return 0.5 * ((s.y.row(r) - m.transpose()).squaredNorm() +
                            (s.yu.row(r) - m.transpose()).squaredNorm());
            });
  return t;
}

}  // namespace

void PickFreezeSample::validate() const {
  if (y.rows() != yu.rows() || y.cols() != yu.cols())
    fail(ErrorKind::Domain, "Y and Y^u must have the same shape");
  if (y.rows() < 2) fail(ErrorKind::Domain, "pick-freeze sample needs N >= 2");
  if (y.cols() < 1) fail(ErrorKind::Domain, "pick-freeze sample needs k >= 1");
}

Vector pooled_mean(const PickFreezeSample& s) {
  const auto n = static_cast<std::size_t>(s.n());
  Vector m(s.k());
  for (Eigen::Index l = 0; l < s.k(); ++l) {
    m[l] = pairwise_sum(n, [&](std::size_t i) {
             const auto r = static_cast<Eigen::Index>(i);
             return 0.5 * (s.y(r, l) + s.yu(r, l));
           }) /
           static_cast<double>(n);
  }
  return m;
}

double degenerate_threshold(const PickFreezeSample& s) {
  const double peak = std::max(s.y.cwiseAbs().maxCoeff(), s.yu.cwiseAbs().maxCoeff());
  return 1e-12 * peak * peak;
}

EmpiricalCov empirical_covariances(const PickFreezeSample& s) {
  s.validate();
  EmpiricalCov cov;
  cov.pooled_mean = pooled_mean(s);
  const Matrix yc = s.y.rowwise() - cov.pooled_mean.transpose();
  const Matrix yuc = s.yu.rowwise() - cov.pooled_mean.transpose();
  const double inv_n = 1.0 / static_cast<double>(s.n());
  cov.cu_hat = inv_n * (yuc.transpose() * yc);
  cov.sigma_hat = (0.5 * inv_n) * (yc.transpose() * yc + yuc.transpose() * yuc);
  return cov;
}

IndexEstimate estimate_index(const PickFreezeSample& s) {
  s.validate();
  const Traces t = centred_traces(s, pooled_mean(s));
  if (!(std::abs(t.sigma) > degenerate_threshold(s)))
    fail(ErrorKind::Degenerate, "Tr(Sigma_N) vanishes: output is (numerically) constant");
  IndexEstimate est;
  est.trace_cu = t.cu;
  est.trace_sigma = t.sigma;
  est.value = t.cu / t.sigma;
  est.n = static_cast<std::size_t>(s.n());
  est.u = s.u;
  return est;
}

PickFreezeSample column(const PickFreezeSample& s, Eigen::Index l) {
  PickFreezeSample c;
  c.y = s.y.col(l);
  c.yu = s.yu.col(l);
  c.u = s.u;
  c.model_id = s.model_id + "[" + std::to_string(l + 1) + "]";
  return c;
}

std::vector<double> estimate_componentwise(const PickFreezeSample& s) {
  s.validate();
  std::vector<double> out(static_cast<std::size_t>(s.k()));
  for (Eigen::Index l = 0; l < s.k(); ++l) {
    try {
      out[static_cast<std::size_t>(l)] = estimate_index(column(s, l)).value;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Degenerate) throw;
      out[static_cast<std::size_t>(l)] = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return out;
}

double estimate_m_index(const PickFreezeSample& s, const Matrix& weight) {
  const EmpiricalCov cov = empirical_covariances(s);
  if (weight.rows() != s.k() || weight.cols() != s.k())
    fail(ErrorKind::Domain, "weighting matrix must be k x k");
  const double num = (weight * cov.cu_hat).trace();
  const double den = (weight * cov.sigma_hat).trace();
  const double scale = weight.cwiseAbs().maxCoeff() * degenerate_threshold(s);
  if (!(std::abs(den) > scale))
    fail(ErrorKind::Degenerate, "Tr(M Sigma_N) vanishes for this weighting");
  return num / den;
}

double estimate_closure(const PickFreezeSample& s_u, const PickFreezeSample& s_v,
                        const PickFreezeSample& s_uv) {
  for (const auto* s : {&s_v, &s_uv}) {
    if (s->n() != s_u.n() || s->k() != s_u.k())
      fail(ErrorKind::Domain, "closure samples must share N and k");
  }
  return estimate_index(s_uv).value - estimate_index(s_u).value -
         estimate_index(s_v).value;
}

}  // namespace gsobol
