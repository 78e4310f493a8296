#pragma once

#include <cstdint>
#include <random>

// Plain Monte Carlo for Y = (X1 + X1 X2 + X2, a X1 + b X1 X2 + X2) with
// X ~ U[0,1]^2, using mt19937_64 and the covariance definition directly.

namespace oracle {

struct MomentAcc {
  double n = 0, sy[2] = {0, 0}, syu[2] = {0, 0}, syy[2] = {0, 0}, syyu[2] = {0, 0};
};

inline double bilinear_uniform_index(double a, double b, int frozen, std::uint64_t n,
                                     std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto f = [&](double x1, double x2, int l) {
    return l == 0 ? x1 + x1 * x2 + x2 : a * x1 + b * x1 * x2 + x2;
  };
  MomentAcc m;
  for (std::uint64_t i = 0; i < n; ++i) {
    const double x1 = unif(gen), x2 = unif(gen), fresh = unif(gen);
    const double x1u = frozen == 1 ? x1 : fresh;
    const double x2u = frozen == 2 ? x2 : fresh;
    for (int l = 0; l < 2; ++l) {
      const double y = f(x1, x2, l), yu = f(x1u, x2u, l);
      m.sy[l] += y;
      m.syu[l] += yu;
      m.syy[l] += y * y;
      m.syyu[l] += y * yu;
    }
  }
  const double N = static_cast<double>(n);
  double num = 0, den = 0;
  for (int l = 0; l < 2; ++l) {
    num += m.syyu[l] / N - (m.sy[l] / N) * (m.syu[l] / N);
    den += m.syy[l] / N - (m.sy[l] / N) * (m.sy[l] / N);
  }
  return num / den;
}

}  // namespace oracle
