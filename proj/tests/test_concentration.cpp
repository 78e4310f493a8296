#include <cmath>

#include <doctest.h>

#include "gsobol/asymptotics.hpp"
#include "gsobol/concentration.hpp"
#include "gsobol/errors.hpp"

using namespace gsobol;

// Reference values evaluated at 40 significant digits with mpmath.
TEST_CASE("oracle bounds against high-precision reference") {
  const BoundInputs v = BoundInputs::from_weights({0.5, 0.3}, 2.0);
  const DeviationBounds b = deviation_bounds_oracle(0.3, 0.1, 10000, v);
  CHECK(b.upper == doctest::Approx(0.60629411276733725772).epsilon(1e-12));
  REQUIRE(b.lower.has_value());
  CHECK(*b.lower == doctest::Approx(0.60684605562725261087).epsilon(1e-12));
}

TEST_CASE("worst-case bounds against high-precision reference") {
  const DeviationBounds b = worst_case_bounds(0.05, 1000000, 0.25);
  CHECK(b.upper == doctest::Approx(0.011928246720606672224).epsilon(1e-12));
  REQUIRE(b.lower.has_value());
  CHECK(*b.lower == doctest::Approx(0.0075773421859821068596).epsilon(1e-12));
}

TEST_CASE("oracle bound at t = 0 and lower-bound domain") {
  const BoundInputs v = BoundInputs::from_weights({0.8}, 1.0);
  for (double S : {0.0, 0.3, 1.0}) {
    const DeviationBounds b = deviation_bounds_oracle(S, 0.0, 50, v);
    CHECK(b.upper <= 1.0);
    CHECK(b.upper > 0.0);
    const double thr = (1 - S) * (1 + S) / (2 * 50 - (1 + S));
    if (thr > 0) CHECK(!deviation_bounds_oracle(S, 0.5 * thr, 50, v).lower.has_value());
    CHECK(deviation_bounds_oracle(S, thr + 1e-6, 50, v).lower.has_value());
  }
  CHECK_THROWS_AS(deviation_bounds_oracle(0.3, 0.1, 0, v), Error);
  CHECK_THROWS_AS(deviation_bounds_oracle(0.3, 0.1, 10, BoundInputs::from_weights({0.1}, 0.0)),
                  Error);
}

TEST_CASE("worst-case domain and errors") {
  CHECK(!worst_case_bounds(0.001, 100, 0.5).lower.has_value());  // below 9/(8N)
  CHECK(!worst_case_bounds(1.0, 100, 0.5).lower.has_value());
  CHECK(worst_case_bounds(0.5, 100, 0.5).lower.has_value());
  CHECK_THROWS_AS(worst_case_bounds(0.1, 100, 0.0), Error);
}

TEST_CASE("monotonicity and range on a grid") {
  const double ts[] = {0.01, 0.03, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.7, 0.9};
  const std::int64_t ns[] = {2, 10, 50, 100, 1000, 5000, 10000, 100000, 1000000, 100000000};
  const double vs[] = {0.01, 0.1, 0.3, 0.6, 1.0};
  for (double V : vs)
    for (std::int64_t n : ns)
      for (double t : ts) {
        const double two = worst_case_two_sided(t, n, V);
        const DeviationBounds b = worst_case_bounds(t, n, V);
        // Positivity is checked on the log scale; the double value may
        // underflow to 0 once the exponent drops below about -745.
        CHECK(std::isfinite(b.log_upper));
        CHECK(b.log_upper <= 0.0);
        CHECK(b.upper <= 1.0);
        if (b.log_upper > -700.0) CHECK(b.upper > 0.0);
        if (b.lower) {
          CHECK(std::isfinite(*b.log_lower));
          CHECK(*b.log_lower <= 0.0);
          CHECK(*b.lower <= 1.0);
          if (*b.log_lower > -700.0) CHECK(*b.lower > 0.0);
        }
        CHECK(two >= 0.0);
        CHECK(two <= 2.0);
      }
  for (double V : vs)
    for (std::int64_t n : ns)
      for (std::size_t i = 1; i < std::size(ts); ++i)
        CHECK(worst_case_bounds(ts[i], n, V).log_upper <= worst_case_bounds(ts[i - 1], n, V).log_upper);
  for (double V : vs)
    for (double t : ts)
      for (std::size_t i = 1; i < std::size(ns); ++i)
        CHECK(worst_case_bounds(t, ns[i], V).log_upper <= worst_case_bounds(t, ns[i - 1], V).log_upper);
  for (std::int64_t n : ns)
    for (double t : ts)
      for (std::size_t i = 1; i < std::size(vs); ++i)
        CHECK(worst_case_bounds(t, n, vs[i]).log_upper <= worst_case_bounds(t, n, vs[i - 1]).log_upper);
}

TEST_CASE("worst case dominates the oracle upper bound") {
  // V = (sum v)^2 links the two forms.
  for (double sv : {0.2, 0.6, 1.0})
    for (double S = 0.0; S <= 1.0 + 1e-12; S += 0.1)
      for (double t : {0.01, 0.05, 0.2, 0.5})
        for (std::int64_t n : {10, 100, 10000}) {
          const BoundInputs v = BoundInputs::from_weights({sv}, 1.0);
          CHECK(worst_case_bounds(t, n, sv * sv).upper >=
                deviation_bounds_oracle(S, t, n, v).upper * (1 - 1e-14));
        }
}

TEST_CASE("sample size planner contract") {
  for (double t : {0.05, 0.1, 0.3})
    for (double V : {0.01, 0.2, 1.0}) {
      const SampleSizePlan p = min_sample_size(t, 0.05, V);
      CHECK(p.bound_at_n_star <= 0.05);
      CHECK(worst_case_two_sided(t, p.n_star, V) == p.bound_at_n_star);
      CHECK(worst_case_two_sided(t, p.n_star - 1, V) > 0.05);
    }
  CHECK(min_sample_size(0.2, 0.05, 0.3).n_star <= min_sample_size(0.1, 0.05, 0.3).n_star);
  CHECK(min_sample_size(0.1, 0.05, 0.6).n_star <= min_sample_size(0.1, 0.05, 0.3).n_star);
  try {
    min_sample_size(0.1, 0.05, 1e-6, 1000);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Unattainable);
  }
  CHECK_THROWS_AS(min_sample_size(1.5, 0.05, 0.3), Error);
  CHECK_THROWS_AS(min_sample_size(0.1, 1.0, 0.3), Error);
}

TEST_CASE("estimate_v") {
  SUBCASE("zero output") {
    const PickFreezeSample s{Matrix::Zero(10, 2), Matrix::Zero(10, 2), SubsetU{1}, "zero"};
    const BoundInputs b = estimate_v(s, 1.0);
    CHECK(b.V == 0.0);
    CHECK(b.v_weights == std::vector<double>{0.0, 0.0});
  }
  const BilinearAB model{2, 3};
  const double rho = std::sqrt(9.0 + 36.0);
  const auto s = simulate(model, default_inputs(model, InputCase::Uniform01), SubsetU{1}, 20000, 1);
  SUBCASE("doubling rho divides weights by four") {
    const BoundInputs a = estimate_v(s, rho);
    const BoundInputs b = estimate_v(s, 2 * rho);
    for (std::size_t l = 0; l < 2; ++l)
      CHECK(b.v_weights[l] == doctest::Approx(a.v_weights[l] / 4).epsilon(1e-14));
  }
  SUBCASE("V near a large-sample oracle") {
    const auto big = simulate(model, default_inputs(model, InputCase::Uniform01), SubsetU{1},
                              1000000, 77, 8);
    // oracle: plain per-column variances of the base output alone
    double sum_var = 0.0;
    for (Eigen::Index l = 0; l < 2; ++l) {
      const Eigen::ArrayXd c = big.y.col(l).array();
      sum_var += (c - c.mean()).square().mean();
    }
    const double oracle_v = std::pow(sum_var / (rho * rho), 2);
    CHECK(std::abs(estimate_v(s, rho).V - oracle_v) < 0.05 * oracle_v);
  }
  SUBCASE("rho too small names the row") {
    try {
      estimate_v(s, 1.0);
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InvalidRho);
      CHECK(std::string(e.what()).find("row") != std::string::npos);
    }
  }
}
