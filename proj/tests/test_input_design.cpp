#include <cmath>

#include <doctest.h>

#include "gsobol/errors.hpp"
#include "gsobol/input_design.hpp"
#include "gsobol/rng.hpp"

using namespace gsobol;

namespace {

double correlation(const Vector& a, const Vector& b) {
  const Vector ac = a.array() - a.mean();
  const Vector bc = b.array() - b.mean();
  return ac.dot(bc) / std::sqrt(ac.squaredNorm() * bc.squaredNorm());
}

}  // namespace

TEST_CASE("rng streams are keyed and reproducible") {
  Stream a(stream_key(1, "base", 0)), b(stream_key(1, "base", 0)), c(stream_key(1, "base", 1));
  const auto a1 = a(), b1 = b(), c1 = c();
  CHECK(a1 == b1);
  CHECK(a1 != c1);
  CHECK(stream_key(1, "base", 0) != stream_key(1, "prime", 0));
  CHECK(derive_seed(5, 0) != derive_seed(5, 1));
  Stream u(42);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform01();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
}

TEST_CASE("uniform samples stay in support") {
  const InputSpec spec = InputSpec::iid(2, Uniform{0.0, 1.0});
  const Matrix x = sample_inputs(spec, 3, 99);
  CHECK(x.rows() == 3);
  CHECK(x.minCoeff() >= 0.0);
  CHECK(x.maxCoeff() <= 1.0);
  const Matrix y = sample_inputs(InputSpec::iid(1, Uniform{-2.0, 5.0}), 1000, 3);
  CHECK(y.minCoeff() >= -2.0);
  CHECK(y.maxCoeff() <= 5.0);
}

TEST_CASE("gaussian sample mean within 3/sqrt(N)") {
  const std::size_t n = 100000;
  const Matrix x = sample_inputs(InputSpec::iid(1, StandardGaussian{}), n, 7);
  CHECK(std::abs(x.col(0).mean()) < 3.0 / std::sqrt(static_cast<double>(n)));
  const double var = (x.col(0).array() - x.col(0).mean()).square().mean();
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("sampling is deterministic") {
  const InputSpec spec({StandardGaussian{}, Uniform{0.0, 2.0}});
  const Matrix a = sample_inputs(spec, 500, 11);
  const Matrix b = sample_inputs(spec, 500, 11);
  CHECK(a == b);
  CHECK(!(a == sample_inputs(spec, 500, 12)));
}

TEST_CASE("invalid distribution parameters are config errors") {
  try {
    InputSpec spec({Uniform{1.0, 1.0}});
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
  }
  CHECK_THROWS_AS(InputSpec(std::vector<Distribution>{}), Error);
}

TEST_CASE("subset parsing and algebra") {
  const SubsetU u = SubsetU::parse("3,1");
  CHECK(u.indices() == std::vector<int>{1, 3});
  CHECK(u.complement(4).indices() == std::vector<int>{2, 4});
  CHECK(u.united(SubsetU{2}).indices() == std::vector<int>{1, 2, 3});
  CHECK(u.contains_column(0));
  CHECK(!u.contains_column(1));
  CHECK(SubsetU::full(3).indices() == std::vector<int>{1, 2, 3});
  try {
    SubsetU{5}.validate(4);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
}

TEST_CASE("pick-freeze: full subset freezes everything") {
  const InputSpec spec = InputSpec::iid(3, StandardGaussian{});
  const auto d = pick_freeze_design(spec, SubsetU::full(3), {200, 5});
  CHECK(d.x == d.x_prime);
}

TEST_CASE("pick-freeze: empty subset gives independent copies") {
  const std::size_t n = 20000;
  const InputSpec spec = InputSpec::iid(2, StandardGaussian{});
  const auto d = pick_freeze_design(spec, SubsetU{}, {n, 5});
  const double bound = 3.0 / std::sqrt(static_cast<double>(n));
  for (Eigen::Index j = 0; j < 2; ++j)
    CHECK(std::abs(correlation(d.x.col(j), d.x_prime.col(j))) < bound);
}

TEST_CASE("pick-freeze: frozen columns bitwise equal, others redrawn") {
  const InputSpec spec({Uniform{0.0, 1.0}, StandardGaussian{}});
  const auto d = pick_freeze_design(spec, SubsetU{1}, {1000, 17});
  for (Eigen::Index i = 0; i < 1000; ++i) {
    CHECK(d.x(i, 0) == d.x_prime(i, 0));
    CHECK(d.x(i, 1) != d.x_prime(i, 1));
  }
}

TEST_CASE("pick-freeze: base sample independent of u") {
  const InputSpec spec = InputSpec::iid(3, StandardGaussian{});
  const auto d1 = pick_freeze_design(spec, SubsetU{1}, {300, 9});
  const auto d2 = pick_freeze_design(spec, SubsetU{2, 3}, {300, 9});
  CHECK(d1.x == d2.x);
  CHECK(d1.x == sample_inputs(spec, 300, 9));
}

TEST_CASE("pick-freeze: errors") {
  const InputSpec spec = InputSpec::iid(2, StandardGaussian{});
  CHECK_THROWS_AS(pick_freeze_design(spec, SubsetU{3}, {100, 1}), Error);
  CHECK_THROWS_AS(pick_freeze_design(spec, SubsetU{1}, {1, 1}), Error);
}
