// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli_app.hpp"
#include "gsobol/asymptotics.hpp"
#include "gsobol/concentration.hpp"
#include "gsobol/functional.hpp"
#include "gsobol/matricial.hpp"
#include "oracles/bilinear_mc.hpp"
#include "oracles/dense_hk.hpp"

using namespace gsobol;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

Matrix gaussian(Eigen::Index r, Eigen::Index c, std::mt19937_64& gen) {
  std::normal_distribution<double> g;
  Matrix a(r, c);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = g(gen);
  return a;
}

Matrix orthogonal(Eigen::Index k, std::mt19937_64& gen) {
  Eigen::HouseholderQR<Matrix> qr(gaussian(k, k, gen));
  return qr.householderQ();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

Outcome closed_form_true_values() {
  Outcome o;
  const BilinearAB m{2, 3};
  const double g1 = true_index(m, InputCase::Gaussian, SubsetU{1});
  const double g2 = true_index(m, InputCase::Gaussian, SubsetU{2});
  const double u1 = true_index(m, InputCase::Uniform01, SubsetU{1});
  const double u2 = true_index(m, InputCase::Uniform01, SubsetU{2});
  o.require(std::lround(g1 * 1e4) == 2941, "gaussian S1 " + fmt(g1));
  o.require(std::lround(g2 * 1e4) == 1176, "gaussian S2 " + fmt(g2));
  o.require(std::lround(u1 * 1e4) == 6084, "uniform S1 " + fmt(u1));
  o.require(std::lround(u2 * 1e4) == 3566, "uniform S2 " + fmt(u2));
  const double mc1 = oracle::bilinear_uniform_index(2, 3, 1, 10'000'000, 101);
  const double mc2 = oracle::bilinear_uniform_index(2, 3, 2, 10'000'000, 202);
  o.require(std::abs(u1 - mc1) < 5e-3, "MC S1 " + fmt(mc1));
  o.require(std::abs(u2 - mc2) < 5e-3, "MC S2 " + fmt(mc2));
  if (o.pass)
    o.detail = "gaussian " + fmt(g1) + ", " + fmt(g2) + "; uniform " + fmt(u1) + ", " + fmt(u2) +
               "; MC " + fmt(mc1) + ", " + fmt(mc2);
  return o;
}

Outcome estimator_consistency() {
  Outcome o;
  const BilinearAB m{2, 3};
  const auto inputs = default_inputs(m, InputCase::Gaussian);
  const std::size_t n = 100000;
  std::vector<double> values;
  double mean_se = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto s = simulate(m, inputs, SubsetU{1}, n, seed, 4);
    const IndexEstimate est = estimate_index(s);
    values.push_back(est.value);
    mean_se += std::sqrt(plug_in_sigma2(s, est).sigma2_hat / static_cast<double>(n)) / 10.0;
    o.require(std::abs(est.value - 5.0 / 17.0) < 0.01, "seed " + std::to_string(seed) + " " + fmt(est.value));
  }
  double mu = 0.0, ss = 0.0;
  for (double v : values) mu += v / 10.0;
  for (double v : values) ss += (v - mu) * (v - mu);
  const double spread = std::sqrt(ss / 9.0);
  const double ratio = spread / mean_se;
  o.require(ratio >= 0.5 && ratio <= 2.0, "spread/se " + fmt(ratio));
  if (o.pass) o.detail = "spread " + fmt(spread) + " vs plug-in se " + fmt(mean_se);
  return o;
}

Outcome coverage() {
  Outcome o;
  const BilinearAB m{2, 3};
  const std::uint64_t seed = 20130101;
  std::string d;
  for (int u = 1; u <= 2; ++u) {
    const auto g = coverage_experiment(m, InputCase::Gaussian, SubsetU{u}, 2000, 100, 0.95, seed, 4);
    o.require(g.coverage >= 0.88 && g.coverage <= 1.0, "gaussian S" + std::to_string(u) + " " + fmt(g.coverage));
    const auto un = coverage_experiment(m, InputCase::Uniform01, SubsetU{u}, 2000, 100, 0.95, seed, 4);
    o.require(un.coverage >= 0.93, "uniform S" + std::to_string(u) + " " + fmt(un.coverage));
    d += "S" + std::to_string(u) + " gaussian " + fmt(g.coverage) + " uniform " + fmt(un.coverage) + "; ";
  }
  if (o.pass) o.detail = d;
  return o;
}

Outcome mass_spring() {
  Outcome o;
  const MassSpring model = MassSpring::default_grid();
  const auto inputs = default_inputs(model, InputCase::Native);
  const double target[4] = {0.0826, 0.0020, 0.2068, 0.0561};
  double est[4];
  for (int j = 0; j < 4; ++j) {
    est[j] = estimate_index(simulate(model, inputs, SubsetU{j + 1}, 2000, 20130101, 4)).value;
    o.require(std::abs(est[j] - target[j]) <= 0.05, "input " + std::to_string(j + 1) + " " + fmt(est[j]));
  }
  // order of inputs: m, c, k, l
  o.require(est[2] > est[0] && est[0] > est[3] && est[3] > est[1], "ranking k > m > l > c");
  if (o.pass)
    o.detail = "m " + fmt(est[0]) + ", c " + fmt(est[1]) + ", k " + fmt(est[2]) + ", l " + fmt(est[3]);
  return o;
}

Outcome group_average() {
  Outcome o;
  std::mt19937_64 gen(5);
  double worst = 0.0;
  for (int k = 1; k <= 4; ++k)
    for (int rep = 0; rep < 100; ++rep) {
      const Matrix a = gaussian(k, k, gen);
      const Matrix got = average_conjugation(a);
      const Matrix brute = oracle::dense_average_conjugation(a);
      const Matrix expected = a.trace() / k * Matrix::Identity(k, k);
      worst = std::max({worst, (got - expected).cwiseAbs().maxCoeff(),
                        (brute - expected).cwiseAbs().maxCoeff(), (got - brute).cwiseAbs().maxCoeff()});
    }
  o.require(worst < 1e-12, "max deviation " + fmt(worst));
  if (o.pass) o.detail = "max deviation " + fmt(worst) + " over 400 matrices";
  return o;
}

Outcome matricial_example() {
  Outcome o;
  double worst = 0.0;
  for (double b : {-3.0, 0.0, 0.5, 3.0, 7.0}) {
    for (int u = 1; u <= 2; ++u) {
      const PopulationMoments pm = bilinear_gaussian_moments(1.0, b, SubsetU{u});
      worst = std::max(worst, (t_star(pm.cu, pm.sigma).matrix - 0.25 * Matrix::Identity(2, 2)).norm());
    }
  }
  o.require(worst < 1e-12, "a=1 deviation " + fmt(worst));
  const double a = 2, b = 3;
  const double printed = ((b - a) * (b - a) + (a - 1) * (a - 1)) / (4 * ((b - a) * (b - a) + (a - 1) * (b - 1)));
  const PopulationMoments pm = bilinear_gaussian_moments(a, b, SubsetU{1});
  const double got = t_star(pm.cu, pm.sigma).scalar;
  o.require(std::abs(got - printed) < 1e-12, "T1 scalar " + fmt(got) + " vs " + fmt(printed));
  if (o.pass) o.detail = "T1 scalar at (2,3) = " + fmt(got);
  return o;
}

Outcome invariance() {
  Outcome o;
  std::mt19937_64 gen(7);
  const Matrix y = gaussian(1000, 4, gen);
  const Matrix yu = 0.5 * y + gaussian(1000, 4, gen);
  const double base = estimate_index({y, yu, SubsetU{1}, "inv"}).value;
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const Matrix q = orthogonal(4, gen);
    const double lambda = std::exp(gaussian(1, 1, gen)(0, 0) * 3.0);
    const double rot = estimate_index({y * q.transpose(), yu * q.transpose(), SubsetU{1}, "inv"}).value;
    const double sc = estimate_index({lambda * y, lambda * yu, SubsetU{1}, "inv"}).value;
    worst = std::max({worst, std::abs(rot - base) / std::abs(base), std::abs(sc - base) / std::abs(base)});
  }
  o.require(worst < 1e-10, "relative deviation " + fmt(worst));

  const AnisoLinear id{1.0};
  const auto s = simulate(id, default_inputs(id, InputCase::Gaussian), SubsetU{1}, 100000, 11, 4);
  const double l1 = 1.0, l2 = 3.0;
  Matrix M = Matrix::Zero(2, 2);
  M.diagonal() << l1, l2;
  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  const double before = estimate_m_index(s, M);
  const double after = estimate_m_index({s.y * swap, s.yu * swap, SubsetU{1}, "swap"}, M);
  o.require(std::abs(before - l1 / (l1 + l2)) < 0.01, "M-index " + fmt(before));
  o.require(std::abs(after - l2 / (l1 + l2)) < 0.01, "swapped M-index " + fmt(after));
  if (o.pass)
    o.detail = "max rel. deviation " + fmt(worst) + "; M-index " + fmt(before) + " -> " + fmt(after);
  return o;
}

Outcome functional_equivalence() {
  Outcome o;
  std::mt19937_64 gen(9);
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::Index k = 1 + rep % 7;
    const Matrix y = gaussian(300, k, gen) + Matrix::Constant(300, k, 0.3 * rep);
    const Matrix yu = 0.6 * y + gaussian(300, k, gen);
    const double vec = estimate_index({y, yu, SubsetU{1}, "vec"}).value;
    const double fun = estimate_functional_index({y, yu, "canonical", SubsetU{1}}, k);
    worst = std::max(worst, std::abs(vec - fun));
  }
  o.require(worst < 1e-12, "vector/functional gap " + fmt(worst));

  const Eigen::Index M = 40;
  Vector e(M), sd(M);
  for (Eigen::Index l = 0; l < M; ++l) {
    e[l] = std::pow(static_cast<double>(l + 1), -1.0);
    sd[l] = std::pow(static_cast<double>(l + 1), -1.3);
  }
  Matrix t = gaussian(500, M, gen);
  for (Eigen::Index l = 0; l < M; ++l) t.col(l) = (t.col(l) * sd[l]).array() + e[l];
  const Vector v = sd.array().square() + e.array().square();
  const DDecomposition d = d_decomposition(t, {e, v, std::nullopt}, 20);
  o.require(std::abs(d.residual) < 1e-10, "identity residual " + fmt(d.residual));
  if (o.pass) o.detail = "gap " + fmt(worst) + ", residual " + fmt(d.residual);
  return o;
}

Outcome planner() {
  Outcome o;
  int plans = 0;
  for (double t : {0.02, 0.05, 0.1, 0.2, 0.5})
    for (double V : {0.002, 0.05, 0.3, 1.0}) {
      const SampleSizePlan p = min_sample_size(t, 0.05, V);
      const double prev = worst_case_two_sided(t, p.n_star - 1, V);
      o.require(p.bound_at_n_star <= 0.05 && prev > 0.05,
                "minimality at t=" + fmt(t) + " V=" + fmt(V));
      ++plans;
    }
  const double ts[10] = {0.01, 0.02, 0.05, 0.1, 0.15, 0.2, 0.3, 0.5, 0.7, 0.95};
  const std::int64_t ns[10] = {2, 5, 10, 100, 1000, 10000, 100000, 1000000, 10000000, 100000000};
  const double vs[5] = {0.001, 0.01, 0.1, 0.5, 1.0};
  int violations = 0;
  for (int a = 0; a < 10; ++a)
    for (int b = 0; b < 10; ++b)
      for (int c = 0; c < 5; ++c) {
        const DeviationBounds w = worst_case_bounds(ts[a], ns[b], vs[c]);
        // (0, 1] holds exactly on the log scale; the double may underflow.
        if (!(std::isfinite(w.log_upper) && w.log_upper <= 0.0 && w.upper <= 1.0)) ++violations;
        if (w.log_upper > -700.0 && !(w.upper > 0.0)) ++violations;
        if (w.lower && !(std::isfinite(*w.log_lower) && *w.log_lower <= 0.0 && *w.lower <= 1.0)) ++violations;
        if (a > 0 && w.log_upper > worst_case_bounds(ts[a - 1], ns[b], vs[c]).log_upper) ++violations;
        if (b > 0 && w.log_upper > worst_case_bounds(ts[a], ns[b - 1], vs[c]).log_upper) ++violations;
        if (c > 0 && w.log_upper > worst_case_bounds(ts[a], ns[b], vs[c - 1]).log_upper) ++violations;
      }
  o.require(violations == 0, std::to_string(violations) + " grid violations");
  if (o.pass) o.detail = std::to_string(plans) + " plans minimal; 500-point grid monotone and in (0,1]";
  return o;
}

std::string run_cli(const std::vector<std::string>& args, int& code) {
  std::ostringstream out, err;
  code = cli::run(args, out, err);
  const std::string text = out.str();
  try {
    json j = json::parse(text);
    j.erase("timestamp");
    return j.dump();
  } catch (const json::exception&) {
    return text;  // CSV output carries no timestamp
  }
}

Outcome determinism() {
  Outcome o;
  const std::vector<std::vector<std::string>> commands = {
      {"estimate", "--model", "bilinear", "--case", "gaussian", "--n", "3000", "--closure", "--u", "1", "--u", "2", "--bootstrap", "100"},
      {"coverage", "--model", "bilinear", "--case", "uniform", "--n", "500", "--reps", "30"},
      {"min-n", "--model", "bilinear", "--case", "uniform", "--n", "5000", "--t-list", "0.1,0.2", "--format", "csv"},
      {"componentwise", "--model", "mass_spring", "--n", "300", "--u", "m", "--u", "k"},
      {"functional", "--model", "mass_spring", "--n", "300", "--u", "k", "--bootstrap", "50"},
      {"matricial", "--model", "bilinear", "--case", "gaussian", "--n", "2000"},
      {"sample", "--model", "polar", "--n", "200", "--u", "1"},
  };
  for (const auto& base : commands) {
    std::vector<std::string> w1 = base, w8 = base;
    for (auto* v : {&w1, &w8}) v->insert(v->end(), {"--seed", "31337"});
    w1.insert(w1.end(), {"--workers", "1"});
    w8.insert(w8.end(), {"--workers", "8"});
    int c1 = 0, c2 = 0, c3 = 0;
    const std::string a = run_cli(w1, c1), b = run_cli(w1, c2), c = run_cli(w8, c3);
    o.require(c1 == 0 && c2 == 0 && c3 == 0, base.front() + " exit code");
    o.require(a == b, base.front() + " repeat differs");
    o.require(a == c, base.front() + " workers 1 vs 8 differ");
  }
  if (o.pass) o.detail = std::to_string(commands.size()) + " commands identical across repeats and workers";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"closed-form true values", closed_form_true_values},
      {"estimator consistency", estimator_consistency},
      {"coverage", coverage},
      {"mass-spring indices", mass_spring},
      {"group averaging", group_average},
      {"matricial example", matricial_example},
      {"invariance suite", invariance},
      {"functional equivalence", functional_equivalence},
      {"concentration planner", planner},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %2zu %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), secs, o.detail.c_str());
    if (!o.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
