#include "cli_app.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gsobol/asymptotics.hpp"
#include "gsobol/concentration.hpp"
#include "gsobol/csv_io.hpp"
#include "gsobol/errors.hpp"
#include "gsobol/estimators.hpp"
#include "gsobol/functional.hpp"
#include "gsobol/matricial.hpp"
#include "gsobol/models.hpp"

namespace gsobol::cli {

namespace {

using nlohmann::json;

// Command line flags; each one that is set overrides the config file key of
// the same meaning.
struct Flags {
  std::string config;
  std::string model;
  double a = 0.0, b = 0.0;
  std::string command;
  int k = 0;
  std::string input_case;
  std::vector<std::string> subsets;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double level = 0.0;
  std::size_t reps = 0;
  std::string out;
  std::string format;
  double rho = 0.0;
  double theta = 0.0;
  double delta = 0.0;
  double t = 0.0;
  double alpha = 0.0;
  double V = 0.0;
  std::string t_list;
  unsigned workers = 1;
  long m = 0;
  std::string basis;
  std::string sample;
  std::size_t bootstrap = 0;
  bool closure = false;
  std::string inputs_out;
};

struct Bound {
  std::vector<std::pair<CLI::Option*, std::function<void(json&)>>> setters;

  template <class T>
  void add(CLI::App* app, const std::string& name, T& target, const std::string& help,
           std::function<void(json&, const T&)> apply) {
    CLI::Option* opt = app->add_option(name, target, help);
    setters.emplace_back(opt, [&target, apply](json& cfg) { apply(cfg, target); });
  }
};

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

template <class T>
T get_or(const json& cfg, const char* key, T fallback) {
  if (!cfg.contains(key) || cfg.at(key).is_null()) return fallback;
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, std::string("config key '") + key + "': " + e.what());
  }
}

std::optional<double> get_opt(const json& cfg, const char* key) {
  if (!cfg.contains(key) || cfg.at(key).is_null()) return std::nullopt;
  return get_or<double>(cfg, key, 0.0);
}

Distribution distribution_from_json(const json& j) {
  const auto dist = get_or<std::string>(j, "dist", "");
  if (dist == "gaussian") return StandardGaussian{};
  if (dist == "uniform") return Uniform{get_or(j, "lo", 0.0), get_or(j, "hi", 1.0)};
  fail(ErrorKind::Config, "unknown input distribution '" + dist + "'");
}

ModelSpec model_from_json(const json& cfg) {
  if (!cfg.contains("model")) fail(ErrorKind::Config, "no model given (--model or config 'model')");
  const json& m = cfg.at("model");
  const auto name = get_or<std::string>(m, "name", "");
  if (name == "aniso_linear") return AnisoLinear{get_or(m, "a", 1.0)};
  if (name == "bilinear") return BilinearAB{get_or(m, "a", 2.0), get_or(m, "b", 3.0)};
  if (name == "polar") return Polar{};
  if (name == "mass_spring") {
    MassSpring ms = MassSpring::default_grid();
    if (m.contains("t_grid")) ms.t_grid = m.at("t_grid").get<std::vector<double>>();
    return ms;
  }
  if (name == "external") {
    External ext;
    ext.command = get_or<std::string>(m, "command", "");
    ext.k = get_or(m, "k", 0);
    if (ext.command.empty()) fail(ErrorKind::Config, "external model needs a command");
    if (ext.k < 1) fail(ErrorKind::Config, "external model needs k >= 1");
    if (m.contains("inputs")) ext.p = static_cast<int>(m.at("inputs").size());
    return ext;
  }
  fail(ErrorKind::Config, "unknown model '" + name + "'");
}

InputSpec inputs_from_json(const json& cfg, const ModelSpec& model, InputCase c) {
  const json& m = cfg.at("model");
  if (m.contains("inputs")) {
    std::vector<Distribution> dists;
    for (const auto& d : m.at("inputs")) dists.push_back(distribution_from_json(d));
    return InputSpec(std::move(dists));
  }
  return default_inputs(model, c);
}

SubsetU parse_subset(const std::string& text, const std::vector<std::string>& names) {
  std::vector<int> indices;
  std::stringstream in(text);
  std::string token;
  while (std::getline(in, token, ',')) {
    if (token.empty()) continue;
    bool named = false;
    for (std::size_t j = 0; j < names.size(); ++j) {
      if (names[j] == token) {
        indices.push_back(static_cast<int>(j + 1));
        named = true;
      }
    }
    if (!named) {
      const SubsetU one = SubsetU::parse(token);
      indices.insert(indices.end(), one.indices().begin(), one.indices().end());
    }
  }
  return SubsetU(std::move(indices));
}

std::vector<SubsetU> subsets_from_json(const json& cfg, const ModelSpec& model, std::size_t p) {
  const auto names = input_names(model);
  std::vector<SubsetU> out;
  if (cfg.contains("subsets")) {
    for (const auto& s : cfg.at("subsets")) {
      if (s.is_array()) {
        out.emplace_back(s.get<std::vector<int>>());
      } else if (s.is_number_integer()) {
        out.push_back(SubsetU{s.get<int>()});
      } else {
        out.push_back(parse_subset(s.get<std::string>(), names));
      }
    }
  } else {
    for (std::size_t j = 0; j < p; ++j) out.push_back(SubsetU{static_cast<int>(j + 1)});
  }
  for (const auto& u : out) u.validate(p);
  return out;
}

std::string subset_label(const SubsetU& u, const std::vector<std::string>& names) {
  std::string label;
  for (int i : u.indices()) {
    if (!label.empty()) label += '+';
    label += static_cast<std::size_t>(i) <= names.size() ? names[static_cast<std::size_t>(i - 1)]
                                                          : std::to_string(i);
  }
  return label.empty() ? "none" : label;
}

std::optional<double> known_truth(const ModelSpec& model, InputCase c, const SubsetU& u) {
  try {
    return true_index(model, c, u);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Unsupported) throw;
  }
  return std::nullopt;
}

// Sup of |Y|_2 where it is available in closed form.
std::optional<double> analytic_rho(const ModelSpec& model, InputCase c) {
  if (const auto* m = std::get_if<BilinearAB>(&model); m && c == InputCase::Uniform01) {
    if (m->a >= 0.0 && m->b >= 0.0) {
      const double f2 = m->a + m->b + 1.0;
      return std::sqrt(9.0 + f2 * f2);  // both components increase, max at (1, 1)
    }
  }
  if (std::holds_alternative<Polar>(model) && c == InputCase::Native) return 10.0;
  return std::nullopt;
}

struct Context {
  json cfg;
  unsigned workers = 1;
  std::ostream* out = nullptr;
};

struct Common {
  ModelSpec model;
  InputCase input_case = InputCase::Native;
  InputSpec inputs;
  std::vector<SubsetU> subsets;
  std::vector<std::string> names;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double level = 0.95;
};

Common resolve_common(const json& cfg, std::size_t default_n) {
  ModelSpec model = model_from_json(cfg);
  const InputCase c = parse_input_case(get_or<std::string>(cfg, "case", "native"));
  InputSpec inputs = inputs_from_json(cfg, model, c);
  const std::size_t p = inputs.dimension();
  Common common{model, c, inputs, subsets_from_json(cfg, model, p), input_names(model),
                get_or<std::size_t>(cfg, "n", default_n),
                get_or<std::uint64_t>(cfg, "seed", 20130101),
                get_or(cfg, "level", 0.95)};
  if (common.names.size() != p) common.names = numbered("x", static_cast<Eigen::Index>(p));
  if (common.n < 2) fail(ErrorKind::Config, "N must be at least 2");
  return common;
}

json header(const std::string& command, const Common& c) {
  return {{"command", command},
          {"model", model_name(c.model)},
          {"case", to_string(c.input_case)},
          {"N", c.n},
          {"seed", c.seed},
          {"timestamp", timestamp()}};
}

void emit_json(Context& ctx, const json& report) { *ctx.out << report.dump(2) << '\n'; }

int cmd_estimate(Context& ctx) {
  const json& cfg = ctx.cfg;
  if (cfg.contains("sample")) {
    std::ifstream in(cfg.at("sample").get<std::string>());
    if (!in) fail(ErrorKind::Config, "cannot open sample CSV");
    // The CSV carries no subset; --u only labels the result.
    SubsetU u;
    if (cfg.contains("subsets") && !cfg.at("subsets").empty()) {
      const json& first = cfg.at("subsets").front();
      if (first.is_array())
        u = SubsetU(first.get<std::vector<int>>());
      else if (first.is_number_integer())
        u = SubsetU{first.get<int>()};
      else
        u = SubsetU::parse(first.get<std::string>());
    }
    const PickFreezeSample s = read_sample_csv(in, u, "csv");
    const double level = get_or(cfg, "level", 0.95);
    const IndexEstimate est = estimate_index(s);
    const ConfidenceInterval ci = confidence_interval(s, level);
    json r = to_json(est);
    r["estimate"] = est.value;
    r["ci_lo"] = ci.lo;
    r["ci_hi"] = ci.hi;
    r["sigma2_hat"] = ci.sigma2_hat;
    emit_json(ctx, {{"command", "estimate"}, {"source", "csv"}, {"level", level},
                    {"timestamp", timestamp()}, {"results", json::array({r})}});
    return 0;
  }

  const Common c = resolve_common(cfg, 2000);
  json report = header("estimate", c);
  report["level"] = c.level;
  report["results"] = json::array();
  std::vector<PickFreezeSample> samples;
  for (const auto& u : c.subsets) {
    PickFreezeSample s = simulate(c.model, c.inputs, u, c.n, c.seed, ctx.workers);
    const IndexEstimate est = estimate_index(s);
    const CltDiagnostics diag = plug_in_sigma2(s, est);
    const ConfidenceInterval ci = confidence_interval(s, c.level);
    json r = {{"u", subset_json(u)},
              {"label", subset_label(u, c.names)},
              {"estimate", est.value},
              {"ci_lo", ci.lo},
              {"ci_hi", ci.hi},
              {"sigma2_hat", diag.sigma2_hat},
              {"n", est.n},
              {"trace_cu", est.trace_cu},
              {"trace_sigma", est.trace_sigma}};
    if (const auto truth = known_truth(c.model, c.input_case, u)) r["true_value"] = *truth;
    report["results"].push_back(r);
    samples.push_back(std::move(s));
  }

  if (get_or(cfg, "closure", false)) {
    if (c.subsets.size() != 2)
      fail(ErrorKind::Config, "--closure needs exactly two subsets u and v");
    const SubsetU uv = c.subsets[0].united(c.subsets[1]);
    const PickFreezeSample s_uv = simulate(c.model, c.inputs, uv, c.n, c.seed, ctx.workers);
    const BootstrapInterval boot = bootstrap_closure_interval(
        samples[0], samples[1], s_uv, c.level, get_or<std::size_t>(cfg, "bootstrap", 500),
        c.seed);
    report["closure"] = {{"u", subset_json(c.subsets[0])},
                         {"v", subset_json(c.subsets[1])},
                         {"estimate", boot.point},
                         {"bootstrap_lo", boot.lo},
                         {"bootstrap_hi", boot.hi},
                         {"bootstrap_resamples", boot.resamples}};
  }
  emit_json(ctx, report);
  return 0;
}

int cmd_coverage(Context& ctx) {
  const Common c = resolve_common(ctx.cfg, 2000);
  const auto reps = get_or<std::size_t>(ctx.cfg, "reps", 100);
  if (reps == 0) fail(ErrorKind::Config, "reps must be at least 1");
  json report = header("coverage", c);
  report["level"] = c.level;
  report["reps"] = reps;
  report["results"] = json::array();
  for (const auto& u : c.subsets) {
    const CoverageReport cov =
        coverage_experiment(c.model, c.input_case, u, c.n, reps, c.level, c.seed, ctx.workers);
    json r = to_json(cov);
    r["label"] = subset_label(u, c.names);
    report["results"].push_back(r);
  }
  emit_json(ctx, report);
  return 0;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      fail(ErrorKind::Config, "cannot parse number '" + item + "'");
    }
  }
  return out;
}

int cmd_min_n(Context& ctx) {
  const json& cfg = ctx.cfg;
  const double alpha = get_or(cfg, "alpha", 0.05);
  json report = {{"command", "min_n"}, {"alpha", alpha}, {"timestamp", timestamp()}};

  double V = 0.0;
  if (const auto given = get_opt(cfg, "V")) {
    V = *given;
    report["V_source"] = "given";
  } else {
    const Common c = resolve_common(cfg, 100000);
    std::optional<double> rho = get_opt(cfg, "rho");
    if (!rho) rho = analytic_rho(c.model, c.input_case);
    if (!rho) fail(ErrorKind::Config, "estimating V needs --rho for this model");
    const SubsetU u = c.subsets.empty() ? SubsetU{1} : c.subsets.front();
    const PickFreezeSample s = simulate(c.model, c.inputs, u, c.n, c.seed, ctx.workers);
    const BoundInputs bi = estimate_v(s, *rho);
    V = bi.V;
    report["V_source"] = "estimated";
    report["model"] = model_name(c.model);
    report["case"] = to_string(c.input_case);
    report["N_for_V"] = c.n;
    report["seed"] = c.seed;
    report["rho"] = *rho;
    report["v_sum"] = bi.v_sum();
  }
  report["V"] = V;

  std::vector<double> ts;
  if (cfg.contains("t_list"))
    ts = parse_list(cfg.at("t_list").get<std::string>());
  else
    ts.push_back(get_or(cfg, "t", 0.1));

  const std::string format = get_or<std::string>(cfg, "format", "json");
  if (format == "csv") {
    *ctx.out << "t,N_star,bound_at_N_star\n";
    for (double t : ts) {
      const SampleSizePlan plan = min_sample_size(t, alpha, V);
      *ctx.out << std::setprecision(17) << t << ',' << plan.n_star << ','
               << plan.bound_at_n_star << '\n';
    }
    return 0;
  }
  if (ts.size() == 1) {
    const SampleSizePlan plan = min_sample_size(ts.front(), alpha, V);
    report["t"] = plan.t;
    report["N_star"] = plan.n_star;
    report["bound_at_N_star"] = plan.bound_at_n_star;
  } else {
    report["sweep"] = json::array();
    for (double t : ts) report["sweep"].push_back(to_json(min_sample_size(t, alpha, V)));
  }
  emit_json(ctx, report);
  return 0;
}

int cmd_componentwise(Context& ctx) {
  const Common c = resolve_common(ctx.cfg, 2000);
  const auto k = static_cast<Eigen::Index>(output_dim(c.model));
  const double z = c.level == 0.0 ? 0.0 : normal_quantile(0.5 * (1.0 + c.level));

  std::vector<std::string> cols;
  const auto* ms = std::get_if<MassSpring>(&c.model);
  cols.push_back(ms ? "t" : "component");
  Matrix table(k, 1 + 3 * static_cast<Eigen::Index>(c.subsets.size()) + 2);
  for (Eigen::Index l = 0; l < k; ++l)
    table(l, 0) = ms ? ms->t_grid[static_cast<std::size_t>(l)] : static_cast<double>(l + 1);
  Vector sum = Vector::Zero(k), half_sum = Vector::Zero(k);

  for (std::size_t s_idx = 0; s_idx < c.subsets.size(); ++s_idx) {
    const SubsetU& u = c.subsets[s_idx];
    const std::string label = subset_label(u, c.names);
    cols.push_back("S_" + label);
    cols.push_back("lo_" + label);
    cols.push_back("hi_" + label);
    const PickFreezeSample s = simulate(c.model, c.inputs, u, c.n, c.seed, ctx.workers);
    const auto values = estimate_componentwise(s);
    const auto base = static_cast<Eigen::Index>(1 + 3 * s_idx);
    for (Eigen::Index l = 0; l < k; ++l) {
      const double v = values[static_cast<std::size_t>(l)];
      double half = std::numeric_limits<double>::quiet_NaN();
      if (!std::isnan(v)) {
        const PickFreezeSample one = column(s, l);
        const IndexEstimate est = estimate_index(one);
        half = z * std::sqrt(plug_in_sigma2(one, est).sigma2_hat / static_cast<double>(c.n));
      }
      table(l, base) = v;
      table(l, base + 1) = v - half;
      table(l, base + 2) = v + half;
      sum[l] += v;
      half_sum[l] += half;
    }
  }
  cols.push_back("sum_first_order");
  cols.push_back("sum_ci_halfwidth");
  table.col(table.cols() - 2) = sum;
  table.col(table.cols() - 1) = half_sum;

  const std::string format = get_or<std::string>(ctx.cfg, "format", "csv");
  if (format == "json") {
    json report = header("componentwise", c);
    report["level"] = c.level;
    report["columns"] = cols;
    report["rows"] = json::array();
    for (Eigen::Index l = 0; l < k; ++l) {
      json row = json::array();
      for (Eigen::Index j = 0; j < table.cols(); ++j) row.push_back(table(l, j));
      report["rows"].push_back(row);
    }
    emit_json(ctx, report);
  } else {
    write_csv(*ctx.out, cols, table);
  }
  return 0;
}

int cmd_functional(Context& ctx) {
  const json& cfg = ctx.cfg;
  const Common c = resolve_common(cfg, 2000);
  const auto G = static_cast<Eigen::Index>(output_dim(c.model));

  GridBasis basis;
  std::string basis_id = "canonical";
  if (cfg.contains("basis")) {
    std::ifstream in(cfg.at("basis").get<std::string>());
    if (!in) fail(ErrorKind::Config, "cannot open basis CSV");
    basis = read_basis_csv(in);
    basis_id = cfg.at("basis").get<std::string>();
    if (basis.weights.size() != G)
      fail(ErrorKind::Config, "basis grid has " + std::to_string(basis.weights.size()) +
                                  " points, model output has " + std::to_string(G));
  } else {
    basis.weights = Vector::Ones(G);
    basis.basis = Matrix::Identity(G, G);
  }

  TruncationSchedule sched;
  sched.theta = get_or(cfg, "theta", sched.theta);
  sched.delta = get_or(cfg, "delta", sched.delta);
  Eigen::Index m = get_or<long>(cfg, "m", 0);
  const bool scheduled = m == 0;
  if (scheduled) m = std::min<Eigen::Index>(m_schedule(c.n, sched), basis.basis.cols());

  json report = header("functional", c);
  report["basis"] = basis_id;
  report["m"] = m;
  report["m_max"] = basis.basis.cols();
  report["m_source"] = scheduled ? "schedule" : "given";
  if (scheduled) report["schedule"] = {{"theta", sched.theta}, {"delta", sched.delta}};
  report["level"] = c.level;
  report["results"] = json::array();
  for (const auto& u : c.subsets) {
    const PickFreezeSample s = simulate(c.model, c.inputs, u, c.n, c.seed, ctx.workers);
    FunctionalSample fs;
    fs.coeff_y = project_grid(s.y, basis.weights, basis.basis);
    fs.coeff_yu = project_grid(s.yu, basis.weights, basis.basis);
    fs.basis_id = basis_id;
    fs.u = u;
    const PolarTraces traces = trace_polar(fs, m);
    const FunctionalBootstrap boot = bootstrap_functional_interval(
        fs, m, c.level, get_or<std::size_t>(cfg, "bootstrap", 500), c.seed);
    report["results"].push_back({{"u", subset_json(u)},
                                 {"label", subset_label(u, c.names)},
                                 {"estimate", boot.point},
                                 {"trace_gamma", traces.trace_gamma},
                                 {"trace_gamma_u", traces.trace_gamma_u},
                                 {"bootstrap_lo", boot.lo},
                                 {"bootstrap_hi", boot.hi}});
  }
  emit_json(ctx, report);
  return 0;
}

int cmd_matricial(Context& ctx) {
  const json& cfg = ctx.cfg;
  const Common c = resolve_common(cfg, 10000);
  const auto* bil = std::get_if<BilinearAB>(&c.model);
  json report = header("matricial", c);
  report["results"] = json::array();
  for (const auto& u : c.subsets) {
    json r = {{"u", subset_json(u)}, {"label", subset_label(u, c.names)}};
    if (bil && c.input_case != InputCase::Uniform01) {
      const PopulationMoments pm = bilinear_gaussian_moments(bil->a, bil->b, u);
      r["population_t_scalar"] = t_star(pm.cu, pm.sigma).scalar;
    }
    const PickFreezeSample s = simulate(c.model, c.inputs, u, c.n, c.seed, ctx.workers);
    r["sample_t_scalar"] = t_star_from_sample(s).scalar;
    r["sample_t_experimental"] = true;
    r["generalized_index"] = estimate_index(s).value;
    report["results"].push_back(r);
  }
  emit_json(ctx, report);
  return 0;
}

int cmd_sample(Context& ctx) {
  const Common c = resolve_common(ctx.cfg, 1000);
  if (c.subsets.size() != 1) fail(ErrorKind::Config, "sample exports exactly one subset");
  const SubsetU& u = c.subsets.front();
  if (ctx.cfg.contains("inputs_out")) {
    const PickFreezeDesign design = pick_freeze_design(c.inputs, u, DesignConfig{c.n, c.seed});
    const std::string base = ctx.cfg.at("inputs_out").get<std::string>();
    std::ofstream x(base + ".x.csv"), xp(base + ".xprime.csv");
    if (!x || !xp) fail(ErrorKind::Config, "cannot write input CSV files");
    write_inputs_csv(x, design.x);
    write_inputs_csv(xp, design.x_prime);
  }
  write_sample_csv(*ctx.out, simulate(c.model, c.inputs, u, c.n, c.seed, ctx.workers));
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generalized Sobol indices by pick-freeze sampling", "gsobol"};
  app.require_subcommand(1);
  Flags f;
  Bound bound;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config, "JSON run configuration; flags override it");
    bound.add<std::string>(sub, "--model", f.model, "aniso_linear|bilinear|polar|mass_spring|external",
                           [](json& c, const std::string& v) { c["model"]["name"] = v; });
    bound.add<double>(sub, "--a", f.a, "model parameter a",
                      [](json& c, const double& v) { c["model"]["a"] = v; });
    bound.add<double>(sub, "--b", f.b, "model parameter b",
                      [](json& c, const double& v) { c["model"]["b"] = v; });
    bound.add<std::string>(sub, "--command", f.command, "external simulator command",
                           [](json& c, const std::string& v) { c["model"]["command"] = v; });
    bound.add<int>(sub, "--k", f.k, "external simulator output dimension",
                   [](json& c, const int& v) { c["model"]["k"] = v; });
    bound.add<std::string>(sub, "--case", f.input_case, "gaussian|uniform|native",
                           [](json& c, const std::string& v) { c["case"] = v; });
    bound.add<std::vector<std::string>>(
        sub, "--u", f.subsets, "subset, e.g. 1 or 1,2 or k (repeatable)",
        [](json& c, const std::vector<std::string>& v) { c["subsets"] = v; });
    bound.add<std::size_t>(sub, "--n", f.n, "replicates N",
                           [](json& c, const std::size_t& v) { c["n"] = v; });
    bound.add<std::uint64_t>(sub, "--seed", f.seed, "random seed",
                             [](json& c, const std::uint64_t& v) { c["seed"] = v; });
    bound.add<double>(sub, "--level", f.level, "confidence level",
                      [](json& c, const double& v) { c["level"] = v; });
    bound.add<std::string>(sub, "--out", f.out, "output file (default stdout)",
                           [](json& c, const std::string& v) { c["out"] = v; });
    bound.add<std::string>(sub, "--format", f.format, "json|csv",
                           [](json& c, const std::string& v) { c["format"] = v; });
    bound.add<double>(sub, "--rho", f.rho, "almost-sure bound on |Y|_2",
                      [](json& c, const double& v) { c["rho"] = v; });
    bound.add<double>(sub, "--theta", f.theta, "truncation exponent",
                      [](json& c, const double& v) { c["theta"] = v; });
    bound.add<double>(sub, "--delta", f.delta, "assumed coefficient decay exponent",
                      [](json& c, const double& v) { c["delta"] = v; });
    bound.add<unsigned>(sub, "--workers", f.workers, "worker threads",
                        [](json& c, const unsigned& v) { c["workers"] = v; });
  };

  CLI::App* estimate = app.add_subcommand("estimate", "point estimates and asymptotic CIs");
  add_common(estimate);
  bound.add<std::string>(estimate, "--sample", f.sample, "estimate from a y/yu sample CSV",
                         [](json& c, const std::string& v) { c["sample"] = v; });
  estimate->add_flag("--closure", f.closure, "also estimate S_{u+v} - S_u - S_v");
  bound.add<std::size_t>(estimate, "--bootstrap", f.bootstrap, "bootstrap resamples",
                         [](json& c, const std::size_t& v) { c["bootstrap"] = v; });

  CLI::App* coverage = app.add_subcommand("coverage", "coverage of the asymptotic CIs");
  add_common(coverage);
  bound.add<std::size_t>(coverage, "--reps", f.reps, "repetitions",
                         [](json& c, const std::size_t& v) { c["reps"] = v; });

  CLI::App* min_n = app.add_subcommand("min-n", "smallest N from the concentration bounds");
  add_common(min_n);
  bound.add<double>(min_n, "--t", f.t, "deviation t",
                    [](json& c, const double& v) { c["t"] = v; });
  bound.add<double>(min_n, "--alpha", f.alpha, "target probability",
                    [](json& c, const double& v) { c["alpha"] = v; });
  bound.add<double>(min_n, "--V", f.V, "V = (sum v_l)^2; estimated from the model if absent",
                    [](json& c, const double& v) { c["V"] = v; });
  bound.add<std::string>(min_n, "--t-list", f.t_list, "comma separated sweep over t",
                         [](json& c, const std::string& v) { c["t_list"] = v; });

  CLI::App* componentwise =
      app.add_subcommand("componentwise", "scalar indices of every output component");
  add_common(componentwise);

  CLI::App* functional = app.add_subcommand("functional", "truncated functional index");
  add_common(functional);
  bound.add<long>(functional, "--m", f.m, "truncation level (default: schedule)",
                  [](json& c, const long& v) { c["m"] = v; });
  bound.add<std::string>(functional, "--basis", f.basis, "basis CSV: grid,weight,phi1..",
                         [](json& c, const std::string& v) { c["basis"] = v; });
  bound.add<std::size_t>(functional, "--bootstrap", f.bootstrap, "bootstrap resamples",
                         [](json& c, const std::size_t& v) { c["bootstrap"] = v; });

  CLI::App* matricial = app.add_subcommand("matricial", "trace-normalised matricial index");
  add_common(matricial);

  CLI::App* sample = app.add_subcommand("sample", "export a pick-freeze sample as CSV");
  add_common(sample);
  bound.add<std::string>(sample, "--inputs-out", f.inputs_out, "prefix for X / X' CSV files",
                         [](json& c, const std::string& v) { c["inputs_out"] = v; });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << json{{"error", "config"}, {"message", e.what()}}.dump() << '\n';
    return 2;
  }

  try {
    Context ctx;
    if (!f.config.empty()) {
      std::ifstream in(f.config);
      if (!in) fail(ErrorKind::Config, "cannot open config file " + f.config);
      try {
        ctx.cfg = json::parse(in, nullptr, true, true);
      } catch (const json::exception& e) {
        fail(ErrorKind::Config, std::string("config file: ") + e.what());
      }
    } else {
      ctx.cfg = json::object();
    }
    for (auto& [opt, apply] : bound.setters)
      if (opt->count() > 0) apply(ctx.cfg);
    if (f.closure) ctx.cfg["closure"] = true;
    ctx.workers = get_or<unsigned>(ctx.cfg, "workers", 1);

    std::ofstream file;
    ctx.out = &out;
    if (ctx.cfg.contains("out")) {
      file.open(ctx.cfg.at("out").get<std::string>());
      if (!file) fail(ErrorKind::Config, "cannot open output file");
      ctx.out = &file;
    }

    if (estimate->parsed()) return cmd_estimate(ctx);
    if (coverage->parsed()) return cmd_coverage(ctx);
    if (min_n->parsed()) return cmd_min_n(ctx);
    if (componentwise->parsed()) return cmd_componentwise(ctx);
    if (functional->parsed()) return cmd_functional(ctx);
    if (matricial->parsed()) return cmd_matricial(ctx);
    if (sample->parsed()) return cmd_sample(ctx);
    return 2;
  } catch (const Error& e) {
    err << json{{"error", std::string(to_string(e.kind()))}, {"message", e.what()}}.dump() << '\n';
    return exit_code(e.kind());
  } catch (const json::exception& e) {
    err << json{{"error", "config"}, {"message", e.what()}}.dump() << '\n';
    return 2;
  }
}

}  // namespace gsobol::cli
