#include "gsobol/models.hpp"

#include <cmath>
#include <cstdio>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <unistd.h>
#include <sys/wait.h>

#include "gsobol/errors.hpp"
#include "gsobol/parallel.hpp"

namespace gsobol {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

constexpr double kPi = std::numbers::pi;

void check_underdamped(const MassSpringParams& p) {
  if (!(p.mass > 0.0 && p.stiffness > 0.0 && p.damping >= 0.0))
    fail(ErrorKind::Domain, "mass-spring needs m > 0, k > 0, c >= 0");
  if (p.damping * p.damping >= 4.0 * p.stiffness * p.mass)
    fail(ErrorKind::Domain, "mass-spring parameters are not underdamped");
}

void evaluate_rows(const ModelSpec& model, const Matrix& x, Matrix& y,
                   Eigen::Index lo, Eigen::Index hi) {
  std::visit(
      Overloaded{
          [&](const AnisoLinear& m) {
            for (Eigen::Index i = lo; i < hi; ++i) {
              y(i, 0) = m.a * x(i, 0);
              y(i, 1) = x(i, 1);
            }
          },
          [&](const BilinearAB& m) {
            for (Eigen::Index i = lo; i < hi; ++i) {
              const double x1 = x(i, 0), x2 = x(i, 1);
              y(i, 0) = x1 + x1 * x2 + x2;
              y(i, 1) = m.a * x1 + m.b * x1 * x2 + x2;
            }
          },
          [&](const Polar&) {
            for (Eigen::Index i = lo; i < hi; ++i) {
              y(i, 0) = x(i, 0) * std::cos(x(i, 1));
              y(i, 1) = x(i, 0) * std::sin(x(i, 1));
            }
          },
          [&](const MassSpring& m) {
            for (Eigen::Index i = lo; i < hi; ++i) {
              const MassSpringParams p{x(i, 0), x(i, 1), x(i, 2), x(i, 3)};
              for (std::size_t g = 0; g < m.t_grid.size(); ++g)
                y(i, static_cast<Eigen::Index>(g)) =
                    mass_spring_displacement(p, m.t_grid[g]);
            }
          },
          [&](const External&) {},
      },
      model);
}

std::filesystem::path unique_temp_path() {
  static std::atomic<unsigned long> counter{0};
  auto name = "gsobol-ext-" + std::to_string(::getpid()) + "-" +
              std::to_string(counter.fetch_add(1)) + ".csv";
  return std::filesystem::temp_directory_path() / name;
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out += c;
  }
  return out + "'";
}

// One subprocess for rows [lo, hi).
void evaluate_external(const External& ext, const Matrix& x, Matrix& y,
                       Eigen::Index lo, Eigen::Index hi) {
  const auto request = unique_temp_path();
  {
    std::ofstream out(request);
    if (!out) fail(ErrorKind::Io, "cannot write external request file");
    char buf[32];
    for (Eigen::Index i = lo; i < hi; ++i) {
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", x(i, j));
        if (j) out << ',';
        out << buf;
      }
      out << '\n';
    }
  }
  const std::string cmd = ext.command + " < " + shell_quote(request.string());
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) {
    std::filesystem::remove(request);
    fail(ErrorKind::Io, "cannot start external model: " + ext.command);
  }
  std::string output;
  char chunk[4096];
  std::size_t got = 0;
  while ((got = std::fread(chunk, 1, sizeof chunk, pipe)) > 0) output.append(chunk, got);
  const int status = ::pclose(pipe);
  std::filesystem::remove(request);
  if (status != 0) {
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    fail(ErrorKind::Io, "external model exited with status " + std::to_string(code) +
                            " on rows " + std::to_string(lo) + ".." +
                            std::to_string(hi - 1));
  }

  std::istringstream lines(output);
  std::string line;
  Eigen::Index row = lo;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (row >= hi)
      fail(ErrorKind::Io, "external model returned more rows than requested");
    std::istringstream fields(line);
    std::string field;
    int col = 0;
    while (std::getline(fields, field, ',')) {
      if (col >= ext.k)
        fail(ErrorKind::Io, "external model row " + std::to_string(row) +
                                " has more than " + std::to_string(ext.k) + " values");
      char* end = nullptr;
      const double v = std::strtod(field.c_str(), &end);
      while (end && (*end == ' ' || *end == '\t')) ++end;
      if (end == field.c_str() || *end != '\0')
        fail(ErrorKind::Io, "malformed value '" + field + "' from external model at row " +
                                std::to_string(row));
      y(row, col++) = v;
    }
    if (col != ext.k)
      fail(ErrorKind::Io, "external model row " + std::to_string(row) + " has " +
                              std::to_string(col) + " values, expected " +
                              std::to_string(ext.k));
    ++row;
  }
  if (row != hi)
    fail(ErrorKind::Io, "external model returned " + std::to_string(row - lo) +
                            " rows, expected " + std::to_string(hi - lo) +
                            " (first missing row " + std::to_string(row) + ")");
}

bool is_full(const SubsetU& u, std::size_t p) { return u == SubsetU::full(p); }

}  // namespace

MassSpring MassSpring::default_grid() {
  MassSpring m;
  m.t_grid.resize(800);
  for (int i = 1; i <= 800; ++i) m.t_grid[i - 1] = 0.05 * i;
  return m;
}

std::string model_name(const ModelSpec& model) {
  return std::visit(Overloaded{
                        [](const AnisoLinear&) { return std::string("aniso_linear"); },
                        [](const BilinearAB&) { return std::string("bilinear"); },
                        [](const Polar&) { return std::string("polar"); },
                        [](const MassSpring&) { return std::string("mass_spring"); },
                        [](const External&) { return std::string("external"); },
                    },
                    model);
}

std::string to_string(InputCase c) {
  switch (c) {
    case InputCase::Gaussian: return "gaussian";
    case InputCase::Uniform01: return "uniform";
    case InputCase::Native: return "native";
  }
  return "native";
}

InputCase parse_input_case(const std::string& text) {
  if (text == "gaussian") return InputCase::Gaussian;
  if (text == "uniform" || text == "uniform01") return InputCase::Uniform01;
  if (text == "native" || text == "default") return InputCase::Native;
  fail(ErrorKind::Config, "unknown input case '" + text + "'");
}

std::size_t arity(const ModelSpec& model) {
  return std::visit(Overloaded{
                        [](const MassSpring&) -> std::size_t { return 4; },
                        [](const External& e) -> std::size_t {
                          return static_cast<std::size_t>(e.p);
                        },
                        [](const auto&) -> std::size_t { return 2; },
                    },
                    model);
}

std::size_t output_dim(const ModelSpec& model) {
  return std::visit(Overloaded{
                        [](const MassSpring& m) { return m.t_grid.size(); },
                        [](const External& e) { return static_cast<std::size_t>(e.k); },
                        [](const auto&) -> std::size_t { return 2; },
                    },
                    model);
}

std::vector<std::string> input_names(const ModelSpec& model) {
  if (std::holds_alternative<MassSpring>(model)) return {"m", "c", "k", "l"};
  std::vector<std::string> names;
  for (std::size_t j = 0; j < std::max<std::size_t>(arity(model), 1); ++j)
    names.push_back("x" + std::to_string(j + 1));
  return names;
}

InputSpec default_inputs(const ModelSpec& model, InputCase c) {
  if (std::holds_alternative<External>(model))
    fail(ErrorKind::Config, "external models need an explicit input spec");
  const std::size_t p = arity(model);
  switch (c) {
    case InputCase::Gaussian: return InputSpec::iid(p, StandardGaussian{});
    case InputCase::Uniform01: return InputSpec::iid(p, Uniform{0.0, 1.0});
    case InputCase::Native: break;
  }
  if (std::holds_alternative<Polar>(model))
    return InputSpec({Uniform{0.0, 10.0}, Uniform{0.0, kPi / 2.0}});
  if (std::holds_alternative<MassSpring>(model))
    return InputSpec({Uniform{10.0, 12.0}, Uniform{0.4, 0.8}, Uniform{70.0, 90.0},
                      Uniform{-1.0, -0.25}});
  return InputSpec::iid(p, StandardGaussian{});
}

Matrix evaluate(const ModelSpec& model, const Matrix& x, unsigned workers) {
  const std::size_t p = arity(model);
  if (p != 0 && static_cast<std::size_t>(x.cols()) != p)
    fail(ErrorKind::Domain, model_name(model) + " expects " + std::to_string(p) +
                                " inputs, got " + std::to_string(x.cols()));
  const auto n = x.rows();
  Matrix y(n, static_cast<Eigen::Index>(output_dim(model)));
  if (const auto* ext = std::get_if<External>(&model)) {
    if (ext->k < 1) fail(ErrorKind::Config, "external model needs k >= 1");
    parallel_for_chunks(static_cast<std::size_t>(n), workers,
                        [&](std::size_t lo, std::size_t hi) {
                          if (lo < hi)
                            evaluate_external(*ext, x, y, static_cast<Eigen::Index>(lo),
                                              static_cast<Eigen::Index>(hi));
                        });
    return y;
  }
  if (const auto* ms = std::get_if<MassSpring>(&model)) {
    for (std::size_t g = 1; g < ms->t_grid.size(); ++g)
      if (!(ms->t_grid[g] > ms->t_grid[g - 1]))
        fail(ErrorKind::Config, "mass-spring time grid must be strictly increasing");
  }
  parallel_for_chunks(static_cast<std::size_t>(n), workers,
                      [&](std::size_t lo, std::size_t hi) {
                        evaluate_rows(model, x, y, static_cast<Eigen::Index>(lo),
                                      static_cast<Eigen::Index>(hi));
                      });
  return y;
}

double mass_spring_displacement(const MassSpringParams& params, double t) {
  return mass_spring_state(params, t).position;
}

MassSpringState mass_spring_state(const MassSpringParams& p, double t) {
  check_underdamped(p);
  const double omega = std::sqrt(p.stiffness / p.mass);
  const double zeta = p.damping / (2.0 * std::sqrt(p.stiffness * p.mass));
  const double decay = zeta * omega;
  const double omega_d = omega * std::sqrt(1.0 - zeta * zeta);
  const double envelope = p.elongation * std::exp(-decay * t);
  const double c = std::cos(omega_d * t);
  const double s = std::sin(omega_d * t);
  MassSpringState st;
  st.position = envelope * (c + (decay / omega_d) * s);
  const double gain = omega * omega / omega_d;
  st.velocity = -envelope * gain * s;
  st.acceleration = -envelope * gain * (omega_d * c - decay * s);
  return st;
}

double true_index(const ModelSpec& model, InputCase c, const SubsetU& u) {
  const std::size_t p = arity(model);
  if (std::holds_alternative<External>(model))
    fail(ErrorKind::Unsupported, "no closed form for external models");
  u.validate(p);
  if (u.empty()) return 0.0;
  if (is_full(u, p)) return 1.0;

  const bool first = u.indices().front() == 1;
  if (const auto* m = std::get_if<AnisoLinear>(&model)) {
    // Both cases have equal input variances, so the ratio only involves a.
    const double a2 = m->a * m->a;
    return first ? a2 / (a2 + 1.0) : 1.0 / (a2 + 1.0);
  }
  if (const auto* m = std::get_if<BilinearAB>(&model)) {
    const double a = m->a, b = m->b;
    if (c == InputCase::Gaussian || c == InputCase::Native) {
      const double total = 4.0 + a * a + b * b;
      return first ? (1.0 + a * a) / total : 2.0 / total;
    }
    // Hoeffding terms under U[0,1]^2: main-effect slopes per component,
    // interaction b (X1-1/2)(X2-1/2); Var(X) = 1/12.
    const double s1 = 1.5 * 1.5 + (a + 0.5 * b) * (a + 0.5 * b);
    const double s2 = 1.5 * 1.5 + (1.0 + 0.5 * b) * (1.0 + 0.5 * b);
    const double inter = (1.0 + b * b) / 12.0;
    const double total = s1 + s2 + inter;
    return first ? s1 / total : s2 / total;
  }
  if (std::holds_alternative<Polar>(model) && c == InputCase::Native) {
    const double pi2 = kPi * kPi;
    const double total = 100.0 / 3.0 - 200.0 / pi2;
    return first ? (200.0 / (3.0 * pi2)) / total : (25.0 - 200.0 / pi2) / total;
  }
  fail(ErrorKind::Unsupported, "no closed form for " + model_name(model) + " with " +
                                   to_string(c) + " inputs and u={" + u.to_string() + "}");
}

std::vector<double> true_componentwise_index(const ModelSpec& model, InputCase c,
                                             const SubsetU& u) {
  const std::size_t p = arity(model);
  if (std::holds_alternative<External>(model) || std::holds_alternative<MassSpring>(model))
    fail(ErrorKind::Unsupported, "no closed form for " + model_name(model));
  u.validate(p);
  const std::size_t k = output_dim(model);
  if (u.empty()) return std::vector<double>(k, 0.0);
  if (is_full(u, p)) return std::vector<double>(k, 1.0);
  const bool first = u.indices().front() == 1;
  if (std::holds_alternative<AnisoLinear>(model))
    return first ? std::vector<double>{1.0, 0.0} : std::vector<double>{0.0, 1.0};
  if (const auto* m = std::get_if<BilinearAB>(&model);
      m && (c == InputCase::Gaussian || c == InputCase::Native)) {
    const double d2 = 1.0 + m->a * m->a + m->b * m->b;
    return first ? std::vector<double>{1.0 / 3.0, m->a * m->a / d2}
                 : std::vector<double>{1.0 / 3.0, 1.0 / d2};
  }
  if (std::holds_alternative<Polar>(model) && c == InputCase::Native) {
    const double pi2 = kPi * kPi;
    const double v = first ? 10.0 / (5.0 * pi2 - 30.0)
                           : 3.0 * (pi2 - 8.0) / (4.0 * (pi2 - 6.0));
    return {v, v};
  }
  fail(ErrorKind::Unsupported, "no componentwise closed form for " + model_name(model) +
                                   " with " + to_string(c) + " inputs");
}

}  // namespace gsobol
