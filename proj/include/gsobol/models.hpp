#pragma once

#include <string>
#include <variant>
#include <vector>

#include "gsobol/input_design.hpp"

namespace gsobol {

// Y = (a X1, X2)
struct AnisoLinear {
  double a = 1.0;
};

// Y = (X1 + X1 X2 + X2, a X1 + b X1 X2 + X2)
struct BilinearAB {
  double a = 2.0;
  double b = 3.0;
};

// Y = (X1 cos X2, X1 sin X2), X1 ~ U[0,10], X2 ~ U[0, pi/2]
struct Polar {};

// Displacement of a damped spring on a time grid; inputs (m, c, k, l).
struct MassSpring {
  std::vector<double> t_grid;

  // t_i = 0.05 i, i = 1..800
  static MassSpring default_grid();
};

// Black-box simulator driven through stdin/stdout: one request row of p
// comma-separated reals per replicate, one response row of k reals back.
struct External {
  std::string command;
  int k = 1;
  int p = 0;  // 0 accepts any input dimension
};

using ModelSpec = std::variant<AnisoLinear, BilinearAB, Polar, MassSpring, External>;

enum class InputCase {
  Gaussian,   // i.i.d. standard Gaussian inputs
  Uniform01,  // i.i.d. uniform inputs on [0, 1]
  Native,     // the model's own input law (Gaussian for the toy models)
};

std::string model_name(const ModelSpec& model);
std::string to_string(InputCase c);
InputCase parse_input_case(const std::string& text);

// Number of inputs p, or 0 for an external model that accepts any p.
std::size_t arity(const ModelSpec& model);
std::size_t output_dim(const ModelSpec& model);
std::vector<std::string> input_names(const ModelSpec& model);

// Input law for (model, case). External models have no built-in law.
InputSpec default_inputs(const ModelSpec& model, InputCase c);

// Row-wise f applied to an n x p matrix. Analytic models split rows across
// workers; external models run one subprocess per worker batch.
Matrix evaluate(const ModelSpec& model, const Matrix& x, unsigned workers = 1);

struct MassSpringParams {
  double mass = 0.0;        // kg
  double damping = 0.0;     // N m^-1 s
  double stiffness = 0.0;   // N m^-1
  double elongation = 0.0;  // m, x(0)
};

// Closed-form solution of m x'' + c x' + k x = 0 with x(0) = l, x'(0) = 0.
// Throws a domain error outside the underdamped regime c^2 < 4 k m.
double mass_spring_displacement(const MassSpringParams& params, double t);

struct MassSpringState {
  double position = 0.0;
  double velocity = 0.0;
  double acceleration = 0.0;
};

// Position and its first two time derivatives from the closed form.
MassSpringState mass_spring_state(const MassSpringParams& params, double t);

// Exact S^u(f) where a closed form is known; throws Unsupported otherwise.
double true_index(const ModelSpec& model, InputCase c, const SubsetU& u);

// Exact scalar first-order indices of each output component.
std::vector<double> true_componentwise_index(const ModelSpec& model, InputCase c,
                                             const SubsetU& u);

}  // namespace gsobol
