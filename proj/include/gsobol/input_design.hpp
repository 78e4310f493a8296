#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace gsobol {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct StandardGaussian {};

struct Uniform {
  double lo = 0.0;
  double hi = 1.0;
};

using Distribution = std::variant<StandardGaussian, Uniform>;

std::string describe(const Distribution& d);

// Independent univariate inputs X_1..X_p.
class InputSpec {
 public:
  explicit InputSpec(std::vector<Distribution> dists);

  static InputSpec iid(std::size_t p, const Distribution& d);

  std::size_t dimension() const noexcept { return dists_.size(); }
  const Distribution& operator[](std::size_t j) const { return dists_[j]; }
  const std::vector<Distribution>& distributions() const noexcept {
    return dists_;
  }

 private:
  std::vector<Distribution> dists_;
};

// Subset u of {1..p}, stored as sorted distinct 1-based indices.
class SubsetU {
 public:
  SubsetU() = default;
  SubsetU(std::initializer_list<int> indices);
  explicit SubsetU(std::vector<int> indices);

  // Parses "1,3" (1-based). An empty string yields the empty subset.
  static SubsetU parse(const std::string& text);
  static SubsetU full(std::size_t p);

  const std::vector<int>& indices() const noexcept { return indices_; }
  bool empty() const noexcept { return indices_.empty(); }
  std::size_t size() const noexcept { return indices_.size(); }

  // Membership test for the 0-based column j.
  bool contains_column(std::size_t j) const noexcept;

  // Throws a domain error if any index lies outside {1..p}.
  void validate(std::size_t p) const;

  SubsetU complement(std::size_t p) const;
  SubsetU united(const SubsetU& other) const;

  std::string to_string() const;

  friend bool operator==(const SubsetU&, const SubsetU&) = default;

 private:
  std::vector<int> indices_;
};

struct DesignConfig {
  std::size_t n_replicates = 0;
  std::uint64_t seed = 0;
};

struct PickFreezeDesign {
  Matrix x;
  Matrix x_prime;
};

// n x p matrix; column j is drawn from stream (seed, "base", j).
Matrix sample_inputs(const InputSpec& spec, std::size_t n, std::uint64_t seed);

// X is the base sample; X' copies the columns in u and redraws the others
// from stream (seed, "prime", j). X does not depend on u.
PickFreezeDesign pick_freeze_design(const InputSpec& spec, const SubsetU& u,
                                    const DesignConfig& cfg);

}  // namespace gsobol
