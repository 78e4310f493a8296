#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "gsobol/input_design.hpp"

namespace gsobol {

// Eigen-decomposition of Sigma with ascending simple eigenvalues; column i
// of `vectors` is the unit eigenvector of eigenvalues[i] whose first nonzero
// coordinate is positive.
struct SpectralFrame {
  Vector eigenvalues;
  Matrix vectors;
};

inline constexpr double kDefaultSimplicityTol = 1e-8;

// Throws NonSimpleSpectrum when the smallest gap is below tol * max|lambda|,
// and Domain when Sigma is not symmetric positive definite.
SpectralFrame spectral_frame(const Matrix& sigma, double tol = kDefaultSimplicityTol);

inline constexpr int kMaxSignedPermutationOrder = 8;

// Element D_eps P_sigma of the hyperoctahedral group H_k, i.e. the matrix
// with entry eps_i at (i, sigma(i)) and zeros elsewhere.
class SignedPermutation {
 public:
  static SignedPermutation identity(int k);
  static SignedPermutation from(const std::vector<int>& perm, const std::vector<int>& signs);

  int order() const noexcept { return k_; }
  int image(int i) const noexcept { return perm_[static_cast<std::size_t>(i)]; }
  int sign(int i) const noexcept { return (sign_bits_ >> i) & 1u ? -1 : 1; }

  Matrix to_matrix() const;
  SignedPermutation operator*(const SignedPermutation& rhs) const;
  SignedPermutation inverse() const;

  friend bool operator==(const SignedPermutation&, const SignedPermutation&) = default;

 private:
  std::array<std::uint8_t, kMaxSignedPermutationOrder> perm_{};
  std::uint8_t sign_bits_ = 0;  // bit i set when eps_i = -1
  int k_ = 0;
};

// Visits all 2^k k! elements of H_k in a fixed order.
void for_each_hk(int k, const std::function<void(const SignedPermutation&)>& visit);

// Materialised H_k; k <= 8, otherwise Capacity error.
std::vector<SignedPermutation> enumerate_hk(int k);

struct DiscreteMeasure {
  std::vector<std::pair<SignedPermutation, double>> atoms;

  static DiscreteMeasure point_mass(const SignedPermutation& p);
  static DiscreteMeasure uniform(int k);

  // Throws a domain error unless weights are >= 0 and sum to 1 within 1e-12.
  void validate() const;
};

// Average of P^t A P over the uniform measure on H_k, by enumeration.
Matrix average_conjugation(const Matrix& a);

// 1/2 sum_P w_P (O P)^t (Sigma^{-1} C_u + C_u Sigma^{-1}) (O P).
Matrix t_mu(const Matrix& cu, const Matrix& sigma, const DiscreteMeasure& mu,
            double tol = kDefaultSimplicityTol);

struct TStar {
  Matrix matrix;  // scalar * Id_k
  double scalar = 0.0;
};

// (Tr(Sigma^{-1} C_u) / k) Id_k
TStar t_star(const Matrix& cu, const Matrix& sigma);

// Population Sigma and C_u of the bilinear model under Gaussian inputs.
struct PopulationMoments {
  Matrix sigma;
  Matrix cu;
};
PopulationMoments bilinear_gaussian_moments(double a, double b, const SubsetU& u);

struct PickFreezeSample;

// Plug-in T^u from Sigma_N and C_{u,N}. Experimental: relies on inverting
// the empirical covariance, which is unstable for large k.
TStar t_star_from_sample(const PickFreezeSample& s);

}  // namespace gsobol
