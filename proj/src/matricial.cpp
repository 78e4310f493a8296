#include "gsobol/matricial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gsobol/errors.hpp"
#include "gsobol/estimators.hpp"

namespace gsobol {

namespace {

void check_order(int k) {
  if (k < 1) fail(ErrorKind::Domain, "signed permutations need k >= 1");
  if (k > kMaxSignedPermutationOrder)
    fail(ErrorKind::Capacity, "H_k enumeration is limited to k <= " +
                                  std::to_string(kMaxSignedPermutationOrder));
}

void check_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() < 1)
    fail(ErrorKind::Domain, std::string(what) + " must be a nonempty square matrix");
}

Matrix inverse_spd(const Matrix& sigma) {
  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success)
    fail(ErrorKind::Domain, "Sigma is singular or not positive definite");
  return llt.solve(Matrix::Identity(sigma.rows(), sigma.cols()));
}

}  // namespace

SpectralFrame spectral_frame(const Matrix& sigma, double tol) {
  check_square(sigma, "Sigma");
  const double asym = (sigma - sigma.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, sigma.cwiseAbs().maxCoeff()))
    fail(ErrorKind::Domain, "Sigma must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sigma);
  if (solver.info() != Eigen::Success) fail(ErrorKind::Domain, "eigen-decomposition failed");

  SpectralFrame frame;
  frame.eigenvalues = solver.eigenvalues();
  frame.vectors = solver.eigenvectors();
  if (!(frame.eigenvalues[0] > 0.0))
    fail(ErrorKind::Domain, "Sigma must be positive definite");
  const double top = frame.eigenvalues.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 1; i < frame.eigenvalues.size(); ++i) {
    if (frame.eigenvalues[i] - frame.eigenvalues[i - 1] < tol * top)
      fail(ErrorKind::NonSimpleSpectrum,
           "eigenvalues " + std::to_string(i) + " and " + std::to_string(i + 1) +
               " of Sigma are not separated");
  }
  for (Eigen::Index c = 0; c < frame.vectors.cols(); ++c) {
    for (Eigen::Index r = 0; r < frame.vectors.rows(); ++r) {
      const double v = frame.vectors(r, c);
      if (v == 0.0) continue;
      if (v < 0.0) frame.vectors.col(c) *= -1.0;
      break;
    }
  }
  return frame;
}

SignedPermutation SignedPermutation::identity(int k) {
  check_order(k);
  SignedPermutation p;
  p.k_ = k;
  for (int i = 0; i < k; ++i) p.perm_[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i);
  return p;
}

SignedPermutation SignedPermutation::from(const std::vector<int>& perm,
                                          const std::vector<int>& signs) {
  const int k = static_cast<int>(perm.size());
  check_order(k);
  if (signs.size() != perm.size())
    fail(ErrorKind::Domain, "permutation and sign vectors differ in length");
  std::vector<int> sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < k; ++i)
    if (sorted[static_cast<std::size_t>(i)] != i)
      fail(ErrorKind::Domain, "not a permutation of {0..k-1}");
  SignedPermutation p;
  p.k_ = k;
  for (int i = 0; i < k; ++i) {
    const auto si = static_cast<std::size_t>(i);
    p.perm_[si] = static_cast<std::uint8_t>(perm[si]);
    if (signs[si] == -1)
      p.sign_bits_ |= static_cast<std::uint8_t>(1u << i);
    else if (signs[si] != 1)
      fail(ErrorKind::Domain, "signs must be +1 or -1");
  }
  return p;
}

Matrix SignedPermutation::to_matrix() const {
  Matrix m = Matrix::Zero(k_, k_);
  for (int i = 0; i < k_; ++i) m(i, image(i)) = sign(i);
  return m;
}

SignedPermutation SignedPermutation::operator*(const SignedPermutation& rhs) const {
  if (rhs.k_ != k_) fail(ErrorKind::Domain, "signed permutations of different order");
  // (A B)_{i, rhs(a(i))} = eps_A(i) * eps_B(a(i))
  SignedPermutation out;
  out.k_ = k_;
  for (int i = 0; i < k_; ++i) {
    const int mid = image(i);
    out.perm_[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(rhs.image(mid));
    if (sign(i) * rhs.sign(mid) < 0) out.sign_bits_ |= static_cast<std::uint8_t>(1u << i);
  }
  return out;
}

SignedPermutation SignedPermutation::inverse() const {
  // Transpose: entry eps_i moves to (sigma(i), i).
  SignedPermutation out;
  out.k_ = k_;
  for (int i = 0; i < k_; ++i) {
    const int j = image(i);
    out.perm_[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(i);
    if (sign(i) < 0) out.sign_bits_ |= static_cast<std::uint8_t>(1u << j);
  }
  return out;
}

void for_each_hk(int k, const std::function<void(const SignedPermutation&)>& visit) {
  check_order(k);
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> signs(static_cast<std::size_t>(k));
  do {
    for (unsigned mask = 0; mask < (1u << k); ++mask) {
      for (int i = 0; i < k; ++i) signs[static_cast<std::size_t>(i)] = (mask >> i) & 1u ? -1 : 1;
      visit(SignedPermutation::from(perm, signs));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
}

std::vector<SignedPermutation> enumerate_hk(int k) {
  check_order(k);
  std::vector<SignedPermutation> out;
  std::size_t count = std::size_t{1} << k;
  for (int i = 2; i <= k; ++i) count *= static_cast<std::size_t>(i);
  out.reserve(count);
  for_each_hk(k, [&](const SignedPermutation& p) { out.push_back(p); });
  return out;
}

DiscreteMeasure DiscreteMeasure::point_mass(const SignedPermutation& p) {
  DiscreteMeasure mu;
  mu.atoms.emplace_back(p, 1.0);
  return mu;
}

DiscreteMeasure DiscreteMeasure::uniform(int k) {
  DiscreteMeasure mu;
  auto all = enumerate_hk(k);
  const double w = 1.0 / static_cast<double>(all.size());
  mu.atoms.reserve(all.size());
  for (auto& p : all) mu.atoms.emplace_back(p, w);
  return mu;
}

void DiscreteMeasure::validate() const {
  if (atoms.empty()) fail(ErrorKind::Domain, "measure has no atoms");
  double total = 0.0;
  const int k = atoms.front().first.order();
  for (const auto& [p, w] : atoms) {
    if (!(w >= 0.0)) fail(ErrorKind::Domain, "measure weights must be nonnegative");
    if (p.order() != k) fail(ErrorKind::Domain, "measure atoms differ in order");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) fail(ErrorKind::Domain, "measure weights must sum to 1");
}

Matrix average_conjugation(const Matrix& a) {
  check_square(a, "A");
  const int k = static_cast<int>(a.rows());
  check_order(k);
  Matrix sum = Matrix::Zero(k, k);
  std::size_t count = 0;
  std::vector<int> row_of(static_cast<std::size_t>(k));
  for_each_hk(k, [&](const SignedPermutation& p) {
    // Column i of P holds its only nonzero in row sigma^{-1}(i).
    for (int r = 0; r < k; ++r) row_of[static_cast<std::size_t>(p.image(r))] = r;
    for (int i = 0; i < k; ++i) {
      const int ri = row_of[static_cast<std::size_t>(i)];
      for (int j = 0; j < k; ++j) {
        const int rj = row_of[static_cast<std::size_t>(j)];
        sum(i, j) += p.sign(ri) * p.sign(rj) * a(ri, rj);
      }
    }
    ++count;
  });
  return sum / static_cast<double>(count);
}

Matrix t_mu(const Matrix& cu, const Matrix& sigma, const DiscreteMeasure& mu, double tol) {
  check_square(sigma, "Sigma");
  if (cu.rows() != sigma.rows() || cu.cols() != sigma.cols())
    fail(ErrorKind::Domain, "C_u and Sigma must have the same shape");
  mu.validate();
  if (mu.atoms.front().first.order() != sigma.rows())
    fail(ErrorKind::Domain, "measure order does not match k");
  const SpectralFrame frame = spectral_frame(sigma, tol);
  const Matrix inv = inverse_spd(sigma);
  // Cov(Y, Y^u) is symmetric in the population; sample estimates are not.
  const Matrix c_sym = 0.5 * (cu + cu.transpose());
  const Matrix integrand = inv * c_sym + c_sym * inv;
  Matrix out = Matrix::Zero(sigma.rows(), sigma.cols());
  for (const auto& [p, w] : mu.atoms) {
    if (w == 0.0) continue;
    const Matrix q = frame.vectors * p.to_matrix();
    out += w * (q.transpose() * integrand * q);
  }
  return 0.5 * out;
}

TStar t_star(const Matrix& cu, const Matrix& sigma) {
  check_square(sigma, "Sigma");
  if (cu.rows() != sigma.rows() || cu.cols() != sigma.cols())
    fail(ErrorKind::Domain, "C_u and Sigma must have the same shape");
  Eigen::FullPivLU<Matrix> lu(sigma);
  if (!lu.isInvertible()) fail(ErrorKind::Domain, "Sigma is singular");
  TStar out;
  const auto k = sigma.rows();
  out.scalar = lu.solve(cu).trace() / static_cast<double>(k);
  out.matrix = out.scalar * Matrix::Identity(k, k);
  return out;
}

PopulationMoments bilinear_gaussian_moments(double a, double b, const SubsetU& u) {
  u.validate(2);
  PopulationMoments m;
  m.sigma.resize(2, 2);
  m.sigma << 3.0, 1.0 + a + b, 1.0 + a + b, 1.0 + a * a + b * b;
  if (u.empty()) {
    m.cu = Matrix::Zero(2, 2);
  } else if (u.size() == 2) {
    m.cu = m.sigma;
  } else if (u.indices().front() == 1) {
    // E(Y | X1) - E(Y) = (X1, a X1)
    m.cu.resize(2, 2);
    m.cu << 1.0, a, a, a * a;
  } else {
    // E(Y | X2) - E(Y) = (X2, X2)
    m.cu = Matrix::Ones(2, 2);
  }
  return m;
}

TStar t_star_from_sample(const PickFreezeSample& s) {
  const EmpiricalCov cov = empirical_covariances(s);
  return t_star(0.5 * (cov.cu_hat + cov.cu_hat.transpose()), cov.sigma_hat);
}

}  // namespace gsobol
