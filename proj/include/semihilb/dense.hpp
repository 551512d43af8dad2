#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

namespace semihilb {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

namespace linalg {

/// Ascending eigenvalues of the Hermitian part of `h` (lower triangle is read).
inline RealVector hermitian_eigenvalues(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline double hermitian_max_eigenvalue(const Matrix& h) {
  if (h.size() == 0) return 0.0;
  return hermitian_eigenvalues(h).maxCoeff();
}

/// Largest singular value. Goes through the Gram matrix, which is accurate to
/// roughly machine epsilon relative to the result.
inline double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const Matrix gram = m.rows() >= m.cols() ? Matrix(m.adjoint() * m) : Matrix(m * m.adjoint());
  return std::sqrt(std::max(0.0, hermitian_max_eigenvalue(gram)));
}

inline Eigen::VectorXcd eigenvalues(const Matrix& m) {
  Eigen::ComplexEigenSolver<Matrix> es(m, /*computeEigenvectors=*/false);
  return es.eigenvalues();
}

struct SpectralRadiusEstimate {
  double radius = 0.0;
  double uncertainty = 0.0;  // first-order error radius of the worst eigenvalue
};

/// Spectral radius with defective clusters resolved.
///
/// Each computed eigenvalue gets the error radius 4 n eps ||m|| kappa_i, with
/// kappa_i = ||x_i|| ||y_i|| / |y_i* x_i| from right and left eigenvectors.
/// Eigenvalues whose error disks overlap are merged and replaced by their
/// mean, which is well conditioned even when the members are not (a Jordan
/// block of size k scatters its eigenvalue over a ring of radius eps^(1/k)).
inline SpectralRadiusEstimate spectral_radius_estimate(const Matrix& m) {
  const Index n = m.rows();
  if (n == 0) return {};
  Eigen::ComplexEigenSolver<Matrix> es(m, /*computeEigenvectors=*/true);
  const Eigen::VectorXcd lam = es.eigenvalues();
  const Matrix& v = es.eigenvectors();
  const double scale = std::max(spectral_norm(m), std::numeric_limits<double>::min());
  const double unit = 4.0 * static_cast<double>(n) * std::numeric_limits<double>::epsilon() * scale;

  RealVector err = RealVector::Constant(n, 2.0 * scale);
  Eigen::FullPivLU<Matrix> lu(v);
  if (lu.isInvertible()) {
    const Matrix w = lu.inverse();
    for (Index i = 0; i < n; ++i) err(i) = std::min(2.0 * scale, unit * v.col(i).norm() * w.row(i).norm());
  }

  std::vector<Index> parent(n);
  for (Index i = 0; i < n; ++i) parent[i] = i;
  auto root = [&](Index i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (std::abs(lam(i) - lam(j)) <= err(i) + err(j)) parent[root(i)] = root(j);

  std::vector<std::complex<double>> sum(n, 0.0);
  std::vector<int> count(n, 0);
  for (Index i = 0; i < n; ++i) {
    sum[root(i)] += lam(i);
    ++count[root(i)];
  }
  SpectralRadiusEstimate out;
  for (Index i = 0; i < n; ++i)
    if (count[i] > 0) out.radius = std::max(out.radius, std::abs(sum[i] / static_cast<double>(count[i])));
  out.uncertainty = err.maxCoeff();
  return out;
}

inline double spectral_radius(const Matrix& m) { return spectral_radius_estimate(m).radius; }

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline Matrix identity(Index n) { return Matrix::Identity(n, n); }

}  // namespace linalg
}  // namespace semihilb
