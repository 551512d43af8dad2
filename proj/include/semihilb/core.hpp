#pragma once

#include "semihilb/dense.hpp"
#include "semihilb/errors.hpp"
#include "semihilb/tolerance.hpp"

#include <limits>
#include <memory>
#include <string>
#include <utility>

namespace semihilb {

class PsdContext;
using ContextPtr = std::shared_ptr<const PsdContext>;

ContextPtr make_context(const Matrix& a, const ToleranceConfig& tol = {});
ContextPtr lift(const PsdContext& ctx, int d);

/// A positive semidefinite A together with the spectral data every A-quantity
/// is computed from. Immutable; share it through ContextPtr.
///
/// Eigenvalues are sorted descending and the ones under `rank_rtol * max` are
/// stored as exact zeros, so `a()` is the truncated recomposition V diag(l) V*.
/// The first `rank()` columns of `eigvecs()` span range(A).
class PsdContext {
 public:
  class Key {
    Key() = default;
    friend ContextPtr make_context(const Matrix&, const ToleranceConfig&);
    friend ContextPtr lift(const PsdContext&, int);
  };

  struct Parts {
    Matrix a;
    RealVector eigvals;
    Matrix eigvecs;
    Index rank = 0;
    Matrix sqrt_a;
    Matrix pinv_a;
    Matrix pinv_sqrt_a;
    Matrix proj_range;
  };

  PsdContext(Key, Parts parts) : p_(std::move(parts)) {
    range_basis_ = p_.eigvecs.leftCols(p_.rank);
    range_root_ = p_.eigvals.head(p_.rank).cwiseSqrt();
  }

  Index dim() const { return p_.a.rows(); }
  Index rank() const { return p_.rank; }
  const Matrix& a() const { return p_.a; }
  const RealVector& eigvals() const { return p_.eigvals; }
  const Matrix& eigvecs() const { return p_.eigvecs; }
  const Matrix& sqrt_a() const { return p_.sqrt_a; }
  const Matrix& pinv_a() const { return p_.pinv_a; }
  const Matrix& pinv_sqrt_a() const { return p_.pinv_sqrt_a; }
  const Matrix& proj_range() const { return p_.proj_range; }

  /// Orthonormal basis of range(A) (n x rank) and the square roots of the
  /// matching eigenvalues.
  const Matrix& range_basis() const { return range_basis_; }
  const RealVector& range_root() const { return range_root_; }

  /// ||A|| (largest eigenvalue).
  double norm() const { return p_.eigvals.size() ? p_.eigvals(0) : 0.0; }
  double sqrt_norm() const { return std::sqrt(norm()); }

 private:
  Parts p_;
  Matrix range_basis_;
  RealVector range_root_;
};

namespace detail {

inline Matrix spectral_function(const Matrix& v, const RealVector& f) {
  return v * f.cast<Complex>().asDiagonal() * v.adjoint();
}

}  // namespace detail

inline ContextPtr make_context(const Matrix& a, const ToleranceConfig& tol) {
  tol.validate();
  if (a.rows() != a.cols() || a.rows() == 0)
    throw Error(Errc::dimension_mismatch, "A must be a non-empty square matrix");
  const double scale = linalg::max_abs(a);
  if (linalg::max_abs(a - a.adjoint()) > tol.cmp_atol * (1.0 + scale))
    throw Error(Errc::not_hermitian, "A differs from its adjoint beyond tolerance");

  const Matrix herm = (a + a.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
  if (es.info() != Eigen::Success) throw Error(Errc::not_hermitian, "eigendecomposition failed");

  // Eigen returns ascending order; flip to descending.
  const Index n = a.rows();
  RealVector lam = es.eigenvalues().reverse();
  Matrix vecs = es.eigenvectors().rowwise().reverse();

  if (lam(n - 1) < -tol.cmp_atol)
    throw Error(Errc::not_positive, "smallest eigenvalue " + std::to_string(lam(n - 1)));
  if (lam(0) <= tol.cmp_atol) throw Error(Errc::zero_operator, "A is numerically zero");

  const double cutoff = tol.rank_rtol * lam(0);
  Index rank = 0;
  RealVector root(n), inv(n), inv_root(n), proj(n);
  for (Index i = 0; i < n; ++i) {
    if (lam(i) < cutoff) {
      lam(i) = 0.0;
      root(i) = inv(i) = inv_root(i) = proj(i) = 0.0;
    } else {
      ++rank;
      root(i) = std::sqrt(lam(i));
      inv(i) = 1.0 / lam(i);
      inv_root(i) = 1.0 / root(i);
      proj(i) = 1.0;
    }
  }

  PsdContext::Parts p;
  p.a = detail::spectral_function(vecs, lam);
  p.sqrt_a = detail::spectral_function(vecs, root);
  p.pinv_a = detail::spectral_function(vecs, inv);
  p.pinv_sqrt_a = detail::spectral_function(vecs, inv_root);
  p.proj_range = detail::spectral_function(vecs, proj);
  p.eigvals = std::move(lam);
  p.eigvecs = std::move(vecs);
  p.rank = rank;
  return std::make_shared<const PsdContext>(PsdContext::Key{}, std::move(p));
}

/// A dense n x n matrix read against a PSD context of the same size.
class Operator {
 public:
  Operator(Matrix t, ContextPtr ctx) : t_(std::move(t)), ctx_(std::move(ctx)) {
    if (!ctx_) throw Error(Errc::dimension_mismatch, "null context");
    if (t_.rows() != ctx_->dim() || t_.cols() != ctx_->dim())
      throw Error(Errc::dimension_mismatch, "operator is " + std::to_string(t_.rows()) + "x" +
                                                std::to_string(t_.cols()) + ", context is " +
                                                std::to_string(ctx_->dim()));
  }

  const Matrix& matrix() const { return t_; }
  const PsdContext& context() const { return *ctx_; }
  const ContextPtr& context_ptr() const { return ctx_; }
  Index dim() const { return t_.rows(); }

  bool same_context(const Operator& other) const {
    return ctx_ == other.ctx_ || ctx_->a() == other.ctx_->a();
  }

 private:
  Matrix t_;
  ContextPtr ctx_;
};

namespace detail {

inline void require_same_context(const Operator& x, const Operator& y) {
  if (!x.same_context(y)) throw Error(Errc::dimension_mismatch, "operators use different contexts");
}

}  // namespace detail

inline Operator operator*(const Operator& x, const Operator& y) {
  detail::require_same_context(x, y);
  return Operator(x.matrix() * y.matrix(), x.context_ptr());
}
inline Operator operator+(const Operator& x, const Operator& y) {
  detail::require_same_context(x, y);
  return Operator(x.matrix() + y.matrix(), x.context_ptr());
}
inline Operator operator-(const Operator& x, const Operator& y) {
  detail::require_same_context(x, y);
  return Operator(x.matrix() - y.matrix(), x.context_ptr());
}
inline Operator operator*(Complex c, const Operator& x) {
  return Operator(c * x.matrix(), x.context_ptr());
}

/// <x|y>_A = y* A x, conjugate-linear in y.
inline Complex semi_inner(const Vector& x, const Vector& y, const PsdContext& ctx) {
  if (x.size() != ctx.dim() || y.size() != ctx.dim())
    throw Error(Errc::dimension_mismatch, "vector length does not match context");
  return y.dot(ctx.a() * x);
}

inline double semi_norm(const Vector& x, const PsdContext& ctx) {
  return std::sqrt(std::max(0.0, semi_inner(x, x, ctx).real()));
}

/// Residual of R(T*A) in R(A): ||(I - P) T* A||.
inline double ba_residual(const Operator& op) {
  const PsdContext& c = op.context();
  const Matrix null_proj = linalg::identity(c.dim()) - c.proj_range();
  return linalg::spectral_norm(null_proj * op.matrix().adjoint() * c.a());
}

inline bool in_BA(const Operator& op, const ToleranceConfig& tol = {}) {
  const double scale = 1.0 + op.context().norm() * linalg::spectral_norm(op.matrix());
  return ba_residual(op) <= tol.cmp_atol * scale;
}

/// A-boundedness: A^{1/2} T must vanish on null(A).
inline bool in_BA_half(const Operator& op, const ToleranceConfig& tol = {}) {
  const PsdContext& c = op.context();
  const Matrix null_proj = linalg::identity(c.dim()) - c.proj_range();
  const double residual = linalg::spectral_norm(c.sqrt_a() * op.matrix() * null_proj);
  const double scale = 1.0 + c.sqrt_norm() * linalg::spectral_norm(op.matrix());
  return residual <= tol.cmp_atol * scale;
}

/// The distinguished A-adjoint A^+ T* A (reduced solution of AX = T*A).
inline Operator a_adjoint(const Operator& op, const ToleranceConfig& tol = {}) {
  if (!in_BA(op, tol)) throw Error(Errc::not_in_ba, "operator has no A-adjoint");
  const PsdContext& c = op.context();
  return Operator(c.pinv_a() * op.matrix().adjoint() * c.a(), op.context_ptr());
}

/// A^{1/2} T (A^{1/2})^+ : the classical matrix carrying every A-quantity of T.
inline Matrix reduce(const Operator& op, const ToleranceConfig& tol = {}) {
  if (!in_BA_half(op, tol)) throw Error(Errc::not_a_bounded, "operator is not A-bounded");
  const PsdContext& c = op.context();
  return c.sqrt_a() * op.matrix() * c.pinv_sqrt_a();
}

namespace detail {

/// reduce() without the membership check, for callers that already hold it.
inline Matrix reduce_unchecked(const PsdContext& c, const Matrix& t) {
  return c.sqrt_a() * t * c.pinv_sqrt_a();
}

/// reduce(T) written in the range basis: the rank x rank matrix
/// L^{1/2} V_r* T V_r L^{-1/2}. reduce(T) vanishes off range(A), so norms,
/// spectra and numerical radii of the two coincide.
inline Matrix reduce_compressed(const PsdContext& c, const Matrix& t) {
  const auto root = c.range_root().cast<Complex>();
  return root.asDiagonal() * (c.range_basis().adjoint() * t * c.range_basis()) *
         root.cwiseInverse().asDiagonal();
}

}  // namespace detail

/// ||T||_A. Operators outside B_{A^{1/2}} have an infinite seminorm; the
/// return value is then +inf (test with `std::isinf`).
inline double a_op_norm(const Operator& op, const ToleranceConfig& tol = {}) {
  if (!in_BA_half(op, tol)) return std::numeric_limits<double>::infinity();
  return linalg::spectral_norm(detail::reduce_compressed(op.context(), op.matrix()));
}

/// A-selfadjoint: AT is Hermitian.
inline bool is_a_selfadjoint(const Operator& op, const ToleranceConfig& tol = {}) {
  const Matrix at = op.context().a() * op.matrix();
  const double scale = 1.0 + op.context().norm() * linalg::spectral_norm(op.matrix());
  return linalg::spectral_norm(at - at.adjoint()) <= tol.cmp_atol * scale;
}

}  // namespace semihilb
