#pragma once

#include "semihilb/blockops.hpp"
#include "semihilb/core.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace semihilb {

enum class Ensemble { ginibre, nilpotent_lift, a_selfadjoint, sparse, zero };

inline const char* ensemble_name(Ensemble e) {
  switch (e) {
    case Ensemble::ginibre: return "ginibre";
    case Ensemble::nilpotent_lift: return "nilpotent-lift";
    case Ensemble::a_selfadjoint: return "a-selfadjoint";
    case Ensemble::sparse: return "sparse";
    case Ensemble::zero: return "zero";
  }
  return "?";
}

inline Ensemble parse_ensemble(const std::string& s) {
  for (Ensemble e : {Ensemble::ginibre, Ensemble::nilpotent_lift, Ensemble::a_selfadjoint, Ensemble::sparse,
                     Ensemble::zero})
    if (s == ensemble_name(e)) return e;
  throw Error(Errc::invalid_config, "unknown ensemble '" + s + "'");
}

struct GenSpec {
  Index n = 2;
  int d = 2;
  Index rank = 2;
  Ensemble ensemble = Ensemble::ginibre;
  double scale = 1.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (n < 1 || d < 1) throw Error(Errc::invalid_config, "n and d must be >= 1");
    if (rank < 1 || rank > n) throw Error(Errc::invalid_config, "rank must lie in [1, n]");
    if (!(scale > 0)) throw Error(Errc::invalid_config, "scale must be positive");
  }
};

/// splitmix64 finaliser; derives independent child seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double normal() { return normal_(eng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  bool bernoulli(double p) { return std::bernoulli_distribution(p)(eng_); }

  /// iid standard complex Gaussian entries, E|z|^2 = 1.
  Matrix ginibre(Index rows, Index cols) {
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) m(i, j) = Complex(normal(), normal()) / std::sqrt(2.0);
    return m;
  }

  /// Haar-distributed unitary (QR of a Ginibre matrix with phase fix).
  Matrix haar_unitary(Index n) {
    if (n == 0) return Matrix(0, 0);
    Eigen::HouseholderQR<Matrix> qr(ginibre(n, n));
    Matrix q = qr.householderQ() * linalg::identity(n);
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index k = 0; k < n; ++k) {
      const double mag = std::abs(r(k, k));
      if (mag > 0) q.col(k) *= r(k, k) / mag;
    }
    return q;
  }

  Matrix hermitian(Index n) {
    const Matrix g = ginibre(n, n);
    return (g + g.adjoint()) / 2.0;
  }

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> normal_;
};

/// A = V diag(l_1..l_rank, 0..0) V* with V Haar and l_i uniform in [0.1, 2].
inline ContextPtr gen_psd(Index n, Index rank, std::uint64_t seed, const ToleranceConfig& tol = {}) {
  if (rank < 1 || rank > n) throw Error(Errc::invalid_config, "rank must lie in [1, n]");
  Rng rng(seed);
  const Matrix v = rng.haar_unitary(n);
  RealVector lam = RealVector::Zero(n);
  for (Index i = 0; i < rank; ++i) lam(i) = rng.uniform(0.1, 2.0);
  Matrix a = v * lam.cast<Complex>().asDiagonal() * v.adjoint();
  a = (a + a.adjoint()) / 2.0;
  return make_context(a, tol);
}

namespace detail {

/// Rotates [[range->range, 0], [range->null, null->null]] out of the
/// eigenbasis of A. The zero block keeps null(A) invariant, which is exactly
/// membership in B_A.
inline Matrix from_eigenbasis(const PsdContext& ctx, const Matrix& x, const Matrix& y, const Matrix& z) {
  const Index r = ctx.rank();
  const Index n = ctx.dim();
  Matrix tp = Matrix::Zero(n, n);
  tp.topLeftCorner(r, r) = x;
  tp.bottomLeftCorner(n - r, r) = y;
  tp.bottomRightCorner(n - r, n - r) = z;
  return ctx.eigvecs() * tp * ctx.eigvecs().adjoint();
}

}  // namespace detail

inline Operator gen_compatible(const ContextPtr& ctx, std::uint64_t seed, Ensemble ensemble, double scale = 1.0) {
  Rng rng(seed);
  const Index r = ctx->rank();
  const Index m = ctx->dim() - r;
  Matrix x, y, z;
  switch (ensemble) {
    case Ensemble::zero:
      return Operator(Matrix::Zero(ctx->dim(), ctx->dim()), ctx);
    case Ensemble::ginibre:
      x = rng.ginibre(r, r);
      y = rng.ginibre(m, r);
      z = rng.ginibre(m, m);
      break;
    case Ensemble::sparse: {
      x = rng.ginibre(r, r);
      y = rng.ginibre(m, r);
      z = rng.ginibre(m, m);
      for (Matrix* blk : {&x, &y, &z})
        for (Index k = 0; k < blk->size(); ++k)
          if (!rng.bernoulli(0.35)) blk->data()[k] = 0.0;
      break;
    }
    case Ensemble::nilpotent_lift: {
      // X = S N S^{-1} with N strictly block upper triangular, so X^2 = 0 and A T^2 = 0.
      const Index k = r / 2;
      Matrix nil = Matrix::Zero(r, r);
      nil.topRightCorner(k, r - k) = rng.ginibre(k, r - k);
      const Matrix s = linalg::identity(r) + 0.5 * rng.ginibre(r, r) / std::sqrt(static_cast<double>(r));
      x = s * nil * s.inverse();
      y = rng.ginibre(m, r);
      z = rng.ginibre(m, m);
      break;
    }
    case Ensemble::a_selfadjoint: {
      // A T Hermitian: range block is Lambda^{-1} H with H Hermitian.
      const RealVector lam = ctx->eigvals().head(r);
      x = lam.cwiseInverse().cast<Complex>().asDiagonal() * rng.hermitian(r);
      y = rng.ginibre(m, r);
      z = rng.ginibre(m, m);
      break;
    }
  }
  return Operator(scale * detail::from_eigenbasis(*ctx, x, y, z), ctx);
}

/// Checks ||Ux||_A = ||U^# x||_A = ||x||_A on `samples` random vectors.
inline bool is_a_unitary_on_samples(const Operator& u, std::uint64_t seed, int samples = 100,
                                    const ToleranceConfig& tol = {}) {
  if (!in_BA(u, tol)) return false;
  const Operator sharp = a_adjoint(u, tol);
  const PsdContext& c = u.context();
  Rng rng(seed);
  for (int s = 0; s < samples; ++s) {
    const Vector x = rng.ginibre(c.dim(), 1);
    const double base = semi_norm(x, c);
    const double slack = 1e-10 * (1.0 + base);
    if (std::abs(semi_norm(u.matrix() * x, c) - base) > slack) return false;
    if (std::abs(semi_norm(sharp.matrix() * x, c) - base) > slack) return false;
  }
  return true;
}

/// A-unitary U: in the eigenbasis [[W, 0], [Y, Z]] with W = L^{-1/2} Q L^{1/2},
/// Q Haar, so W* L W = L. Verified on samples, resampled up to 16 times.
inline Operator gen_a_unitary(const ContextPtr& ctx, std::uint64_t seed) {
  const Index r = ctx->rank();
  const Index m = ctx->dim() - r;
  const RealVector root = ctx->eigvals().head(r).cwiseSqrt();
  for (int attempt = 0; attempt < 16; ++attempt) {
    Rng rng(mix_seed(seed, attempt));
    const Matrix q = rng.haar_unitary(r);
    const Matrix w = root.cwiseInverse().cast<Complex>().asDiagonal() * q * root.cast<Complex>().asDiagonal();
    Operator u(detail::from_eigenbasis(*ctx, w, rng.ginibre(m, r), rng.ginibre(m, m)), ctx);
    if (is_a_unitary_on_samples(u, mix_seed(seed, 1000 + attempt))) return u;
  }
  throw Error(Errc::construction_failed, "no A-unitary passed verification after 16 attempts");
}

/// d x d block matrix: one context from `spec.seed`, one block per (i, j).
inline BlockMatrix gen_block_matrix(const GenSpec& spec, const ToleranceConfig& tol = {}) {
  spec.validate();
  const ContextPtr ctx = gen_psd(spec.n, spec.rank, mix_seed(spec.seed, 0), tol);
  std::vector<Matrix> blocks;
  for (int i = 0; i < spec.d; ++i)
    for (int j = 0; j < spec.d; ++j) {
      const std::uint64_t s = mix_seed(spec.seed, 1 + static_cast<std::uint64_t>(i * spec.d + j));
      blocks.push_back(gen_compatible(ctx, s, spec.ensemble, spec.scale).matrix());
    }
  return BlockMatrix(spec.d, std::move(blocks), ctx);
}

}  // namespace semihilb
