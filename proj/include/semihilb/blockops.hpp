#pragma once

#include "semihilb/core.hpp"
#include "semihilb/radii.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace semihilb {

/// Offset of block index `i` in the flattened dn x dn layout. Blocks are
/// contiguous n x n tiles laid out row-major; everything that moves between
/// the grid and the flat matrix goes through this.
constexpr Index block_offset(Index i, Index n) { return i * n; }

namespace detail {

inline Matrix block_diagonal(const Matrix& m, int d) {
  const Index n = m.rows();
  Matrix out = Matrix::Zero(d * n, d * n);
  for (int i = 0; i < d; ++i) out.block(block_offset(i, n), block_offset(i, n), n, n) = m;
  return out;
}

}  // namespace detail

/// diag(A, ..., A) on the d-fold direct sum. Caches are embedded blockwise
/// from `ctx` instead of being recomputed.
inline ContextPtr lift(const PsdContext& ctx, int d) {
  if (d < 1) throw Error(Errc::bad_index, "block count must be >= 1");
  const Index n = ctx.dim();
  const Index big = d * n;

  // Eigenpairs sorted descending across copies; ties keep block order.
  std::vector<std::pair<Index, int>> order;  // (eigen index, block)
  for (Index k = 0; k < n; ++k)
    for (int b = 0; b < d; ++b) order.emplace_back(k, b);
  std::stable_sort(order.begin(), order.end(), [&](const auto& x, const auto& y) {
    return ctx.eigvals()(x.first) > ctx.eigvals()(y.first);
  });

  PsdContext::Parts p;
  p.eigvals.resize(big);
  p.eigvecs = Matrix::Zero(big, big);
  for (Index col = 0; col < big; ++col) {
    const auto [k, b] = order[col];
    p.eigvals(col) = ctx.eigvals()(k);
    p.eigvecs.block(block_offset(b, n), col, n, 1) = ctx.eigvecs().col(k);
  }
  p.rank = d * ctx.rank();
  p.a = detail::block_diagonal(ctx.a(), d);
  p.sqrt_a = detail::block_diagonal(ctx.sqrt_a(), d);
  p.pinv_a = detail::block_diagonal(ctx.pinv_a(), d);
  p.pinv_sqrt_a = detail::block_diagonal(ctx.pinv_sqrt_a(), d);
  p.proj_range = detail::block_diagonal(ctx.proj_range(), d);
  return std::make_shared<const PsdContext>(PsdContext::Key{}, std::move(p));
}

/// d x d grid of n x n blocks, each read against A, with the lifted context
/// diag(A, ..., A) attached for the assembled operator.
class BlockMatrix {
 public:
  BlockMatrix(int d, std::vector<Matrix> blocks, ContextPtr base)
      : d_(d), blocks_(std::move(blocks)), base_(std::move(base)) {
    if (d_ < 1) throw Error(Errc::ragged_blocks, "block count must be >= 1");
    if (!base_) throw Error(Errc::dimension_mismatch, "null context");
    if (static_cast<int>(blocks_.size()) != d_ * d_)
      throw Error(Errc::ragged_blocks, "expected " + std::to_string(d_ * d_) + " blocks");
    const Index n = base_->dim();
    for (int i = 0; i < d_; ++i)
      for (int j = 0; j < d_; ++j) {
        const Matrix& b = blocks_[i * d_ + j];
        if (b.rows() != n || b.cols() != n)
          throw Error(Errc::ragged_blocks, "block is not " + std::to_string(n) + "x" + std::to_string(n), i, j);
      }
    lifted_ = lift(*base_, d_);
  }

  int d() const { return d_; }
  Index n() const { return base_->dim(); }
  const Matrix& block(int i, int j) const { return blocks_.at(i * d_ + j); }
  Operator block_op(int i, int j) const { return Operator(block(i, j), base_); }
  const std::vector<Matrix>& blocks() const { return blocks_; }
  const ContextPtr& base_ctx() const { return base_; }
  const ContextPtr& lifted_ctx() const { return lifted_; }

 private:
  int d_;
  std::vector<Matrix> blocks_;
  ContextPtr base_;
  ContextPtr lifted_;
};

inline BlockMatrix assemble(const std::vector<std::vector<Matrix>>& grid, ContextPtr ctx) {
  const int d = static_cast<int>(grid.size());
  std::vector<Matrix> flat;
  flat.reserve(d * d);
  for (int i = 0; i < d; ++i) {
    if (static_cast<int>(grid[i].size()) != d)
      throw Error(Errc::ragged_blocks, "row " + std::to_string(i) + " has " +
                                           std::to_string(grid[i].size()) + " blocks");
    for (const Matrix& b : grid[i]) flat.push_back(b);
  }
  return BlockMatrix(d, std::move(flat), std::move(ctx));
}

inline Operator flatten(const BlockMatrix& bm) {
  const Index n = bm.n();
  Matrix big(bm.d() * n, bm.d() * n);
  for (int i = 0; i < bm.d(); ++i)
    for (int j = 0; j < bm.d(); ++j) big.block(block_offset(i, n), block_offset(j, n), n, n) = bm.block(i, j);
  return Operator(std::move(big), bm.lifted_ctx());
}

/// Inverse of flatten: cut a dn x dn operator into its d x d grid.
inline BlockMatrix split(const Matrix& big, int d, ContextPtr base) {
  const Index n = base->dim();
  if (big.rows() != d * n || big.cols() != d * n)
    throw Error(Errc::dimension_mismatch, "flat matrix does not match d*n");
  std::vector<Matrix> blocks;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) blocks.push_back(big.block(block_offset(i, n), block_offset(j, n), n, n));
  return BlockMatrix(d, std::move(blocks), std::move(base));
}

/// Blockwise A-adjoint: block (i, j) of the result is T_ji^#.
inline BlockMatrix block_sharp(const BlockMatrix& bm, const ToleranceConfig& tol = {}) {
  const int d = bm.d();
  std::vector<Matrix> out(d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const Operator t = bm.block_op(j, i);
      if (!in_BA(t, tol)) throw Error(Errc::block_not_in_ba, "block has no A-adjoint", j, i);
      out[i * d + j] = a_adjoint(t, tol).matrix();
    }
  return BlockMatrix(d, std::move(out), bm.base_ctx());
}

/// Block permutation with identities on the anti-diagonal of the leading
/// k x k corner and on the diagonal of the trailing part. Entries are exact 0/1.
inline BlockMatrix u_k(int k, int d, ContextPtr ctx) {
  if (d < 2 || k < 2 || k > d)
    throw Error(Errc::bad_index, "need 2 <= k <= d, got k=" + std::to_string(k) + " d=" + std::to_string(d));
  const Index n = ctx->dim();
  std::vector<Matrix> blocks(d * d, Matrix::Zero(n, n));
  for (int i = 0; i < d; ++i) {
    const int j = i < k ? k - 1 - i : i;
    blocks[i * d + j] = linalg::identity(n);
  }
  return BlockMatrix(d, std::move(blocks), std::move(ctx));
}

enum class BlockShape { diagonal, antidiagonal };

/// Places entries[i] at (i, i) or at (i, d-1-i); everything else is zero.
inline BlockMatrix assemble_structured(const std::vector<Operator>& entries, BlockShape shape) {
  if (entries.empty()) throw Error(Errc::ragged_blocks, "no entries");
  const int d = static_cast<int>(entries.size());
  const ContextPtr& ctx = entries.front().context_ptr();
  const Index n = ctx->dim();
  std::vector<Matrix> blocks(d * d, Matrix::Zero(n, n));
  for (int i = 0; i < d; ++i) {
    detail::require_same_context(entries.front(), entries[i]);
    const int j = shape == BlockShape::diagonal ? i : d - 1 - i;
    blocks[i * d + j] = entries[i].matrix();
  }
  return BlockMatrix(d, std::move(blocks), ctx);
}

/// ||diag(T_i)||_A and ||antidiag(T_i)||_A, both max_i ||T_i||_A.
inline double structured_norm(const std::vector<Operator>& entries, BlockShape /*shape*/,
                              const ToleranceConfig& tol = {}) {
  double best = 0.0;
  for (const Operator& t : entries) {
    const double v = a_op_norm(t, tol);
    if (std::isinf(v)) throw Error(Errc::not_a_bounded, "entry is not A-bounded");
    best = std::max(best, v);
  }
  return best;
}

/// omega of diag(T_i) under the lifted context: max_i omega_A(T_i).
inline double structured_omega(const std::vector<Operator>& entries, const ToleranceConfig& tol = {}) {
  double best = 0.0;
  for (const Operator& t : entries) best = std::max(best, a_numerical_radius(t, tol));
  return best;
}

/// Entrywise A-seminorms (||T_ij||_A).
inline RealMatrix hat_matrix(const BlockMatrix& bm, const ToleranceConfig& tol = {}) {
  RealMatrix h(bm.d(), bm.d());
  for (int i = 0; i < bm.d(); ++i)
    for (int j = 0; j < bm.d(); ++j) {
      const double v = a_op_norm(bm.block_op(i, j), tol);
      if (std::isinf(v)) throw Error(Errc::not_a_bounded, "block is not A-bounded", i, j);
      h(i, j) = v;
    }
  return h;
}

}  // namespace semihilb
