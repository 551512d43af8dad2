#pragma once

#include "semihilb/blockops.hpp"
#include "semihilb/radii.hpp"

#include <array>
#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace semihilb {

enum class BoundId { thf1, r2, th2, diag_offdiag, re_im, maxdiag, prior };

inline constexpr std::array<BoundId, 7> kAllBounds = {BoundId::thf1,    BoundId::r2,    BoundId::th2,
                                                      BoundId::diag_offdiag, BoundId::re_im,
                                                      BoundId::maxdiag, BoundId::prior};

inline const char* bound_key(BoundId id) {
  switch (id) {
    case BoundId::thf1: return "B1_thf1";
    case BoundId::r2: return "B2_r2";
    case BoundId::th2: return "B3_th2";
    case BoundId::diag_offdiag: return "B4_diag_offdiag";
    case BoundId::re_im: return "B5_re_im";
    case BoundId::maxdiag: return "B6_maxdiag";
    case BoundId::prior: return "B7_prior";
  }
  return "?";
}

/// Block-level ingredients of the bounds, computed on first use and cached.
/// Every accessor requires all blocks to admit an A-adjoint.
class BlockQuantities {
 public:
  BlockQuantities(const BlockMatrix& bm, const ToleranceConfig& tol) : bm_(bm), tol_(tol) {}
  BlockQuantities(BlockMatrix&&, const ToleranceConfig&) = delete;

  int d() const { return bm_.d(); }
  const BlockMatrix& blocks() const { return bm_; }
  const ToleranceConfig& tol() const { return tol_; }

  /// T_ij^#, row-major.
  const std::vector<Matrix>& sharps() {
    if (!sharps_) {
      const int d = bm_.d();
      std::vector<Matrix> out(d * d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          const Operator t = bm_.block_op(i, j);
          if (!in_BA(t, tol_)) throw Error(Errc::block_not_in_ba, "block has no A-adjoint", i, j);
          out[i * d + j] = bm_.base_ctx()->pinv_a() * t.matrix().adjoint() * bm_.base_ctx()->a();
        }
      sharps_ = std::move(out);
    }
    return *sharps_;
  }

  /// omega_A(T_ii).
  const std::vector<double>& omega_diag() {
    if (!omega_diag_) {
      sharps();
      std::vector<double> out;
      for (int i = 0; i < d(); ++i) out.push_back(a_numerical_radius(bm_.block_op(i, i), tol_));
      omega_diag_ = std::move(out);
    }
    return *omega_diag_;
  }

  /// ||T_ij||_A.
  const RealMatrix& norms() {
    if (!norms_) {
      sharps();
      norms_ = hat_matrix(bm_, tol_);
    }
    return *norms_;
  }

  /// ||sum_j T_ij T_ij^#||_A over all j (`include_diagonal`) or over j != i.
  const std::vector<double>& gram_norms(bool include_diagonal) {
    auto& slot = include_diagonal ? gram_full_ : gram_off_;
    if (!slot) {
      const auto& sh = sharps();
      const int d = bm_.d();
      std::vector<double> out;
      for (int i = 0; i < d; ++i) {
        Matrix sum = Matrix::Zero(bm_.n(), bm_.n());
        for (int j = 0; j < d; ++j)
          if (include_diagonal || j != i) sum += bm_.block(i, j) * sh[i * d + j];
        out.push_back(a_op_norm(Operator(sum, bm_.base_ctx()), tol_));
      }
      slot = std::move(out);
    }
    return *slot;
  }

  /// ||Re_A(T_ii)||_A and ||Im_A(T_ii)||_A.
  const std::vector<std::pair<double, double>>& cartesian_norms() {
    if (!cartesian_) {
      sharps();
      std::vector<std::pair<double, double>> out;
      for (int i = 0; i < d(); ++i) {
        const Operator t = bm_.block_op(i, i);
        out.emplace_back(a_op_norm(re_A(t, tol_), tol_), a_op_norm(im_A(t, tol_), tol_));
      }
      cartesian_ = std::move(out);
    }
    return *cartesian_;
  }

  /// s_ij = omega of [[0, T_ij], [T_ji, 0]] for i != j; omega_A(T_ii) on the
  /// diagonal. Both orders of each pair are evaluated and must agree.
  const RealMatrix& th2_matrix() {
    if (!th2_) {
      const auto& od = omega_diag();
      const int d = bm_.d();
      RealMatrix s(d, d);
      for (int i = 0; i < d; ++i) {
        s(i, i) = od[i];
        for (int j = 0; j < d; ++j)
          if (i != j) s(i, j) = omega_offdiag(bm_.block_op(i, j), bm_.block_op(j, i), tol_);
      }
      for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
          const double scale = 1.0 + std::max(s(i, j), s(j, i));
          if (std::abs(s(i, j) - s(j, i)) > 1e-10 * scale)
            throw Error(Errc::route_disagreement, "off-diagonal radius not symmetric", i, j);
          s(i, j) = s(j, i) = (s(i, j) + s(j, i)) / 2.0;
        }
      th2_ = std::move(s);
    }
    return *th2_;
  }

 private:
  const BlockMatrix& bm_;
  ToleranceConfig tol_;
  std::optional<std::vector<Matrix>> sharps_;
  std::optional<std::vector<double>> omega_diag_;
  std::optional<RealMatrix> norms_;
  std::optional<std::vector<double>> gram_full_, gram_off_;
  std::optional<std::vector<std::pair<double, double>>> cartesian_;
  std::optional<RealMatrix> th2_;
};

namespace detail {

/// sqrt for quantities that are nonnegative up to rounding.
inline double clamped_sqrt(double x) {
  if (x < -1e-12) throw Error(Errc::not_positive, "negative argument to sqrt: " + std::to_string(x));
  return std::sqrt(std::max(0.0, x));
}

}  // namespace detail

inline double bound_thf1(BlockQuantities& q) {
  const auto& norms = q.norms();
  const auto& gram = q.gram_norms(true);
  double sum = 0.0;
  for (int i = 0; i < q.d(); ++i) sum += norms(i, i) + detail::clamped_sqrt(gram[i]);
  return 0.5 * sum;
}

inline double bound_r2(BlockQuantities& q) {
  const auto& od = q.omega_diag();
  const auto& norms = q.norms();
  double diag = 0.0;
  for (double w : od) diag += w;
  return 0.5 * diag + 0.25 * (q.d() + norms.array().square().sum());
}

inline double bound_th2(BlockQuantities& q) {
  const RealMatrix& s = q.th2_matrix();
  return classical_numerical_radius(s.cast<Complex>(), q.tol()).value;
}

inline double bound_prior(BlockQuantities& q) {
  const auto& od = q.omega_diag();
  RealMatrix t = q.norms();
  for (int i = 0; i < q.d(); ++i) t(i, i) = od[i];
  // numerical radius of a nonnegative matrix is r(t + t^T) / 2
  const RealMatrix sym = t + t.transpose();
  return linalg::hermitian_eigenvalues(sym.cast<Complex>()).cwiseAbs().maxCoeff() / 2.0;
}

inline double bound_diag_offdiag(BlockQuantities& q) {
  const auto& od = q.omega_diag();
  const auto& norms = q.norms();
  double sum = 0.0;
  for (int i = 0; i < q.d(); ++i) {
    double off = 0.0;
    for (int j = 0; j < q.d(); ++j)
      if (j != i) off += norms(i, j) * norms(i, j);
    sum += od[i] + detail::clamped_sqrt(od[i] * od[i] + off);
  }
  return 0.5 * sum;
}

inline double bound_re_im(BlockQuantities& q) {
  const auto& cart = q.cartesian_norms();
  const auto& norms = q.norms();
  double sum = 0.0;
  for (int i = 0; i < q.d(); ++i) {
    double off = 0.0;
    for (int j = 0; j < q.d(); ++j)
      if (j != i) off += norms(i, j) * norms(i, j);
    const auto [re, im] = cart[i];
    const double lambda = re + detail::clamped_sqrt(re * re + off);
    const double mu = im + detail::clamped_sqrt(im * im + off);
    sum += std::sqrt(lambda * lambda + mu * mu);
  }
  return 0.5 * sum;
}

inline double bound_maxdiag(BlockQuantities& q) {
  const auto& od = q.omega_diag();
  const auto& gram = q.gram_norms(false);
  double sum = 0.0;
  for (double g : gram) sum += detail::clamped_sqrt(g);
  return *std::max_element(od.begin(), od.end()) + 0.5 * sum;
}

inline double evaluate_bound(BoundId id, BlockQuantities& q) {
  switch (id) {
    case BoundId::thf1: return bound_thf1(q);
    case BoundId::r2: return bound_r2(q);
    case BoundId::th2: return bound_th2(q);
    case BoundId::diag_offdiag: return bound_diag_offdiag(q);
    case BoundId::re_im: return bound_re_im(q);
    case BoundId::maxdiag: return bound_maxdiag(q);
    case BoundId::prior: return bound_prior(q);
  }
  return 0.0;
}

// Standalone forms.
inline double bound_thf1(const BlockMatrix& bm, const ToleranceConfig& tol = {}) {
  BlockQuantities q(bm, tol);
  return bound_thf1(q);
}
inline double bound_r2(const BlockMatrix& bm, const ToleranceConfig& tol = {}) {
  BlockQuantities q(bm, tol);
  return bound_r2(q);
}
inline double bound_th2(const BlockMatrix& bm, const ToleranceConfig& tol = {}) {
  BlockQuantities q(bm, tol);
  return bound_th2(q);
}
inline double bound_prior(const BlockMatrix& bm, const ToleranceConfig& tol = {}) {
  BlockQuantities q(bm, tol);
  return bound_prior(q);
}
inline double bound_diag_offdiag(const BlockMatrix& bm, const ToleranceConfig& tol = {}) {
  BlockQuantities q(bm, tol);
  return bound_diag_offdiag(q);
}
inline double bound_re_im(const BlockMatrix& bm, const ToleranceConfig& tol = {}) {
  BlockQuantities q(bm, tol);
  return bound_re_im(q);
}
inline double bound_maxdiag(const BlockMatrix& bm, const ToleranceConfig& tol = {}) {
  BlockQuantities q(bm, tol);
  return bound_maxdiag(q);
}

struct BoundReport {
  std::string instance_id;
  double omega = 0.0;
  std::array<double, 7> bounds{};
  std::array<double, 7> gaps{};
  std::array<bool, 7> holds{};
  bool refinement_ok = false;
  std::array<double, 7> seconds{};  // wall time per bound, excluded from serialized reports

  bool all_hold() const {
    for (bool h : holds)
      if (!h) return false;
    return true;
  }
  double min_gap() const { return *std::min_element(gaps.begin(), gaps.end()); }
  double bound(BoundId id) const { return bounds[static_cast<int>(id)]; }
  double gap(BoundId id) const { return gaps[static_cast<int>(id)]; }
  bool held(BoundId id) const { return holds[static_cast<int>(id)]; }
};

/// Test hook: may rewrite bound values before the hold flags are computed.
using BoundHook = std::function<void(std::array<double, 7>&)>;

/// omega_A of the assembled operator under the lifted context.
inline double block_omega(const BlockMatrix& bm, const ToleranceConfig& tol = {}) {
  return a_numerical_radius(flatten(bm), tol);
}

inline BoundReport evaluate_all(const BlockMatrix& bm, const ToleranceConfig& tol = {},
                                const std::string& instance_id = {}, const BoundHook& hook = {}) {
  using clock = std::chrono::steady_clock;
  BoundReport r;
  r.instance_id = instance_id;
  try {
    BlockQuantities q(bm, tol);
    q.sharps();
    r.omega = block_omega(bm, tol);
    for (BoundId id : kAllBounds) {
      const auto start = clock::now();
      r.bounds[static_cast<int>(id)] = evaluate_bound(id, q);
      r.seconds[static_cast<int>(id)] = std::chrono::duration<double>(clock::now() - start).count();
    }
  } catch (const Error& e) {
    if (instance_id.empty()) throw;
    throw e.with_prefix(instance_id);
  }
  if (hook) hook(r.bounds);

  const double slack = tol.cmp_atol * (1.0 + r.omega);
  for (int k = 0; k < 7; ++k) {
    r.gaps[k] = r.bounds[k] - r.omega;
    r.holds[k] = r.gaps[k] >= -slack;
  }
  const double b3 = r.bound(BoundId::th2);
  const double b7 = r.bound(BoundId::prior);
  r.refinement_ok = b3 <= b7 + tol.cmp_atol * (1.0 + b7);
  return r;
}

}  // namespace semihilb
