#pragma once

#include "semihilb/core.hpp"
#include "semihilb/theta_search.hpp"

#include <utility>
#include <vector>

namespace semihilb {

/// omega(M) = sup_theta lambda_max((e^{i theta} M + e^{-i theta} M*) / 2).
inline ThetaSearchResult classical_numerical_radius(const Matrix& m, const ToleranceConfig& tol = {}) {
  if (m.rows() != m.cols()) throw Error(Errc::dimension_mismatch, "matrix must be square");
  if (m.size() == 0) return {};
  const Matrix adj = m.adjoint();
  Matrix h(m.rows(), m.cols());
  // The Hermitian part at theta + pi is the negation of the one at theta.
  auto paired = [&](double theta) {
    const Complex z = std::polar(1.0, theta);
    h.noalias() = (z * m + std::conj(z) * adj) / 2.0;
    const RealVector ev = linalg::hermitian_eigenvalues(h);
    return std::make_pair(ev.maxCoeff(), -ev.minCoeff());
  };
  return maximize_over_circle_paired(paired, tol);
}

inline double classical_spectral_radius(const Matrix& m) {
  if (m.rows() != m.cols()) throw Error(Errc::dimension_mismatch, "matrix must be square");
  return linalg::spectral_radius(m);
}

inline Operator re_A(const Operator& op, const ToleranceConfig& tol = {}) {
  const Operator sharp = a_adjoint(op, tol);
  return Operator((op.matrix() + sharp.matrix()) / 2.0, op.context_ptr());
}

inline Operator im_A(const Operator& op, const ToleranceConfig& tol = {}) {
  const Operator sharp = a_adjoint(op, tol);
  return Operator((op.matrix() - sharp.matrix()) / Complex(0.0, 2.0), op.context_ptr());
}

/// sup_theta ||Re_A(e^{i theta} T)||_A, evaluated literally: the A-adjoint is
/// formed as A^+ T* A and the seminorm is taken of each real part.
inline ThetaSearchResult a_numerical_radius_theta_route(const Operator& op,
                                                        const ToleranceConfig& tol = {}) {
  const Matrix sharp = a_adjoint(op, tol).matrix();
  const PsdContext& c = op.context();
  const Matrix t_red = detail::reduce_compressed(c, op.matrix());
  const Matrix sharp_red = detail::reduce_compressed(c, sharp);
  Matrix re(t_red.rows(), t_red.cols());
  auto paired = [&](double theta) {
    const Complex z = std::polar(1.0, theta);
    re.noalias() = (z * t_red + std::conj(z) * sharp_red) / 2.0;
    const double v = linalg::spectral_norm(re);
    return std::make_pair(v, v);
  };
  return maximize_over_circle_paired(paired, tol);
}

/// omega_A(T) computed as omega(reduce(T)). When T admits an A-adjoint the
/// theta route is evaluated too and the two must agree to cmp_atol * (1 + omega).
inline double a_numerical_radius(const Operator& op, const ToleranceConfig& tol = {}) {
  if (!in_BA_half(op, tol)) throw Error(Errc::not_a_bounded, "operator is not A-bounded");
  const Matrix reduced = detail::reduce_compressed(op.context(), op.matrix());
  const double primary = classical_numerical_radius(reduced, tol).value;
  if (in_BA(op, tol)) {
    const double other = a_numerical_radius_theta_route(op, tol).value;
    if (std::abs(primary - other) > tol.cmp_atol * (1.0 + primary))
      throw Error(Errc::route_disagreement, "reduction route " + std::to_string(primary) +
                                                " vs theta route " + std::to_string(other));
  }
  return primary;
}

/// ||T^k||_A^{1/k} for k = 1, 2, 4, ..., up to gelfand_max_power.
/// Powers are taken of the normalised reduction to stay in range.
inline std::vector<std::pair<int, double>> gelfand_sequence(const Operator& op,
                                                            const ToleranceConfig& tol = {}) {
  if (!in_BA_half(op, tol)) throw Error(Errc::not_a_bounded, "operator is not A-bounded");
  const Matrix reduced = detail::reduce_compressed(op.context(), op.matrix());
  const double s = linalg::spectral_norm(reduced);
  std::vector<std::pair<int, double>> seq;
  if (s == 0.0) {
    for (int k = 1; k <= tol.gelfand_max_power; k *= 2) seq.emplace_back(k, 0.0);
    return seq;
  }
  Matrix power = reduced / s;
  for (int k = 1; k <= tol.gelfand_max_power; k *= 2) {
    seq.emplace_back(k, s * std::pow(linalg::spectral_norm(power), 1.0 / k));
    power = power * power;
  }
  return seq;
}

/// r_A(T) = r(reduce(T)). The Gelfand sequence is checked to stay above it,
/// since r_A is the infimum of that sequence.
inline double a_spectral_radius(const Operator& op, const ToleranceConfig& tol = {}) {
  if (!in_BA_half(op, tol)) throw Error(Errc::not_a_bounded, "operator is not A-bounded");
  const Matrix reduced = detail::reduce_compressed(op.context(), op.matrix());
  const linalg::SpectralRadiusEstimate est = linalg::spectral_radius_estimate(reduced);
  const double primary = est.radius;
  const double s = linalg::spectral_norm(reduced);
  const double slack = std::max(tol.cmp_atol, 1e-7) * (1.0 + s) + est.uncertainty;
  for (auto [k, g] : gelfand_sequence(op, tol)) {
    if (g < primary - slack)
      throw Error(Errc::gelfand_divergence, "||T^" + std::to_string(k) + "||^(1/" + std::to_string(k) +
                                                ") = " + std::to_string(g) + " < " + std::to_string(primary));
  }
  return primary;
}

/// (1/2) sup_theta ||e^{i theta} T + e^{-i theta} S^#||_A, which is the
/// numerical radius of [[0, T], [S, 0]] under diag(A, A).
inline double omega_offdiag(const Operator& t, const Operator& s, const ToleranceConfig& tol = {}) {
  detail::require_same_context(t, s);
  if (!in_BA(t, tol)) throw Error(Errc::not_in_ba, "first operator has no A-adjoint");
  const Matrix s_sharp = a_adjoint(s, tol).matrix();
  const PsdContext& c = t.context();
  const Matrix t_red = detail::reduce_compressed(c, t.matrix());
  const Matrix s_red = detail::reduce_compressed(c, s_sharp);
  Matrix m(t_red.rows(), t_red.cols());
  auto paired = [&](double theta) {
    const Complex z = std::polar(1.0, theta);
    m.noalias() = z * t_red + std::conj(z) * s_red;
    const double v = linalg::spectral_norm(m);
    return std::make_pair(v, v);
  };
  return 0.5 * maximize_over_circle_paired(paired, tol).value;
}

}  // namespace semihilb
