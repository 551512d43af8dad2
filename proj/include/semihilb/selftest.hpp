#pragma once

#include "semihilb/blockops.hpp"
#include "semihilb/bounds.hpp"
#include "semihilb/generators.hpp"
#include "semihilb/radii.hpp"

#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

namespace semihilb {

struct SelftestCase {
  std::string name;
  bool ok = false;
  std::string detail;
};

namespace detail {

inline Matrix mat2(Complex a, Complex b, Complex c, Complex d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

inline Matrix diag2(double a, double b) { return mat2(a, 0, 0, b); }

class SelftestRecorder {
 public:
  void expect_near(const std::string& name, double got, double want, double atol) {
    std::ostringstream os;
    os.precision(17);
    os << "got " << got << ", want " << want;
    add(name, std::abs(got - want) <= atol, os.str());
  }

  void expect_true(const std::string& name, bool ok, const std::string& detail = {}) { add(name, ok, detail); }

  void expect_error(const std::string& name, Errc code, const std::function<void()>& f) {
    try {
      f();
      add(name, false, "no error raised");
    } catch (const Error& e) {
      add(name, e.code() == code, std::string("raised ") + errc_name(e.code()));
    }
  }

  void guard(const std::string& name, const std::function<void()>& f) {
    try {
      f();
    } catch (const std::exception& e) {
      add(name, false, std::string("unexpected exception: ") + e.what());
    }
  }

  std::vector<SelftestCase> take() { return std::move(cases_); }

 private:
  void add(const std::string& name, bool ok, const std::string& detail) { cases_.push_back({name, ok, detail}); }
  std::vector<SelftestCase> cases_;
};

inline void golden_core(SelftestRecorder& rec) {
  rec.guard("core", [&] {
    auto c = make_context(diag2(2, 0));
    rec.expect_true("context.rank_deficient", c->rank() == 1);
    rec.expect_near("context.pinv", linalg::max_abs(c->pinv_a() - diag2(0.5, 0)), 0, 1e-14);
    rec.expect_near("context.projection", linalg::max_abs(c->proj_range() - diag2(1, 0)), 0, 1e-14);

    auto full = make_context(mat2(2, 1, 1, 2));
    rec.expect_near("context.sqrt_squared", linalg::max_abs(full->sqrt_a() * full->sqrt_a() - full->a()), 0, 1e-12);
    rec.expect_near("semi_inner.offdiag", std::abs(semi_inner(Vector::Unit(2, 0), Vector::Unit(2, 1), *full) - 1.0),
                    0, 1e-14);

    auto e1 = make_context(diag2(1, 0));
    rec.expect_true("in_BA.rejects_null_to_range", !in_BA(Operator(mat2(0, 1, 0, 0), e1)));
    rec.expect_true("in_BA.accepts_lower", in_BA(Operator(mat2(1, 0, 3, 7), e1)));
    rec.expect_true("in_BA_half.rejects", !in_BA_half(Operator(mat2(0, 1, 0, 0), e1)));
    rec.expect_near("a_adjoint.rank_one", linalg::max_abs(a_adjoint(Operator(mat2(2, 0, 3, 4), e1)).matrix() - diag2(2, 0)),
                    0, 1e-14);
    rec.expect_error("a_adjoint.not_in_ba", Errc::not_in_ba, [&] { a_adjoint(Operator(mat2(0, 1, 0, 0), e1)); });

    auto four = make_context(diag2(4, 0));
    rec.expect_near("reduce.rank_one", linalg::max_abs(reduce(Operator(mat2(3, 0, 5, 6), four)) - diag2(3, 0)), 0, 1e-14);
    rec.expect_near("a_op_norm.null_ignored", a_op_norm(Operator(diag2(2, 5), e1)), 2, 1e-12);
    rec.expect_true("a_op_norm.unbounded_is_inf", std::isinf(a_op_norm(Operator(mat2(0, 1, 0, 0), e1))));
    rec.expect_error("context.not_positive", Errc::not_positive, [] { make_context(diag2(1, -1)); });
    rec.expect_error("context.zero", Errc::zero_operator, [] { make_context(diag2(0, 0)); });
  });
}

inline void golden_radii(SelftestRecorder& rec) {
  rec.guard("radii", [&] {
    const double tol = 1e-9;
    rec.expect_near("omega.jordan", classical_numerical_radius(mat2(0, 1, 0, 0)).value, 0.5, tol);
    rec.expect_near("omega.hermitian", classical_numerical_radius(diag2(1, -1)).value, 1.0, tol);
    rec.expect_near("omega.jordan_scaled", classical_numerical_radius(mat2(0, 2, 0, 0)).value, 1.0, tol);
    rec.expect_near("spectral_radius.diag", classical_spectral_radius(diag2(3, -5)), 5.0, tol);
    rec.expect_near("spectral_radius.swap", classical_spectral_radius(mat2(0, 2, 3, 0)), std::sqrt(6.0), tol);

    auto id = make_context(linalg::identity(2));
    auto e1 = make_context(diag2(1, 0));
    rec.expect_near("omega_A.nilpotent", a_numerical_radius(Operator(mat2(0, 1, 0, 0), id)), 0.5, tol);
    rec.expect_near("omega_A.selfadjoint", a_numerical_radius(Operator(diag2(1, -1), id)), 1.0, tol);
    rec.expect_near("omega_A.rank_one", a_numerical_radius(Operator(mat2(1, 0, 3, 4), e1)), 1.0, tol);
    rec.expect_near("r_A.nilpotent", a_spectral_radius(Operator(mat2(0, 1, 0, 0), id)), 0.0, 1e-7);
    rec.expect_near("r_A.selfadjoint", a_spectral_radius(Operator(diag2(1, -1), id)), 1.0, tol);

    const Operator re = re_A(Operator(mat2(1, 0, 3, 4), e1));
    rec.expect_near("re_A.rank_one", linalg::max_abs(re.matrix() - mat2(1, 0, 1.5, 2)), 0, 1e-14);

    const Operator ident(linalg::identity(2), id);
    const Operator zero(Matrix::Zero(2, 2), id);
    rec.expect_near("omega_offdiag.identity", omega_offdiag(ident, ident), 1.0, tol);
    rec.expect_near("omega_offdiag.one_sided", omega_offdiag(ident, zero), 0.5, tol);
    rec.expect_near("omega_offdiag.jordan_pair",
                    omega_offdiag(Operator(mat2(0, 1, 0, 0), id), Operator(mat2(0, 0, 1, 0), id)), 1.0, tol);
  });
}

inline void golden_bounds(SelftestRecorder& rec) {
  rec.guard("bounds", [&] {
    auto id = make_context(linalg::identity(2));
    const Matrix z = Matrix::Zero(2, 2);
    const BlockMatrix witness = assemble({{z, linalg::identity(2)}, {z, z}}, id);
    const BoundReport r = evaluate_all(witness);
    const double tol = 1e-9;
    rec.expect_near("witness.omega", r.omega, 0.5, tol);
    rec.expect_near("witness.thf1", r.bound(BoundId::thf1), 0.5, tol);
    rec.expect_near("witness.r2", r.bound(BoundId::r2), 0.75, tol);
    rec.expect_near("witness.th2", r.bound(BoundId::th2), 0.5, tol);
    rec.expect_near("witness.diag_offdiag", r.bound(BoundId::diag_offdiag), 0.5, tol);
    rec.expect_near("witness.re_im", r.bound(BoundId::re_im), std::sqrt(2.0) / 2.0, tol);
    rec.expect_near("witness.maxdiag", r.bound(BoundId::maxdiag), 0.5, tol);
    rec.expect_near("witness.prior", r.bound(BoundId::prior), 0.5, tol);
    rec.expect_true("witness.all_hold", r.all_hold());

    const BlockMatrix zero = assemble({{z, z}, {z, z}}, id);
    rec.expect_near("zero.r2_floor", bound_r2(zero), 0.5, tol);

    const Matrix j = mat2(0, 1, 0, 0);
    rec.expect_near("prior.equal_blocks", bound_prior(assemble({{j, j}, {j, j}}, id)), 1.5, tol);

    auto one = make_context(Matrix::Identity(1, 1));
    const BlockMatrix scalar(1, {Matrix::Identity(1, 1)}, one);
    rec.expect_near("scalar.r2", bound_r2(scalar), 1.0, tol);
    const BlockMatrix herm(1, {diag2(1, -1)}, id);
    rec.expect_near("hermitian.re_im", bound_re_im(herm), 1.0, tol);
  });
}

}  // namespace detail

/// Equality-case suites over generated draws. Each entry reports the worst
/// deviation seen across `draws` instances.
inline std::vector<SelftestCase> equality_suites(int draws, std::uint64_t seed, const ToleranceConfig& tol = {}) {
  detail::SelftestRecorder rec;
  double at2 = 0.0, aself = 0.0, diag = 0.0, anti = 0.0;
  for (int k = 0; k < draws; ++k) {
    const std::uint64_t s = mix_seed(seed, static_cast<std::uint64_t>(k));
    const Index n = 2 + k % 3;
    const Index rank = 1 + static_cast<Index>(k % n);
    const ContextPtr ctx = gen_psd(n, rank, mix_seed(s, 1), tol);

    const Operator nil = gen_compatible(ctx, mix_seed(s, 2), Ensemble::nilpotent_lift);
    const double nil_norm = a_op_norm(nil, tol);
    at2 = std::max(at2, std::abs(a_numerical_radius(nil, tol) - 0.5 * nil_norm) / (1.0 + nil_norm));

    const Operator sa = gen_compatible(ctx, mix_seed(s, 3), Ensemble::a_selfadjoint);
    const double norm = a_op_norm(sa, tol);
    const double omega = a_numerical_radius(sa, tol);
    const double spec = a_spectral_radius(sa, tol);
    const double dev = std::max({std::abs(norm - omega), std::abs(norm - spec), std::abs(omega - spec)});
    aself = std::max(aself, dev / (1.0 + norm));

    const int d = 2 + k % 2;
    std::vector<Operator> entries;
    for (int i = 0; i < d; ++i) entries.push_back(gen_compatible(ctx, mix_seed(s, 10 + i), Ensemble::ginibre));
    const BlockMatrix dm = assemble_structured(entries, BlockShape::diagonal);
    const BlockMatrix am = assemble_structured(entries, BlockShape::antidiagonal);
    const double want_norm = structured_norm(entries, BlockShape::diagonal, tol);
    const double want_omega = structured_omega(entries, tol);
    diag = std::max({diag, std::abs(a_op_norm(flatten(dm), tol) - want_norm),
                     std::abs(block_omega(dm, tol) - want_omega)});
    anti = std::max(anti, std::abs(a_op_norm(flatten(am), tol) - structured_norm(entries, BlockShape::antidiagonal, tol)));
  }
  rec.expect_near("equality.nilpotent_half_norm", at2, 0.0, 1e-8);
  rec.expect_near("equality.selfadjoint_triple", aself, 0.0, 1e-8);
  rec.expect_near("equality.structured_diagonal", diag, 0.0, 1e-8);
  rec.expect_near("equality.structured_antidiagonal", anti, 0.0, 1e-8);
  return rec.take();
}

/// Golden values on hand-checked instances plus the equality suites.
inline std::vector<SelftestCase> run_selftest(int draws = 50, std::uint64_t seed = 0) {
  detail::SelftestRecorder rec;
  detail::golden_core(rec);
  detail::golden_radii(rec);
  detail::golden_bounds(rec);
  auto out = rec.take();
  try {
    for (auto& c : equality_suites(draws, seed)) out.push_back(std::move(c));
  } catch (const std::exception& e) {
    out.push_back({"equality", false, std::string("unexpected exception: ") + e.what()});
  }
  return out;
}

}  // namespace semihilb
