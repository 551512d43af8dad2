#include "oracles.hpp"
#include "support.hpp"

using namespace testing_support;

TEST(Context, RankDeficientDiagonal) {
  auto c = make_context(d2(2, 0));
  EXPECT_EQ(c->rank(), 1);
  EXPECT_LT(max_abs(c->pinv_a() - d2(0.5, 0)), 1e-14);
  EXPECT_LT(max_abs(c->proj_range() - d2(1, 0)), 1e-14);
}

TEST(Context, Identity) {
  auto c = make_context(linalg::identity(2));
  EXPECT_LT(max_abs(c->pinv_a() - linalg::identity(2)), 1e-14);
  EXPECT_LT(max_abs(c->sqrt_a() - linalg::identity(2)), 1e-14);
  EXPECT_LT(max_abs(c->proj_range() - linalg::identity(2)), 1e-14);
}

TEST(Context, SquareRootMatchesIndependentDecomposition) {
  const Matrix a = m2(2, 1, 1, 2);
  auto c = make_context(a);
  EXPECT_NEAR(c->eigvals()(0), 3.0, 1e-12);
  EXPECT_NEAR(c->eigvals()(1), 1.0, 1e-12);
  // Eigenvectors (1,1)/sqrt2 and (1,-1)/sqrt2 by hand.
  Matrix v = m2(1, 1, 1, -1) / std::sqrt(2.0);
  const Matrix root = v * d2(std::sqrt(3.0), 1.0) * v.adjoint();
  EXPECT_LT(max_abs(c->sqrt_a() - root), 1e-12);
  EXPECT_LT(max_abs(c->sqrt_a() * c->sqrt_a() - a), 1e-12);
}

TEST(Context, Errors) {
  EXPECT_THROW(make_context(m2(1, 1, 0, 1)), Error);
  try {
    make_context(m2(1, 1, 0, 1));
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_hermitian);
  }
  try {
    make_context(d2(1, -0.5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_positive);
  }
  try {
    make_context(d2(0, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::zero_operator);
  }
  try {
    make_context(Matrix::Zero(2, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::dimension_mismatch);
  }
}

TEST(Context, SmallNegativeEigenvalueIsClamped) {
  auto c = make_context(d2(1, -1e-12));
  EXPECT_EQ(c->rank(), 1);
  EXPECT_EQ(c->eigvals()(1), 0.0);
}

TEST(Context, CutoffTruncatesTinyEigenvalues) {
  auto c = make_context(d2(1, 1e-12));
  EXPECT_EQ(c->rank(), 1);
  EXPECT_LT(max_abs(c->a() - d2(1, 0)), 1e-15);
}

TEST(Context, SpectralCachesAreConsistent) {
  for (std::uint64_t k = 0; k < 40; ++k) {
    auto c = draw(k, 6).ctx;
    EXPECT_LT(max_abs(c->a() * c->pinv_a() - c->proj_range()), 1e-10);
    EXPECT_LT(max_abs(c->sqrt_a() * c->pinv_sqrt_a() - c->proj_range()), 1e-10);
    EXPECT_LT(max_abs(c->pinv_a() * c->sqrt_a() - c->pinv_sqrt_a()), 1e-10);
    EXPECT_LT(max_abs(c->sqrt_a() * c->pinv_a() - c->pinv_sqrt_a()), 1e-10);
  }
}

TEST(Context, PenroseIdentities) {
  for (Index n = 1; n <= 8; ++n)
    for (Index r = 1; r <= n; ++r) {
      auto c = gen_psd(n, r, 100 * n + r);
      const Matrix& a = c->a();
      const Matrix& p = c->pinv_a();
      EXPECT_EQ(c->rank(), r);
      EXPECT_LT(max_abs(a * p * a - a), 1e-10);
      EXPECT_LT(max_abs(p * a * p - p), 1e-10);
      EXPECT_LT(max_abs((a * p).adjoint() - a * p), 1e-10);
      EXPECT_LT(max_abs((p * a).adjoint() - p * a), 1e-10);
      EXPECT_LT(max_abs(p - oracle::pinv(a, 1e-8)), 1e-8);
    }
}

TEST(SemiInner, Examples) {
  Vector x(2), y(2);
  x << 0, 5;
  EXPECT_EQ(semi_inner(x, x, *make_context(d2(1, 0))), Complex(0, 0));
  x << 1, Complex(0, 1);
  y << 1, 0;
  EXPECT_NEAR(std::abs(semi_inner(x, y, *make_context(linalg::identity(2))) - 1.0), 0.0, 1e-15);
  x << 1, 0;
  y << 0, 1;
  EXPECT_NEAR(std::abs(semi_inner(x, y, *make_context(m2(2, 1, 1, 2))) - 1.0), 0.0, 1e-15);
}

TEST(SemiInner, ConjugateLinearInSecondArgument) {
  auto c = make_context(m2(2, 1, 1, 2));
  Vector x(2), y(2);
  x << 1, Complex(0, 2);
  y << Complex(3, 1), -1;
  const Complex s(0.5, -2);
  EXPECT_LT(std::abs(semi_inner(x, s * y, *c) - std::conj(s) * semi_inner(x, y, *c)), 1e-12);
  EXPECT_LT(std::abs(semi_inner(s * x, y, *c) - s * semi_inner(x, y, *c)), 1e-12);
  EXPECT_GE(semi_norm(x, *c), 0.0);
  EXPECT_THROW(semi_inner(Vector::Zero(3), y, *c), Error);
}

TEST(Membership, Examples) {
  auto full = make_context(m2(2, 1, 1, 2));
  auto e1 = make_context(d2(1, 0));
  EXPECT_TRUE(in_BA(Operator(m2(0, 1, 0, 0), full)));
  EXPECT_TRUE(in_BA(Operator(m2(5, -1, 3, 2), full)));
  EXPECT_FALSE(in_BA(Operator(m2(0, 1, 0, 0), e1)));
  EXPECT_TRUE(in_BA(Operator(m2(1, 0, 3, 7), e1)));
  EXPECT_TRUE(in_BA_half(Operator(m2(0, 1, 0, 0), full)));
  EXPECT_FALSE(in_BA_half(Operator(m2(0, 1, 0, 0), e1)));
  EXPECT_TRUE(in_BA_half(Operator(m2(1, 0, 3, 7), e1)));
}

TEST(Membership, BAImpliesBAHalf) {
  for (std::uint64_t k = 0; k < 100; ++k) {
    const Draw d = draw(k);
    ASSERT_TRUE(in_BA(d.t));
    EXPECT_TRUE(in_BA_half(d.t));
  }
}

TEST(Operator, DimensionMismatch) {
  auto c = make_context(linalg::identity(2));
  EXPECT_THROW(Operator(Matrix::Zero(3, 3), c), Error);
  auto c3 = make_context(linalg::identity(3));
  EXPECT_THROW(Operator(Matrix::Zero(2, 2), c) + Operator(Matrix::Zero(3, 3), c3), Error);
}

TEST(AAdjoint, Examples) {
  auto id = make_context(linalg::identity(2));
  EXPECT_LT(max_abs(a_adjoint(Operator(m2(0, 1, 0, 0), id)).matrix() - m2(0, 0, 1, 0)), 1e-15);
  auto e1 = make_context(d2(1, 0));
  EXPECT_LT(max_abs(a_adjoint(Operator(m2(2, 0, 3, 4), e1)).matrix() - d2(2, 0)), 1e-15);
  for (std::uint64_t k = 0; k < 20; ++k) {
    auto c = draw(k).ctx;
    const Operator p(c->proj_range(), c);
    EXPECT_LT(max_abs(a_adjoint(p).matrix() - c->proj_range()), 1e-10);
  }
}

TEST(AAdjoint, RejectsNonMembers) {
  auto e1 = make_context(d2(1, 0));
  try {
    a_adjoint(Operator(m2(0, 1, 0, 0), e1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_in_ba);
  }
}

TEST(AAdjoint, DouglasEquationAndDoubleSharp) {
  for (std::uint64_t k = 0; k < 200; ++k) {
    const Draw d = draw(k, 5);
    const PsdContext& c = *d.ctx;
    const Matrix& t = d.t.matrix();
    const double scale = 1.0 + c.norm() * linalg::spectral_norm(t);
    const Operator s = a_adjoint(d.t);
    EXPECT_LT(linalg::spectral_norm(c.a() * s.matrix() - t.adjoint() * c.a()), 1e-10 * scale);
    const Matrix& p = c.proj_range();
    EXPECT_LT(max_abs(a_adjoint(s).matrix() - p * t * p), 1e-10 * scale);
    EXPECT_NEAR(a_op_norm(s), a_op_norm(d.t), 1e-9 * scale);
  }
}

TEST(Reduce, Examples) {
  auto id = make_context(linalg::identity(2));
  const Matrix t = m2(1, 2, 3, Complex(0, 4));
  EXPECT_LT(max_abs(reduce(Operator(t, id)) - t), 1e-14);
  auto four = make_context(d2(4, 0));
  EXPECT_LT(max_abs(reduce(Operator(m2(3, 0, 5, 6), four)) - d2(3, 0)), 1e-14);
  for (std::uint64_t k = 0; k < 20; ++k) {
    auto c = draw(k).ctx;
    EXPECT_LT(max_abs(reduce(Operator(c->proj_range(), c)) - c->proj_range()), 1e-10);
  }
  auto e1 = make_context(d2(1, 0));
  try {
    reduce(Operator(m2(0, 1, 0, 0), e1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_a_bounded);
  }
}

TEST(Reduce, Homomorphism) {
  for (std::uint64_t k = 0; k < 200; ++k) {
    const Draw d = draw(k, 5);
    const Operator s = gen_compatible(d.ctx, mix_seed(k, 99), Ensemble::ginibre);
    const Matrix lhs = reduce(d.t * s);
    const Matrix rhs = reduce(d.t) * reduce(s);
    EXPECT_LT(max_abs(lhs - rhs), 1e-9 * (1.0 + max_abs(lhs)));
    EXPECT_LT(max_abs(reduce(a_adjoint(d.t)) - reduce(d.t).adjoint()), 1e-10 * (1.0 + max_abs(lhs)));
  }
}

TEST(AOpNorm, Examples) {
  auto id = make_context(linalg::identity(2));
  EXPECT_NEAR(a_op_norm(Operator(m2(0, 1, 0, 0), id)), 1.0, 1e-12);
  auto e1 = make_context(d2(1, 0));
  EXPECT_NEAR(a_op_norm(Operator(d2(2, 5), e1)), 2.0, 1e-12);
  EXPECT_TRUE(std::isinf(a_op_norm(Operator(m2(0, 1, 0, 0), e1))));
}

TEST(AOpNorm, MatchesSampledSupremum) {
  for (std::uint64_t k = 0; k < 5; ++k) {
    auto c = gen_psd(3, 2, 500 + k);
    const Operator t = gen_compatible(c, 600 + k, Ensemble::ginibre);
    const double norm = a_op_norm(t);
    const double sup = oracle::sup_norm(c->a(), t.matrix(), 100000, k);
    EXPECT_LE(sup, norm + 1e-9);
    EXPECT_NEAR(sup, norm, 1e-3);
  }
}

TEST(AOpNorm, AgreesWithSvdOfFullReduction) {
  for (std::uint64_t k = 0; k < 100; ++k) {
    const Draw d = draw(k, 6);
    EXPECT_NEAR(a_op_norm(d.t), oracle::svd_norm(d.ctx->sqrt_a() * d.t.matrix() * d.ctx->pinv_sqrt_a()), 1e-10);
  }
}

TEST(AOpNorm, SquareOfNormIsNormOfSharpProduct) {
  for (std::uint64_t k = 0; k < 200; ++k) {
    const Draw d = draw(k, 5);
    const double n = a_op_norm(d.t);
    const double scale = 1.0 + n * n;
    EXPECT_NEAR(n * n, a_op_norm(a_adjoint(d.t) * d.t), 1e-8 * scale);
  }
}

TEST(AOpNorm, BilinearSupremum) {
  for (std::uint64_t k = 0; k < 4; ++k) {
    const Draw d = draw(k, 4);
    const double norm = a_op_norm(d.t);
    const double sup = oracle::sup_inner(d.ctx->a(), d.t.matrix(), 50000, k);
    EXPECT_LE(sup, norm + 1e-9);
    EXPECT_NEAR(sup, norm, 1e-3 * (1.0 + norm));
  }
}

TEST(ASelfadjoint, Detection) {
  auto e1 = make_context(d2(1, 0));
  EXPECT_TRUE(is_a_selfadjoint(Operator(m2(1, 0, 3, 4), e1)));
  auto id = make_context(linalg::identity(2));
  EXPECT_FALSE(is_a_selfadjoint(Operator(m2(0, 1, 0, 0), id)));
}

TEST(Io, ContextRoundTrip) {
  auto c = gen_psd(3, 2, 7);
  auto back = io::context_from_json(io::context_to_json(*c));
  EXPECT_LT(max_abs(back->a() - c->a()), 1e-15);
  EXPECT_EQ(back->rank(), 2);
}

TEST(Io, MatrixFormats) {
  const auto pairs = io::json::parse("[[[1,0],[0,2]],[[3,-1],[4,0]]]");
  EXPECT_EQ(max_abs(io::matrix_from_json(pairs) - m2(1, Complex(0, 2), Complex(3, -1), 4)), 0.0);
  const auto reals = io::json::parse("[[1,2],[3,4]]");
  EXPECT_EQ(max_abs(io::matrix_from_json(reals) - m2(1, 2, 3, 4)), 0.0);
  const auto flat = io::json::parse("[[1,0],[2,0],[3,0],[4,0]]");
  EXPECT_EQ(max_abs(io::matrix_from_json(flat) - m2(1, 2, 3, 4)), 0.0);
  EXPECT_THROW(io::matrix_from_json(io::json::parse("[1,2,3]")), Error);
  EXPECT_THROW(io::matrix_from_json(io::json::parse("[[1,2],[3]]")), Error);
}
