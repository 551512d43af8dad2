#pragma once

#include "semihilb/semihilb.hpp"

#include <gtest/gtest.h>

namespace testing_support {

using namespace semihilb;

inline Matrix m2(Complex a, Complex b, Complex c, Complex d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

inline Matrix d2(double a, double b) { return m2(a, 0, 0, b); }

struct Draw {
  ContextPtr ctx;
  Operator t;
};

/// Context of size 2..max_n with a rank cycling through 1..n, plus a
/// compatible operator.
inline Draw draw(std::uint64_t k, Index max_n = 4, Ensemble e = Ensemble::ginibre) {
  const Index n = 2 + static_cast<Index>(k % (max_n - 1));
  const Index rank = 1 + static_cast<Index>((k / 3) % n);
  ContextPtr ctx = gen_psd(n, rank, mix_seed(k, 11));
  Operator t = gen_compatible(ctx, mix_seed(k, 12), e);
  return {ctx, t};
}

inline double max_abs(const Matrix& m) { return linalg::max_abs(m); }

}  // namespace testing_support
