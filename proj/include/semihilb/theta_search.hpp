#pragma once

#include "semihilb/dense.hpp"
#include "semihilb/tolerance.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace semihilb {

struct ThetaSearchResult {
  double value = 0.0;
  double argmax_theta = 0.0;  // in [0, 2*pi)
  int samples = 0;
  bool refined = false;
};

namespace detail {

inline double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;
  return t;
}

/// Golden-section maximisation of a unimodal function on [lo, hi].
/// Returns {argmax, value}.
template <class F>
std::pair<double, double> golden_section_max(F&& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 200 && (hi - lo) > tol; ++it) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return fc >= fd ? std::make_pair(c, fc) : std::make_pair(d, fd);
}

/// Grid maximum plus golden-section refinement on [theta_{k-1}, theta_{k+1}]
/// around the three best local maxima of the periodic grid.
template <class F>
ThetaSearchResult refine_grid(const std::vector<double>& grid, F&& objective, const ToleranceConfig& tol) {
  const int n = static_cast<int>(grid.size());
  const double h = kTwoPi / n;
  ThetaSearchResult res;
  res.samples = n;
  res.value = grid[0];
  for (int k = 1; k < n; ++k) {
    if (grid[k] > res.value) {
      res.value = grid[k];
      res.argmax_theta = k * h;
    }
  }

  std::vector<int> peaks;
  for (int k = 0; k < n; ++k)
    if (grid[k] >= grid[(k + n - 1) % n] && grid[k] >= grid[(k + 1) % n]) peaks.push_back(k);
  std::stable_sort(peaks.begin(), peaks.end(), [&](int x, int y) { return grid[x] > grid[y]; });
  if (peaks.size() > 3) peaks.resize(3);

  for (int k : peaks) {
    auto [theta, value] = golden_section_max(objective, (k - 1) * h, (k + 1) * h, tol.theta_refine_tol);
    res.refined = true;
    if (value > res.value) {
      res.value = value;
      res.argmax_theta = wrap_angle(theta);
    }
  }
  return res;
}

}  // namespace detail

/// sup over theta in [0, 2*pi) of a continuous 2*pi-periodic objective.
///
/// Uniform grid of `theta_samples` points, then golden-section refinement
/// around the three best grid peaks. The result never falls below the best
/// grid value; ties resolve to the smaller angle.
template <class F>
ThetaSearchResult maximize_over_circle(F&& objective, const ToleranceConfig& tol) {
  const int n = tol.theta_samples;
  const double h = kTwoPi / n;
  std::vector<double> grid(n);
  for (int k = 0; k < n; ++k) grid[k] = objective(k * h);
  return detail::refine_grid(grid, objective, tol);
}

/// Same search for objectives that yield f(theta) and f(theta + pi) from one
/// evaluation: `paired(theta)` returns that pair for theta in [0, pi). The
/// grid is the full `theta_samples` grid, filled two points per call.
template <class G>
ThetaSearchResult maximize_over_circle_paired(G&& paired, const ToleranceConfig& tol) {
  const int n = tol.theta_samples;
  if (n % 2 != 0) {
    return maximize_over_circle(
        [&](double t) {
          t = detail::wrap_angle(t);
          return t < kPi ? paired(t).first : paired(t - kPi).second;
        },
        tol);
  }
  const double h = kTwoPi / n;
  std::vector<double> grid(n);
  for (int k = 0; k < n / 2; ++k) {
    const auto [here, opposite] = paired(k * h);
    grid[k] = here;
    grid[k + n / 2] = opposite;
  }
  auto objective = [&](double t) {
    t = detail::wrap_angle(t);
    return t < kPi ? paired(t).first : paired(t - kPi).second;
  };
  return detail::refine_grid(grid, objective, tol);
}

}  // namespace semihilb
