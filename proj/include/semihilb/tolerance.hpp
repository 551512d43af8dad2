#pragma once

#include "semihilb/errors.hpp"

namespace semihilb {

/// Numerical knobs shared by every routine.
///
/// `rank_rtol` is relative to the largest eigenvalue of A; `cmp_atol` is the
/// absolute slack used by membership predicates and inequality checks (always
/// scaled by a magnitude at the call site).
struct ToleranceConfig {
  double rank_rtol = 1e-10;
  double cmp_atol = 1e-8;
  int theta_samples = 1024;
  double theta_refine_tol = 1e-12;
  int gelfand_max_power = 64;

  void validate() const {
    if (!(rank_rtol > 0) || !(cmp_atol > 0) || !(theta_refine_tol > 0) || gelfand_max_power < 1)
      throw Error(Errc::invalid_config, "tolerances must be positive");
    if (theta_samples < 8) throw Error(Errc::invalid_config, "theta_samples must be >= 8");
  }
};

}  // namespace semihilb
