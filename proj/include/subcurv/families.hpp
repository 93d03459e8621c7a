#pragma once

// Rate families K_0..K_l (with Omega) for the built-in models.

#include "subcurv/rexpr.hpp"

namespace subcurv {

/// K_0 = rho1 - kappa/r, K_1 = rho2 (the classical r-parametrized condition).
KFamily k_family_13(double rho1, double rho2, double kappa);
/// K_0 = min(r0 - m/r, K r - r0 - 4/r), K_1 = 1.
KFamily k_family_example_a(double K, double m, double r0);
/// K_0 = -alpha sum_i r_{i-1}^{i+1} / r_i^i, K_i = beta r_{i-1}, r_0 = 1. The power i+1 is
/// what the sup_s {A s^{i-1} - B s^i} bound produces; `stated` uses r_{i-1}^{i-1}, which
/// no (alpha, beta) makes PSD once l >= 2.
KFamily k_family_grushin(int l, double alpha, double beta, bool stated = false);
/// K_0 = -(5/r1 + 2 r1/r2), K_1 = 1 - 4 r1^2/r2, K_2 = r1.
KFamily k_family_example_c();
/// K = (0, 1, r1/2) on Omega = {r1^2 <= 4 r2}; `stated` uses K_1 = 1 + r2 instead.
KFamily k_family_kolmogorov(bool stated = false);
/// l = 0, K_0 = rho1.
KFamily k_family_ou(double rho1);

}  // namespace subcurv
