#pragma once

#include <cstdint>

namespace karlin::special {

// ln Γ(x) for x > 0.
double log_gamma(double x);

// Σ_{k>K} k^{-s} for s > 1, K ≥ 1, via direct summation to a safe index and
// an Euler–Maclaurin remainder; relative error ~1e-14 over the s used here.
double power_tail_sum(double s, std::uint64_t K);

// ζ(s) for s > 1, consistent with power_tail_sum by construction:
// Σ_{k≤K0} k^{-s} + power_tail_sum(s, K0).
double riemann_zeta_em(double s);

// Regularized upper incomplete gamma Q(a, x) = Γ(a,x)/Γ(a); survival function
// of the chi-square distribution is Q(df/2, x/2).
double regularized_gamma_q(double a, double x);

// Standard normal survival function.
double normal_sf(double z);

}  // namespace karlin::special
