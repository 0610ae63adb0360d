#include <cmath>
#include <cstdint>
#include <initializer_list>

#include "doctest.h"
#include "karlin/special.hpp"

namespace {

using namespace karlin::special;

TEST_CASE("log_gamma matches known values") {
  CHECK(log_gamma(1.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(log_gamma(2.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(log_gamma(5.0) == doctest::Approx(std::log(24.0)).epsilon(1e-14));
  // Gamma(1/2) = sqrt(pi)
  CHECK(log_gamma(0.5) ==
        doctest::Approx(0.5 * std::log(M_PI)).epsilon(1e-14));
  // recurrence Gamma(x+1) = x Gamma(x)
  for (double x : {0.1, 0.3, 0.7, 1.5, 3.25}) {
    CHECK(log_gamma(x + 1.0) ==
          doctest::Approx(log_gamma(x) + std::log(x)).epsilon(1e-13));
  }
}

TEST_CASE("power_tail_sum agrees with brute-force summation") {
  // Direct sum of k^-s for K < k <= K + 2*10^6 plus an integral upper bound
  // on the rest brackets the value.
  for (double s : {2.0, 10.0 / 3.0, 1.6}) {
    for (std::uint64_t K : {std::uint64_t{1}, std::uint64_t{10},
                            std::uint64_t{1000}}) {
      long double direct = 0.0L;
      const std::uint64_t stop = K + 2000000;
      for (std::uint64_t k = stop; k > K; --k) {
        direct += std::pow(static_cast<long double>(k),
                           static_cast<long double>(-s));
      }
      // integral bound on the omitted tail: <= stop^(1-s)/(s-1)
      const long double omitted =
          std::pow(static_cast<long double>(stop),
                   static_cast<long double>(1.0 - s)) /
          (s - 1.0);
      const double val = power_tail_sum(s, K);
      CHECK(val >= static_cast<double>(direct) * (1.0 - 1e-12));
      CHECK(val <= static_cast<double>(direct + omitted) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("riemann_zeta_em matches reference values") {
  CHECK(riemann_zeta_em(2.0) ==
        doctest::Approx(M_PI * M_PI / 6.0).epsilon(1e-13));
  CHECK(riemann_zeta_em(4.0) ==
        doctest::Approx(std::pow(M_PI, 4) / 90.0).epsilon(1e-13));
  // zeta(3) (Apery's constant)
  CHECK(riemann_zeta_em(3.0) ==
        doctest::Approx(1.2020569031595943).epsilon(1e-13));
  // consistency with the tail: zeta(s) = sum_{k<=K} k^-s + tail(K)
  for (double s : {1.25, 2.0, 5.0}) {
    long double head = 0.0L;
    for (std::uint64_t k = 1; k <= 100; ++k) {
      head += std::pow(static_cast<long double>(k),
                       static_cast<long double>(-s));
    }
    CHECK(riemann_zeta_em(s) ==
          doctest::Approx(static_cast<double>(head) + power_tail_sum(s, 100))
              .epsilon(1e-12));
  }
}

TEST_CASE("regularized_gamma_q matches closed forms") {
  // Q(1, x) = exp(-x)
  for (double x : {0.1, 1.0, 3.0, 10.0}) {
    CHECK(regularized_gamma_q(1.0, x) ==
          doctest::Approx(std::exp(-x)).epsilon(1e-12));
  }
  // Q(2, x) = (1+x) exp(-x)
  for (double x : {0.5, 2.0, 7.0}) {
    CHECK(regularized_gamma_q(2.0, x) ==
          doctest::Approx((1.0 + x) * std::exp(-x)).epsilon(1e-12));
  }
  // chi-square(1) survival at x: Q(1/2, x/2) = erfc(sqrt(x/2))
  for (double x : {0.5, 1.0, 4.0}) {
    CHECK(regularized_gamma_q(0.5, x / 2.0) ==
          doctest::Approx(std::erfc(std::sqrt(x / 2.0))).epsilon(1e-12));
  }
}

TEST_CASE("normal_sf matches erfc") {
  for (double z : {-2.0, 0.0, 1.0, 3.5, 6.0}) {
    CHECK(normal_sf(z) ==
          doctest::Approx(0.5 * std::erfc(z / std::sqrt(2.0)))
              .epsilon(1e-12));
  }
}

}  // namespace
