#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "karlin/analytic.hpp"
#include "karlin/limit_measures.hpp"
#include "karlin/rng.hpp"
#include "karlin/stats.hpp"

namespace {

using namespace karlin;
using namespace karlin::limit_measures;

std::shared_ptr<const samplers::ZetaLabelLaw> half_labels() {
  static const auto law =
      std::make_shared<const samplers::ZetaLabelLaw>(0.5);
  return law;
}

// Full-space KS of a sampler's box value against a closed-form CDF.
double full_space_ks_p(const std::function<TruncatedRsm(RngStream&)>& draw,
                       const std::function<double(double)>& cdf, int reps,
                       std::uint64_t seed) {
  const std::vector<geometry::Box> full{geometry::make_box_1d(0.0, 1.0)};
  std::vector<double> values(reps);
  for (int r = 0; r < reps; ++r) {
    RngStream rng(seed, static_cast<std::uint64_t>(r));
    const auto rsm = draw(rng);
    values[r] = evaluate(rsm, full)[0].value;
  }
  std::sort(values.begin(), values.end());
  return stats::ks_p_value(stats::ks_statistic(values, cdf), values.size());
}

TEST_CASE("synthetic realizations evaluate to exact box maxima") {
  TruncatedRsm rsm(RsmKind::kIs, 1, 0.1);
  const std::array<double, 1> p1{0.2};
  const std::array<double, 2> p2{0.6, 0.9};
  rsm.append_atom(5.0, p1);   // one point at 0.2
  rsm.append_atom(3.0, p2);   // two points, 0.6 and 0.9
  rsm.append_atom(2.0, p1);   // shadowed by the first atom

  const std::vector<geometry::Box> boxes{
      geometry::make_box_1d(0.0, 0.5), geometry::make_box_1d(0.5, 1.0),
      geometry::make_box_1d(0.0, 1.0)};
  const auto vals = evaluate(rsm, boxes);
  CHECK(vals[0].value == 5.0);
  CHECK(vals[1].value == 3.0);
  CHECK(vals[2].value == 5.0);

  // a full-support atom hits every certified box
  TruncatedRsm dense(RsmKind::kKarlin, 1, 0.1);
  dense.append_atom(5.0, p1);
  dense.append_full_support_atom(4.0);
  const auto vals2 = evaluate(dense, boxes);
  CHECK(vals2[0].value == 5.0);
  CHECK(vals2[1].value == 4.0);
  CHECK(vals2[2].value == 5.0);
}

TEST_CASE("evaluation refuses boxes below the certified size") {
  TruncatedRsm rsm(RsmKind::kIs, 1, 0.25);
  const std::array<double, 1> p1{0.5};
  rsm.append_atom(1.0, p1);
  const std::vector<geometry::Box> small{geometry::make_box_1d(0.0, 0.2)};
  CHECK_THROWS_AS(evaluate(rsm, small), std::domain_error);
  const std::vector<geometry::Box> ok{geometry::make_box_1d(0.0, 0.25)};
  CHECK_NOTHROW(evaluate(rsm, ok));

  // dim 2: sides must each be >= sqrt(m_min)
  TruncatedRsm rsm2(RsmKind::kIs, 2, 0.25);
  const std::array<double, 2> q{0.5, 0.5};
  rsm2.append_atom(1.0, q);
  const auto thin = geometry::parse_boxes("0:1;0:0.3");   // 0.3 < 0.5
  const auto fat = geometry::parse_boxes("0:0.5;0.5:1");  // both sides 0.5
  CHECK_THROWS_AS(evaluate(rsm2, thin), std::domain_error);
  CHECK_NOTHROW(evaluate(rsm2, fat));
}

TEST_CASE("truncation policies are validated") {
  RngStream rng(1, 0);
  TruncationPolicy bad;
  bad.m_min = 0.0;
  CHECK_THROWS_AS(sample_is_rsm(1.0, bad, rng), std::invalid_argument);
  bad.m_min = 1.5;
  CHECK_THROWS_AS(sample_is_rsm(1.0, bad, rng), std::invalid_argument);
  bad.m_min = 0.5;
  bad.delta = 0.0;
  CHECK_THROWS_AS(sample_is_rsm(1.0, bad, rng), std::invalid_argument);
  bad.delta = 1e-4;
  bad.dim = 0;
  CHECK_THROWS_AS(sample_is_rsm(1.0, bad, rng), std::invalid_argument);
}

TEST_CASE("scattered realizations match the closed-form marginal laws") {
  TruncationPolicy policy;
  policy.m_min = 0.5;

  // independent scattering: full-space value is Gamma_1^(-1/alpha)
  const double alpha = 1.5;
  const double p_is = full_space_ks_p(
      [&](RngStream& rng) { return sample_is_rsm(alpha, policy, rng); },
      [&](double z) { return analytic::frechet_cdf(1.0, alpha, z); }, 4000,
      101);
  CHECK(p_is > 1e-3);

  // clustered locations: full-space law gains the beta exponent on mu only,
  // which is invisible on the full space (mu = 1)
  const double p_k = full_space_ks_p(
      [&](RngStream& rng) { return sample_karlin_rsm(alpha, 0.5, policy, rng); },
      [&](double z) { return analytic::frechet_cdf(1.0, alpha, z); }, 4000,
      102);
  CHECK(p_k > 1e-3);

  // half-box marginal picks up mu^beta
  const std::vector<geometry::Box> half{geometry::make_box_1d(0.0, 0.5)};
  std::vector<double> vals(4000);
  for (int r = 0; r < 4000; ++r) {
    RngStream rng(103, static_cast<std::uint64_t>(r));
    const auto rsm = sample_karlin_rsm(alpha, 0.5, policy, rng);
    vals[r] = evaluate(rsm, half)[0].value;
  }
  std::sort(vals.begin(), vals.end());
  const double theta = std::pow(0.5, 0.5);  // mu^beta
  const double d = stats::ks_statistic(vals, [&](double z) {
    return analytic::frechet_cdf(theta, alpha, z);
  });
  CHECK(stats::ks_p_value(d, vals.size()) > 1e-3);
}

TEST_CASE("signal-dominance realizations match their full-space law") {
  TruncationPolicy policy;
  policy.m_min = 0.5;
  const double alpha = 0.5, beta = 0.5;
  const samplers::ParetoParam noise{2.0, 1.0};
  const double theta = analytic::ztilde_alpha_moment(noise, beta, alpha);
  const double p = full_space_ks_p(
      [&](RngStream& rng) {
        return sample_signal_limit_rsm(alpha, beta, noise, policy, rng);
      },
      [&](double z) { return analytic::frechet_cdf(theta, alpha, z); }, 3000,
      104);
  CHECK(p > 1e-3);
}

TEST_CASE("signal-dominance sampler rejects parameters outside its regime") {
  TruncationPolicy policy;
  RngStream rng(1, 0);
  // alpha' * beta = 0.5 <= alpha = 3: moment diverges
  CHECK_THROWS_AS(
      sample_signal_limit_rsm(3.0, 0.5, {1.0, 1.0}, policy, rng),
      std::domain_error);
  // only dim 1 is supported
  TruncationPolicy d2;
  d2.dim = 2;
  CHECK_THROWS_AS(
      sample_signal_limit_rsm(0.5, 0.5, {2.0, 1.0}, d2, rng),
      std::invalid_argument);
}

TEST_CASE("critical realizations carry the stable factor and match the law") {
  TruncationPolicy policy;
  policy.m_min = 0.5;
  const double alpha_prime = 2.0, beta = 0.5;
  RngStream rng(105, 0);
  const auto rsm = sample_critical_limit_rsm(alpha_prime, beta, policy, rng);
  CHECK(rsm.stable_factor() > 0.0);
  CHECK(rsm.kind() == RsmKind::kCritical);

  // full-space CDF is Frechet with exponent alpha'*beta
  const double p = full_space_ks_p(
      [&](RngStream& r) {
        return sample_critical_limit_rsm(alpha_prime, beta, policy, r);
      },
      [&](double z) {
        return analytic::frechet_cdf(1.0, alpha_prime * beta, z);
      },
      4000, 106);
  CHECK(p > 1e-3);
}

TEST_CASE("noise-dominance sampler against a constant environment is exact") {
  TruncationPolicy policy;  // full space default m_min would be fine; use 0.5
  policy.m_min = 0.5;
  const double alpha_prime = 1.0;
  const auto env = SignalEnvironment::constant(2.0, half_labels());
  // constant c environment scales an independently scattered Frechet field:
  // full-space law exp(-c^a' z^-a')
  const double theta = std::pow(2.0, alpha_prime);
  const double p = full_space_ks_p(
      [&](RngStream& rng) {
        return sample_noise_limit_rsm(alpha_prime, env, policy, rng);
      },
      [&](double z) { return analytic::frechet_cdf(theta, alpha_prime, z); },
      4000, 107);
  CHECK(p > 1e-3);

  // the stop rule for constant environments is exact: zero bound, and the
  // quenched scale c^alpha' is recorded on the artifact
  RngStream rng(108, 0);
  const auto rsm = sample_noise_limit_rsm(alpha_prime, env, policy, rng);
  CHECK(rsm.truncation_bound() == 0.0);
  CHECK(rsm.env_moment() == std::pow(2.0, alpha_prime));
}

TEST_CASE("noise-dominance sampler certifies random environments") {
  TruncationPolicy policy;
  policy.m_min = 0.5;
  policy.delta = 1e-4;
  const double alpha = 3.0, alpha_prime = 1.0, beta = 0.5;
  auto env = SignalEnvironment::pareto(991, {alpha, 1.0}, half_labels());
  const double kappa = 0.5 * (alpha / beta - alpha_prime);
  env = env.with_cached_certificate(alpha_prime + kappa, policy.delta / 4.0);

  RngStream rng(109, 0);
  const auto rsm = sample_noise_limit_rsm(alpha_prime, env, policy, rng);
  CHECK(rsm.kind() == RsmKind::kNoise);
  CHECK(rsm.atom_count() > 0);
  // no closed-form quenched scale for a random environment
  CHECK(rsm.env_moment() == 0.0);
  CHECK(rsm.truncation_bound() <= policy.delta);
  CHECK(rsm.truncation_bound() > 0.0);

  // signal regime parameters cannot certify the environment moment
  const auto env_signal =
      SignalEnvironment::pareto(992, {0.5, 1.0}, half_labels());
  CHECK_THROWS_AS(
      sample_noise_limit_rsm(2.0, env_signal, policy, rng),
      std::domain_error);
}

TEST_CASE("signal environments are deterministic, rescalable, certifiable") {
  const auto labels = half_labels();
  const auto env = SignalEnvironment::pareto(77, {3.0, 1.0}, labels);
  CHECK(env.eps(5) == env.eps(5));
  CHECK(env.eps(5) != env.eps(6));
  CHECK(env.eps(5) >= 1.0);  // Pareto support
  CHECK_FALSE(env.is_constant());
  CHECK(env.signal_alpha() == 3.0);

  const auto scaled = env.rescaled(2.0);
  CHECK(scaled.eps(5) == doctest::Approx(2.0 * env.eps(5)).epsilon(1e-15));

  // partial moment grows with the cutoff and stabilizes
  const double m1 = env.moment_partial(2.0, 100);
  const double m2 = env.moment_partial(2.0, 10000);
  CHECK(m2 >= m1);

  // constant environment: exact certificate
  const auto cenv = SignalEnvironment::constant(1.5, labels);
  const auto cert = cenv.certify_moment(2.0, 1e-6);
  CHECK(cert.upper_bound == doctest::Approx(std::pow(1.5, 2.0)));
  CHECK(cert.failure_prob == 0.0);

  // random environment: the certificate upper-bounds the partial sum and
  // carries the requested failure budget
  const auto rcert = env.certify_moment(2.0, 1e-5);
  CHECK(rcert.upper_bound >= env.moment_partial(2.0, 10000));
  CHECK(rcert.failure_prob <= 1e-5);
  CHECK(rcert.exponent == 2.0);

  // moments beyond alpha/beta = 6 cannot be certified finite
  CHECK_THROWS_AS(env.certify_moment(6.5, 1e-5), std::domain_error);
}

TEST_CASE("max-stability holds for scattered and clustered kinds") {
  // max(M1, M2) of two independent copies, scaled by 2^(-1/alpha), has the
  // law of one copy; verified by two-sample KS on full-space values.
  TruncationPolicy policy;
  policy.m_min = 1.0;
  const double alpha = 1.0;
  const int reps = 3000;
  const std::vector<geometry::Box> full{geometry::make_box_1d(0.0, 1.0)};

  for (const bool clustered : {false, true}) {
    std::vector<double> one(reps), two(reps);
    for (int r = 0; r < reps; ++r) {
      RngStream rng_a(201, 3 * r);
      RngStream rng_b(201, 3 * r + 1);
      RngStream rng_c(201, 3 * r + 2);
      const auto draw = [&](RngStream& rng) {
        return clustered ? sample_karlin_rsm(alpha, 0.5, policy, rng)
                         : sample_is_rsm(alpha, policy, rng);
      };
      one[r] = evaluate(draw(rng_a), full)[0].value;
      const double m1 = evaluate(draw(rng_b), full)[0].value;
      const double m2 = evaluate(draw(rng_c), full)[0].value;
      two[r] = std::pow(2.0, -1.0 / alpha) * std::max(m1, m2);
    }
    std::sort(one.begin(), one.end());
    std::sort(two.begin(), two.end());
    const double d = stats::two_sample_ks(one, two);
    CHECK(stats::ks_p_value_two(d, one.size(), two.size()) > 1e-3);
  }
}

TEST_CASE("atom budget violations surface as resource errors") {
  TruncationPolicy tiny;
  tiny.m_min = 1e-3;
  tiny.max_atoms = 3;  // certainly too few to fill the grid
  RngStream rng(301, 0);
  CHECK_THROWS_AS(sample_is_rsm(1.0, tiny, rng), std::length_error);
}

TEST_CASE("realizations serialize to JSON with their certificate") {
  TruncationPolicy policy;
  policy.m_min = 0.5;
  RngStream rng(401, 0);
  const auto rsm = sample_critical_limit_rsm(2.0, 0.5, policy, rng);
  std::ostringstream out;
  write_rsm_json(rsm, out);
  const auto j = nlohmann::json::parse(out.str());
  CHECK(j.at("kind").get<std::string>() == "critical");
  CHECK(j.at("dim").get<int>() == 1);
  CHECK(j.at("m_min").get<double>() == 0.5);
  CHECK(j.contains("stable_factor"));
  CHECK(j.at("atoms").is_array());
  CHECK(j.at("atoms").size() == rsm.atom_count());
}

}  // namespace
