#include <cmath>

#include "doctest.h"
#include "srr/ao.hpp"
#include "srr/capacities.hpp"
#include "srr/channels.hpp"
#include "srr/linalg.hpp"
#include "srr/verify.hpp"

using namespace srr;

namespace {

CovarianceTriple random_triple(Mt64& g, int nt, double power, double t0,
                               double tc, double ta) {
  CovarianceTriple cov = CovarianceTriple::zero(nt, power);
  cov.multicast = random_psd(g, nt, t0);
  cov.confidential = random_psd(g, nt, tc);
  cov.noise = random_psd(g, nt, ta);
  return cov;
}

}  // namespace

TEST_CASE("variational identity holds through the solver route") {
  Lemma3Check c1 = check_lemma3(CMat::Identity(2, 2));
  CHECK(c1.pass);
  CHECK(c1.value_gap <= 1e-6);
  CHECK(c1.argmax_gap <= 1e-6);

  CMat e2(1, 1);
  e2 << 2.0;
  Lemma3Check c2 = check_lemma3(e2);
  CHECK(c2.pass);

  Mt64 g(904);
  CMat e3 = random_psd(g, 3, 2.5) + 0.3 * CMat::Identity(3, 3);
  Lemma3Check c3 = check_lemma3(e3);
  CHECK(c3.pass);
}

TEST_CASE("determinant-ratio monotonicity accepts PSD increments") {
  Mt64 g(905);
  for (int i = 0; i < 10; ++i) {
    CMat a = random_psd(g, 3, 2.0 * g.uniform() + 0.1);
    CMat b = random_psd(g, 3, 2.0 * g.uniform()) + 0.3 * CMat::Identity(3, 3);
    CMat d = random_psd(g, 3, 2.0 * g.uniform() + 0.1);
    double gap = -1.0;
    CHECK(check_det_ratio(a, b, d, 1e-12, &gap));
    CHECK(gap >= -1e-12);
  }
}

TEST_CASE("determinant-ratio check rejects an indefinite increment") {
  // With a negative "signal" term the ratio moves the other way, so the
  // checker must report a clearly negative margin.
  CMat a(1, 1), b(1, 1), d(1, 1);
  a << -0.5;
  b << 1.0;
  d << 10.0;
  double gap = 0.0;
  CHECK_FALSE(check_det_ratio(a, b, d, 1e-12, &gap));
  CHECK(gap < -0.1);
}

TEST_CASE("gradient identities agree at random interior points") {
  Mt64 g(906);
  ChannelSet ch = generate_channels(906, 3, {2, 2, 1});
  for (int i = 0; i < 5; ++i) {
    CovarianceTriple cov = random_triple(g, 3, 10.0, 1.0 + g.uniform(),
                                         1.0 + g.uniform(), 0.5 + g.uniform());
    CHECK(danskin_gap(ch, cov) <= 1e-8);
  }
}

TEST_CASE("null-space projector kills the rows and carries the trace") {
  CMat h(1, 2);
  h << 1.0, 0.0;
  CMat e = orth_complement_projector(h, 1.0);
  CHECK(std::abs(e(0, 0)) <= 1e-14);
  CHECK(std::abs(e(1, 1).real() - 1.0) <= 1e-14);
  CHECK(std::abs(e(0, 1)) <= 1e-14);

  Mt64 g(907);
  CMat wide(2, 5);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 5; ++c) wide(r, c) = g.cgauss_unit();
  const double rho = 0.7;
  CMat p = orth_complement_projector(wide, rho);
  CHECK((wide * p).norm() <= 1e-10);
  CHECK(p.real().trace() == doctest::Approx(rho * 3.0).epsilon(1e-10));
  CHECK((p - p.adjoint()).norm() <= 1e-12);
  // Scaled idempotence: (rho P)(rho P) = rho (rho P).
  CHECK((p * p - rho * p).norm() <= 1e-10);

  CMat square = CMat::Identity(2, 2);
  CHECK_THROWS_AS(orth_complement_projector(square, 1.0), DomainError);

  CMat dependent(2, 3);
  dependent.row(0) << 1.0, 2.0, 3.0;
  dependent.row(1) = 2.0 * dependent.row(0);
  CHECK_THROWS_AS(orth_complement_projector(dependent, 1.0), DomainError);
}

TEST_CASE("slack repair through the authorized null space") {
  Mt64 g(908);
  ChannelSet ch = generate_channels(908, 4, {2, 2});  // n_t > n_r(0)
  CovarianceTriple cov = random_triple(g, 4, 6.0, 2.0, 1.0, 0.5);
  const double m = multicast_rate(ch, cov);
  const double tau = m - 0.4;

  SlackImprovement s = improve_if_slack(ch, cov, tau);
  CHECK(s.improved);
  CHECK(s.condition == 1);
  CHECK(s.pre_slack_bits == doctest::Approx(0.4).epsilon(1e-9));
  CHECK(multicast_rate(ch, s.cov) == doctest::Approx(tau).epsilon(1e-6));
  CHECK(s.cov.total_trace() ==
        doctest::Approx(cov.total_trace()).epsilon(1e-9));
  // Extra noise lives where receiver 0 cannot see it.
  CHECK(confidential_capacity(ch, s.cov) ==
        doctest::Approx(confidential_capacity(ch, cov)).epsilon(1e-9));
  CHECK(eavesdrop_capacity(ch, s.cov, 1) <=
        eavesdrop_capacity(ch, cov, 1) + 1e-9);
  CHECK(secrecy_rate(ch, s.cov) >= secrecy_rate(ch, cov) - 1e-9);
  CHECK(validate_covariances(s.cov).pass);
}

TEST_CASE("slack repair through the eavesdropper null space") {
  Mt64 g(909);
  // n_t == n_r(0) blocks the first route; the lone 2-antenna eavesdropper
  // leaves a one-dimensional blind direction for extra confidential power.
  ChannelSet ch = generate_channels(909, 3, {3, 2});
  CovarianceTriple cov = random_triple(g, 3, 6.0, 2.0, 1.0, 0.3);
  const double m = multicast_rate(ch, cov);
  const double tau = m - 0.3;

  SlackImprovement s = improve_if_slack(ch, cov, tau);
  CHECK(s.improved);
  CHECK(s.condition == 2);
  CHECK(multicast_rate(ch, s.cov) == doctest::Approx(tau).epsilon(1e-6));
  CHECK(s.cov.total_trace() ==
        doctest::Approx(cov.total_trace()).epsilon(1e-9));
  CHECK(max_leakage(ch, s.cov) ==
        doctest::Approx(max_leakage(ch, cov)).epsilon(1e-9));
  CHECK(secrecy_rate(ch, s.cov) >= secrecy_rate(ch, cov) - 1e-9);
}

TEST_CASE("slack repair edge cases") {
  Mt64 g(910);
  ChannelSet ch = generate_channels(910, 4, {2, 2});
  CovarianceTriple cov = random_triple(g, 4, 6.0, 2.0, 1.0, 0.5);
  const double m = multicast_rate(ch, cov);

  // Already tight: nothing to move.
  SlackImprovement tight = improve_if_slack(ch, cov, m);
  CHECK_FALSE(tight.improved);
  CHECK((tight.cov.multicast - cov.multicast).norm() <= 1e-14);

  // Floor above the delivered rate is a caller bug.
  CHECK_THROWS_AS(improve_if_slack(ch, cov, m + 0.5), DomainError);

  // No null space at all: square joint geometry.
  ChannelSet flat = generate_channels(911, 2, {2, 2});
  CovarianceTriple c2 = random_triple(g, 2, 4.0, 1.0, 0.5, 0.2);
  const double m2 = multicast_rate(flat, c2);
  CHECK_THROWS_AS(improve_if_slack(flat, c2, m2 - 0.3), DomainError);
}

TEST_CASE("first-order report rejects a non-stationary point") {
  Mt64 g(912);
  ChannelSet ch = generate_channels(912, 3, {2, 2});
  CovarianceTriple cov = random_triple(g, 3, 10.0, 1.5, 1.5, 1.0);

  AoDuals d;
  d.lambda_c = 1.0;
  d.eav_raw = RVec::Constant(1, 1.0);
  d.multicast_raw = RVec::Constant(2, 0.5);
  d.budget = 0.3;
  d.z_multicast = 0.01 * CMat::Identity(3, 3);
  d.z_confidential = 0.01 * CMat::Identity(3, 3);
  d.z_noise = 0.01 * CMat::Identity(3, 3);
  d.valid = true;

  KktReport r = kkt_residuals(ch, cov, d);
  CHECK(r.max_stationarity() > 0.1);
  CHECK_FALSE(r.pass(1e-4));
}

TEST_CASE("first-order report input validation") {
  Mt64 g(913);
  ChannelSet ch = generate_channels(913, 3, {2, 2});
  CovarianceTriple cov = random_triple(g, 3, 10.0, 1.0, 1.0, 0.5);

  AoDuals d;
  d.lambda_c = 1.0;
  d.eav_raw = RVec::Constant(1, 1.0);
  d.multicast_raw = RVec::Constant(2, 0.5);
  d.budget = 0.1;
  d.z_multicast = d.z_confidential = d.z_noise = CMat::Zero(3, 3);

  d.valid = false;
  CHECK_THROWS_AS(kkt_residuals(ch, cov, d), DomainError);
  d.valid = true;

  AoDuals zero_weight = d;
  zero_weight.lambda_c = 0.0;
  CHECK_THROWS_AS(kkt_residuals(ch, cov, zero_weight), DomainError);

  AoDuals short_vec = d;
  short_vec.eav_raw = RVec::Zero(2);
  CHECK_THROWS_AS(kkt_residuals(ch, cov, short_vec), DomainError);

  ChannelSet solo = generate_channels(914, 3, {2});
  CovarianceTriple c1 = random_triple(g, 3, 10.0, 1.0, 1.0, 0.5);
  CHECK_THROWS_AS(kkt_residuals(solo, c1, d), DomainError);
}

TEST_CASE("converged duals saturate the power budget") {
  ChannelSet ch = generate_channels(915, 2, {1, 1});
  AoConfig cfg;
  cfg.tol_bits = 1e-6;
  AoResult r = ao_solve(ch, 2.0, 1.0, cfg);
  REQUIRE(r.status == "ok");
  REQUIRE(r.duals.valid);
  KktReport rep = kkt_residuals(ch, r.cov, r.duals);
  CHECK(rep.trace_slack >= -1e-8);
  CHECK(rep.trace_slack <= 1e-4);
  CHECK(rep.comp_budget <= 1e-4);
  CHECK(rep.pass(1e-4));
}

TEST_CASE("scalar grid oracle reproduces closed forms") {
  // Secrecy only (floor 0): all power to the confidential stream.
  ScalarInstance a;
  a.users = 2;
  a.gains = {4.0, 1.0};
  a.power = 1.0;
  a.tau_bits = 0.0;
  ScalarOracleResult ra = brute_force_scalar_oracle(a);
  CHECK(ra.feasible);
  CHECK(ra.value_bits ==
        doctest::Approx(std::log2(5.0) - std::log2(2.0)).epsilon(1e-12));
  CHECK(ra.q0 == doctest::Approx(0.0));
  CHECK(ra.qc == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ra.qa == doctest::Approx(0.0));
  CHECK(ra.lipschitz_bits > 0.0);

  // Floor at the multicast optimum: everything goes to the common stream.
  ScalarInstance b = a;
  b.tau_bits = 1.0;  // log2(1 + min gain * P)
  ScalarOracleResult rb = brute_force_scalar_oracle(b);
  CHECK(rb.feasible);
  CHECK(rb.value_bits == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rb.q0 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rb.qc == doctest::Approx(0.0));

  // Floor beyond reach.
  ScalarInstance c = a;
  c.tau_bits = 2.0;
  ScalarOracleResult rc = brute_force_scalar_oracle(c);
  CHECK_FALSE(rc.feasible);

  // Zero secrecy weight reduces the weighted mode to pure multicast.
  ScalarInstance d = a;
  d.tau_bits = -1.0;
  d.lambda_c = 0.0;
  ScalarOracleResult rd = brute_force_scalar_oracle(d);
  CHECK(rd.feasible);
  CHECK(rd.value_bits == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rd.q0 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("scalar grid oracle input validation") {
  ScalarInstance base;
  base.users = 2;
  base.gains = {4.0, 1.0};
  base.power = 1.0;

  ScalarInstance both = base;
  both.tau_bits = 0.0;
  both.lambda_c = 1.0;
  CHECK_THROWS_AS(brute_force_scalar_oracle(both), DomainError);

  ScalarInstance neither = base;
  CHECK_THROWS_AS(brute_force_scalar_oracle(neither), DomainError);

  ScalarInstance coarse = base;
  coarse.tau_bits = 0.0;
  coarse.step = 0.1;
  CHECK_THROWS_AS(brute_force_scalar_oracle(coarse), DomainError);

  ScalarInstance bad_gain = base;
  bad_gain.tau_bits = 0.0;
  bad_gain.gains = {4.0, -1.0};
  CHECK_THROWS_AS(brute_force_scalar_oracle(bad_gain), DomainError);

  ScalarInstance mismatch = base;
  mismatch.tau_bits = 0.0;
  mismatch.gains = {4.0};
  CHECK_THROWS_AS(brute_force_scalar_oracle(mismatch), DomainError);
}

TEST_CASE("expansion audit passes on a random instance") {
  ChannelSet ch = generate_channels(916, 3, {2, 2});
  MajorizationCheck c = tse_majorization_check(ch, 10.0, 60, 77);
  CHECK(c.pass);
  CHECK(c.samples == 60);
  CHECK(c.min_slack >= -1e-9);
  CHECK(c.max_tangency_gap <= 1e-10);
}

TEST_CASE("identity battery is green") {
  BatteryResult b = run_identity_battery(2024);
  CHECK(b.pass);
  REQUIRE(b.suites.size() == 4);
  CHECK(b.suites[0].total == 50);
  CHECK(b.suites[1].total == 200);
  CHECK(b.suites[2].total == 500);
  CHECK(b.suites[3].total == 100);
  for (const BatterySuite& s : b.suites) {
    CHECK(s.pass);
    CHECK(s.passed == s.total);
  }
  CHECK(b.wall_ms > 0.0);
}
