#include <cmath>

#include "doctest.h"
#include "srr/ao.hpp"
#include "srr/channels.hpp"
#include "srr/dc.hpp"
#include "srr/linalg.hpp"
#include "srr/verify.hpp"

using namespace srr;

TEST_CASE("variational closed form: value and argmax") {
  Mt64 g(501);
  for (int n : {1, 2, 4}) {
    CMat e = random_psd(g, n, 2.0 * n) + 0.2 * CMat::Identity(n, n);
    VariationalOptimum v = lemma3_closed_form(e);
    CHECK(v.value == doctest::Approx(-logdet_hermitian_pd(e)).epsilon(1e-11));
    CHECK((v.argmax * e - CMat::Identity(n, n)).norm() <= 1e-10);
    // The objective at the argmax reproduces the optimum: -tr(SE) +
    // logdet S + n.
    double at = -(v.argmax * e).trace().real() +
                logdet_hermitian_pd(v.argmax) + n;
    CHECK(at == doctest::Approx(v.value).epsilon(1e-10));
    // Any other PSD S does worse.
    for (int trial = 0; trial < 5; ++trial) {
      CMat s = random_psd(g, n, 1.0 + trial) + 0.1 * CMat::Identity(n, n);
      double val =
          -(s * e).trace().real() + logdet_hermitian_pd(s) + n;
      CHECK(val <= v.value + 1e-10);
    }
  }
}

TEST_CASE("closed-form slacks invert the shifted Grams") {
  ChannelSet ch = generate_channels(503, 3, {2, 2, 1});
  Mt64 g(503);
  CMat qc = random_psd(g, 3, 1.2), qa = random_psd(g, 3, 0.8);
  WsrmSlacks s = closed_form_slacks(ch, qc, qa);
  CMat g0 = CMat::Identity(2, 2) + ch.rx[0] * qa * ch.rx[0].adjoint();
  CHECK((s.noise_cover * g0 - CMat::Identity(2, 2)).norm() <= 1e-11);
  REQUIRE(s.joint_cover.size() == 3);
  for (int k = 0; k < 3; ++k) {
    int nr = ch.n_r(k);
    CMat gk = CMat::Identity(nr, nr) +
              ch.rx[k] * (qa + qc) * ch.rx[k].adjoint();
    CHECK((s.joint_cover[k] * gk - CMat::Identity(nr, nr)).norm() <= 1e-11);
  }
}

TEST_CASE("surrogate equals the true objective at its own covers") {
  ChannelSet ch = generate_channels(505, 3, {2, 2});
  Mt64 g(505);
  CovarianceTriple cov = CovarianceTriple::zero(3, 6.0);
  cov.multicast = random_psd(g, 3, 2.0);
  cov.confidential = random_psd(g, 3, 2.0);
  cov.noise = random_psd(g, 3, 1.0);
  WsrmSlacks s = closed_form_slacks(ch, cov.confidential, cov.noise);
  for (double lam : {0.5, 1.0, 3.0}) {
    double sur = wsrm_surrogate(ch, cov, s, lam);
    double truth = bits_to_nats(weighted_objective(ch, cov, lam));
    CHECK(sur == doctest::Approx(truth).epsilon(1e-10));
  }
  // At foreign covers the surrogate can only under-estimate (maximized out).
  WsrmSlacks other = closed_form_slacks(ch, 0.5 * cov.confidential,
                                        0.7 * cov.noise);
  for (double lam : {0.5, 1.0, 3.0})
    CHECK(wsrm_surrogate(ch, cov, other, lam) <=
          bits_to_nats(weighted_objective(ch, cov, lam)) + 1e-10);
}

TEST_CASE("wsrm subproblem layout and epigraph rows") {
  ChannelSet ch = generate_channels(507, 2, {2, 1});
  Mt64 g(507);
  WsrmSlacks s = closed_form_slacks(ch, random_psd(g, 2, 0.5),
                                    random_psd(g, 2, 0.3));
  WsrmLayout lay;
  LogDetProgram p = assemble_wsrm_subproblem(ch, 4.0, 1.5, s, true, &lay);
  CHECK(lay.b_q0 == 0);
  CHECK(lay.b_qc == 1);
  CHECK(lay.b_qa == 2);
  CHECK(lay.s_alpha >= 0);
  CHECK(lay.s_beta >= 0);
  CHECK(p.num_scalars == 2);
  // One leakage row per eavesdropper, one multicast row per receiver.
  CHECK(p.constraints.size() == 1 + 2);
  CHECK_NOTHROW(p.check());

  // Without AN the Qa block disappears.
  WsrmLayout lay2;
  LogDetProgram p2 = assemble_wsrm_subproblem(ch, 4.0, 1.5, s, false, &lay2);
  CHECK(lay2.b_qa == -1);
  CHECK(p2.blocks.size() == 2);

  // lambda_c = 0 drops the leakage epigraph.
  WsrmLayout lay3;
  LogDetProgram p3 = assemble_wsrm_subproblem(ch, 4.0, 0.0, s, true, &lay3);
  CHECK(lay3.s_beta == -1);
  CHECK(p3.num_scalars == 1);
}

TEST_CASE("ao at lambda 0 recovers the multicast optimum") {
  ChannelSet ch = generate_channels(509, 3, {2, 2});
  double p = 10.0;
  AoResult r = ao_solve(ch, p, 0.0);
  REQUIRE((r.status == "ok" || r.status == "max_outer"));
  TauMaxResult tm = compute_tau_max(ch, p);
  CHECK(r.rates.multicast_bits == doctest::Approx(tm.tau_bits).epsilon(1e-4));
}

TEST_CASE("ao objective trace is monotone and converges") {
  ChannelSet ch = generate_channels(511, 3, {2, 2});
  AoConfig cfg;
  AoResult r = ao_solve(ch, 10.0, 1.0, cfg);
  REQUIRE(r.status == "ok");
  CHECK(r.converged);
  REQUIRE(r.trace.size() >= 2);
  for (size_t i = 1; i < r.trace.size(); ++i)
    CHECK(r.trace[i].objective_nats >= r.trace[i - 1].objective_nats - 1e-9);
  // Final surrogate value matches the reported objective and the true one.
  CHECK(r.objective_nats ==
        doctest::Approx(bits_to_nats(weighted_objective(ch, r.cov, 1.0)))
            .epsilon(1e-6));
  CHECK(validate_covariances(sanitize(r.cov)).pass);
  CHECK(r.cov.total_trace() <= 10.0 + 1e-6);
}

TEST_CASE("ao duals power a passing first-order certificate") {
  ChannelSet ch = generate_channels(513, 3, {2, 2, 2});
  AoConfig cfg;
  cfg.tol_bits = 1e-6;
  AoResult r = ao_solve(ch, 10.0, 1.0, cfg);
  REQUIRE(r.status == "ok");
  REQUIRE(r.duals.valid);
  CHECK(r.duals.lambda_c == 1.0);
  KktReport rep = kkt_residuals(ch, r.cov, r.duals);
  CHECK(rep.pass(1e-4));
  CHECK(rep.max_stationarity() <= 1e-4);
  CHECK(rep.danskin <= 1e-8);
}

TEST_CASE("larger secrecy weight trades multicast for secrecy") {
  ChannelSet ch = generate_channels(515, 3, {2, 2});
  AoResult lo = ao_solve(ch, 10.0, 0.25);
  AoResult hi = ao_solve(ch, 10.0, 4.0);
  REQUIRE((lo.status == "ok" || lo.status == "max_outer"));
  REQUIRE((hi.status == "ok" || hi.status == "max_outer"));
  CHECK(hi.rates.secrecy_bits >= lo.rates.secrecy_bits - 1e-6);
  CHECK(hi.rates.multicast_bits <= lo.rates.multicast_bits + 1e-6);
}

TEST_CASE("ao against the scalar weighted oracle") {
  ChannelSet ch;
  ch.n_t = 1;
  CMat h0(1, 1), h1(1, 1);
  h0(0, 0) = Cplx(2.0, 0.0);
  h1(0, 0) = Cplx(1.0, 0.0);
  ch.rx = {h0, h1};
  double p = 1.0;

  ScalarInstance inst;
  inst.users = 2;
  inst.gains = {4.0, 1.0};
  inst.power = p;
  inst.lambda_c = 1.0;
  ScalarOracleResult oracle = brute_force_scalar_oracle(inst);
  REQUIRE(oracle.feasible);

  AoResult r = ao_solve(ch, p, 1.0);
  REQUIRE((r.status == "ok" || r.status == "max_outer"));
  double got = weighted_objective(ch, r.cov, 1.0);
  CHECK(got >= oracle.value_bits - oracle.lipschitz_bits * oracle.step - 1e-6);
}

TEST_CASE("ao boundary sweep spans the region ends") {
  ChannelSet ch = generate_channels(517, 3, {2, 2});
  AoSweepConfig cfg;
  cfg.weights = {0.0, 1.0, 8.0};
  RegionBoundary rb = trace_region_ao(ch, 10.0, cfg);
  CHECK(rb.method == "ao");
  REQUIRE(rb.records.size() == 3);
  REQUIRE(rb.solutions.size() == 3);
  CHECK(rb.records[0].param == 0.0);
  // Weight 0: pure multicast; largest weight: most secrecy.
  CHECK(rb.records[0].rc_bits <= rb.records[2].rc_bits + 1e-9);
  CHECK(rb.records[2].r0_bits <= rb.records[0].r0_bits + 1e-9);
  for (size_t i = 0; i < rb.records.size(); ++i) {
    RatePoint rp = rate_point(ch, rb.solutions[i]);
    CHECK(rp.multicast_bits ==
          doctest::Approx(rb.records[i].r0_bits).epsilon(1e-9));
  }
}

TEST_CASE("default weight grid starts at zero and is log-spaced") {
  std::vector<double> w = default_weight_grid();
  REQUIRE(w.size() == 21);
  CHECK(w[0] == 0.0);
  CHECK(w[1] == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(w.back() == doctest::Approx(20.0).epsilon(1e-12));
  for (size_t i = 2; i < w.size(); ++i)
    CHECK(w[i] / w[i - 1] ==
          doctest::Approx(w[2] / w[1]).epsilon(1e-9));
}
