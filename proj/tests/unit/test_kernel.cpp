#include <cmath>

#include "doctest.h"
#include "srr/kernel.hpp"
#include "srr/linalg.hpp"

using namespace srr;

namespace {

// max logdet(I + X), tr X <= p, one n x n block. Optimum X = (p/n) I by
// symmetry, value n log(1 + p/n).
LogDetProgram identity_logdet(int n, double p) {
  LogDetProgram prog;
  prog.blocks.push_back({n, true, "x"});
  prog.budget = p;
  LogDetTerm t;
  t.base = CMat::Identity(n, n);
  t.factors.push_back({0, CMat::Identity(n, n)});
  prog.objective.logdets.push_back(std::move(t));
  return prog;
}

// Classic water level for max sum log(1 + g_i p_i), sum p_i = p.
double waterfill_value(std::vector<double> g, double p) {
  double lo = 0.0, hi = 1.0 / *std::min_element(g.begin(), g.end()) + p;
  for (int it = 0; it < 200; ++it) {
    double nu = 0.5 * (lo + hi);
    double used = 0.0;
    for (double gi : g) used += std::max(0.0, nu - 1.0 / gi);
    (used > p ? hi : lo) = nu;
  }
  double nu = 0.5 * (lo + hi), v = 0.0;
  for (double gi : g) v += std::log(1.0 + gi * std::max(0.0, nu - 1.0 / gi));
  return v;
}

}  // namespace

TEST_CASE("hermitian pack/unpack is a Frobenius isometry") {
  Mt64 g(301);
  for (int n : {1, 2, 4}) {
    CMat a = random_hermitian(g, n, 2.0);
    CMat b = random_hermitian(g, n, 3.0);
    std::vector<double> pa(n * n), pb(n * n);
    pack_hermitian(a, pa.data());
    pack_hermitian(b, pb.data());
    CHECK((unpack_hermitian(pa.data(), n) - a).norm() <= 1e-14);
    double dot = 0.0;
    for (int i = 0; i < n * n; ++i) dot += pa[i] * pb[i];
    CHECK(dot == doctest::Approx((a * b).trace().real()).epsilon(1e-12));
  }
}

TEST_CASE("known optimum: symmetric logdet maximization") {
  for (int n : {1, 2, 3}) {
    double p = 2.5;
    KernelSolution s = solve(identity_logdet(n, p));
    REQUIRE(s.status == KernelStatus::Optimal);
    CHECK(s.objective ==
          doctest::Approx(n * std::log(1.0 + p / n)).epsilon(1e-7));
    CHECK((s.x.mats[0] - (p / n) * CMat::Identity(n, n)).norm() <= 1e-3);
    CHECK(s.gap <= 1e-8);
  }
}

TEST_CASE("budget dual matches the sensitivity of the known optimum") {
  int n = 2;
  double p = 3.0;
  KernelSolution s = solve(identity_logdet(n, p));
  REQUIRE(s.status == KernelStatus::Optimal);
  // d/dp [n log(1 + p/n)] = 1 / (1 + p/n); barrier duals carry O(1e-3)
  // relative error from the finite final barrier weight.
  CHECK(s.budget_dual == doctest::Approx(1.0 / (1.0 + p / n)).epsilon(1e-2));
  CHECK(min_eigenvalue(s.psd_duals[0]) >= 0.0);
}

TEST_CASE("known optimum: water-filling through a square channel") {
  Mt64 g(307);
  CMat h(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) h(i, j) = g.cgauss_unit();
  double p = 4.0;

  LogDetProgram prog;
  prog.blocks.push_back({3, true, "x"});
  prog.budget = p;
  LogDetTerm t;
  t.base = CMat::Identity(3, 3);
  t.factors.push_back({0, h});
  prog.objective.logdets.push_back(std::move(t));
  KernelSolution s = solve(prog);
  REQUIRE(s.status == KernelStatus::Optimal);

  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(h.adjoint() * h),
                                         Eigen::EigenvaluesOnly);
  std::vector<double> gains(es.eigenvalues().data(),
                            es.eigenvalues().data() + 3);
  CHECK(s.objective == doctest::Approx(waterfill_value(gains, p)).epsilon(1e-7));
}

TEST_CASE("known optimum: linear objective pushes to the top eigenvector") {
  CMat c = CMat::Zero(2, 2);
  c(0, 0) = 1.0;
  c(1, 1) = 3.0;
  LogDetProgram prog;
  prog.blocks.push_back({2, true, "x"});
  prog.budget = 1.5;
  prog.objective.affine.mat_coeff = {c};
  KernelSolution s = solve(prog);
  REQUIRE(s.status == KernelStatus::Optimal);
  CHECK(s.objective == doctest::Approx(1.5 * 3.0).epsilon(1e-6));
  CHECK(s.x.mats[0](1, 1).real() == doctest::Approx(1.5).epsilon(1e-3));
}

TEST_CASE("scalars ride epigraph rows to the tightest bound") {
  LogDetProgram prog;
  prog.blocks.push_back({1, true, "pad"});
  prog.budget = 1.0;
  prog.num_scalars = 2;
  prog.objective.affine.scalar_coeff = RVec(2);
  prog.objective.affine.scalar_coeff << 1.0, 2.0;
  auto bound = [&](int j, double sign, double constant) {
    ConcaveExpr e;
    e.affine.scalar_coeff = RVec::Zero(2);
    e.affine.scalar_coeff[j] = sign;
    e.affine.constant = constant;
    prog.constraints.push_back(std::move(e));
  };
  bound(0, -1.0, 0.7);   // s0 <= 0.7
  bound(0, 1.0, 5.0);    // s0 >= -5
  bound(1, -1.0, 0.25);  // s1 <= 0.25
  bound(1, 1.0, 5.0);    // s1 >= -5
  KernelSolution s = solve(prog);
  REQUIRE(s.status == KernelStatus::Optimal);
  CHECK(s.objective == doctest::Approx(0.7 + 2.0 * 0.25).epsilon(1e-6));
  CHECK(s.x.scalars[0] == doctest::Approx(0.7).epsilon(1e-4));
  CHECK(s.x.scalars[1] == doctest::Approx(0.25).epsilon(1e-4));
}

TEST_CASE("phase 1 heuristic: identity blocks at the documented scale") {
  LogDetProgram prog = identity_logdet(3, 6.0);
  Phase1Result ph = phase1_initialize(prog);
  REQUIRE(ph.feasible);
  CHECK_FALSE(ph.used_aux);
  const double eps0 = 6.0 / (10.0 * 1 * 3);  // budget / (10 m maxdim)
  CHECK((ph.point.mats[0] - eps0 * CMat::Identity(3, 3)).norm() <= 1e-15);
  CHECK(ph.margin > 0.0);
}

TEST_CASE("phase 1 falls back to the max-slack program when needed") {
  // tr X >= 0.8 p excludes the heuristic point (trace 0.1 p diluted).
  LogDetProgram prog = identity_logdet(2, 2.0);
  ConcaveExpr e;
  e.affine.mat_coeff = {CMat::Identity(2, 2)};
  e.affine.constant = -0.8 * 2.0;
  prog.constraints.push_back(std::move(e));
  Phase1Result ph = phase1_initialize(prog);
  REQUIRE(ph.feasible);
  CHECK(ph.used_aux);
  CHECK(ph.aux_optimum > 0.0);
  CHECK(ph.margin > 0.0);
  auto gv = constraint_values(prog, ph.point);
  CHECK(gv.minCoeff() > 0.0);

  KernelSolution s = solve(prog);
  REQUIRE(s.status == KernelStatus::Optimal);
  // The constraint does not bind the optimum: same value as the free problem.
  CHECK(s.objective ==
        doctest::Approx(2.0 * std::log(1.0 + 1.0)).epsilon(1e-7));
}

TEST_CASE("infeasible programs are certified, not mis-solved") {
  LogDetProgram prog = identity_logdet(2, 1.0);
  ConcaveExpr e;  // tr X >= 2 p: impossible under the budget
  e.affine.mat_coeff = {CMat::Identity(2, 2)};
  e.affine.constant = -2.0;
  prog.constraints.push_back(std::move(e));
  KernelSolution s = solve(prog);
  CHECK(s.status == KernelStatus::Infeasible);
  CHECK(s.infeasibility_certificate <= 0.0);
}

TEST_CASE("one-sided scalar through the aux phase stays bounded") {
  // The scalar enters a single row with +1, so the aux max-slack program
  // covers it only from below; its box rows must keep the analytic center
  // finite. The trace floor forces the aux path.
  LogDetProgram prog = identity_logdet(2, 2.0);
  prog.num_scalars = 1;
  prog.objective.affine.scalar_coeff = RVec::Constant(1, -1.0);
  ConcaveExpr lower;  // s >= 1.9 - tr X
  lower.affine.mat_coeff = {CMat::Identity(2, 2)};
  lower.affine.scalar_coeff = RVec::Constant(1, 1.0);
  lower.affine.constant = -1.9;
  prog.constraints.push_back(std::move(lower));
  ConcaveExpr floor;  // tr X >= 1.5, violated at the heuristic start
  floor.affine.mat_coeff = {CMat::Identity(2, 2)};
  floor.affine.scalar_coeff = RVec::Zero(1);
  floor.affine.constant = -1.5;
  prog.constraints.push_back(std::move(floor));

  Phase1Result ph = phase1_initialize(prog);
  REQUIRE(ph.feasible);
  CHECK(ph.used_aux);
  CHECK(std::abs(ph.point.scalars[0]) < 1e3);  // not parked at a box wall

  KernelSolution s = solve(prog);
  REQUIRE(s.status == KernelStatus::Optimal);
  // s sits on its row, objective = logdet(I+X) + tr X - 1.9, maximized at
  // X = I: 2 log 2 + 0.1.
  CHECK(s.objective ==
        doctest::Approx(2.0 * std::log(2.0) + 0.1).epsilon(1e-6));
  CHECK(s.x.scalars[0] == doctest::Approx(-0.1).epsilon(1e-3));
}

TEST_CASE("determinism: identical inputs give identical solutions") {
  Mt64 g(311);
  CMat h(2, 3);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) h(i, j) = g.cgauss_unit();
  LogDetProgram prog;
  prog.blocks.push_back({3, true, "x"});
  prog.budget = 2.0;
  LogDetTerm t;
  t.base = CMat::Identity(2, 2);
  t.factors.push_back({0, h});
  prog.objective.logdets.push_back(std::move(t));

  KernelSolution a = solve(prog), b = solve(prog);
  REQUIRE(a.status == KernelStatus::Optimal);
  REQUIRE(b.status == KernelStatus::Optimal);
  CHECK(a.objective == b.objective);
  CHECK((a.x.mats[0] - b.x.mats[0]).norm() == 0.0);
  CHECK(a.centers == b.centers);
  CHECK(a.newton_steps == b.newton_steps);
}

TEST_CASE("objective_and_gradient matches finite differences") {
  Mt64 g(313);
  LogDetProgram prog = identity_logdet(3, 5.0);
  prog.objective.affine.mat_coeff = {random_hermitian(g, 3, 0.5)};
  KernelPoint x;
  x.mats = {random_psd(g, 3, 2.0) + 0.2 * CMat::Identity(3, 3)};
  x.scalars = RVec(0);
  RVec grad;
  double f0 = objective_and_gradient(prog, x, &grad);
  CMat dir = random_hermitian(g, 3, 1.0);
  std::vector<double> pd(9);
  pack_hermitian(dir, pd.data());
  const double h = 1e-6;
  KernelPoint xp = x, xm = x;
  xp.mats[0] += h * dir;
  xm.mats[0] -= h * dir;
  double fp = objective_and_gradient(prog, xp, nullptr);
  double fm = objective_and_gradient(prog, xm, nullptr);
  double an = 0.0;
  for (int i = 0; i < 9; ++i) an += grad[i] * pd[i];
  CHECK(an == doctest::Approx((fp - fm) / (2.0 * h)).epsilon(1e-5));
  CHECK(f0 == doctest::Approx(objective_and_gradient(prog, x, nullptr))
                  .epsilon(1e-15));
}

TEST_CASE("interior_margin flags cone exits as nullopt") {
  LogDetProgram prog = identity_logdet(2, 1.0);
  ConcaveExpr e;  // logdet(I + X) >= -10, present so the row walks the cone
  LogDetTerm t;
  t.base = CMat::Identity(2, 2);
  t.factors.push_back({0, CMat::Identity(2, 2)});
  e.logdets.push_back(std::move(t));
  e.affine.constant = 10.0;
  prog.constraints.push_back(std::move(e));

  KernelPoint x;
  x.mats = {-0.5 * CMat::Identity(2, 2)};  // I + X still PD
  x.scalars = RVec(0);
  auto m = interior_margin(prog, x);
  REQUIRE(m.has_value());
  CHECK(*m == doctest::Approx(-0.5).epsilon(1e-12));  // block floor decides
  x.mats = {-2.0 * CMat::Identity(2, 2)};  // I + X indefinite: outside cone
  CHECK_FALSE(interior_margin(prog, x).has_value());
}

TEST_CASE("program validation rejects malformed input") {
  LogDetProgram empty;
  empty.budget = 1.0;
  CHECK_THROWS_AS(empty.check(), DomainError);

  LogDetProgram bad = identity_logdet(2, 1.0);
  bad.objective.logdets[0].weight = -1.0;
  CHECK_THROWS_AS(bad.check(), DomainError);

  LogDetProgram shape = identity_logdet(2, 1.0);
  shape.objective.logdets[0].factors[0].map = CMat::Identity(3, 3);
  CHECK_THROWS_AS(shape.check(), DomainError);

  LogDetProgram scal = identity_logdet(2, 1.0);
  scal.objective.affine.scalar_coeff = RVec::Ones(2);  // no scalars declared
  CHECK_THROWS_AS(scal.check(), DomainError);
}
