#include "srr/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <vector>

#include "srr/capacities.hpp"
#include "srr/dc.hpp"
#include "srr/linalg.hpp"

namespace srr {

namespace {

double shifted_logdet(const CMat& h, const CMat& q) {
  const int nr = static_cast<int>(h.rows());
  CMat m = CMat::Identity(nr, nr) + h * q * h.adjoint();
  return logdet_hermitian_pd(hermitian_part(m));
}

CMat shifted_inverse_map(const CMat& h, const CMat& q) {
  const int nr = static_cast<int>(h.rows());
  CMat m = hermitian_part(CMat::Identity(nr, nr) + h * q * h.adjoint());
  Eigen::LLT<CMat> llt(m);
  if (llt.info() != Eigen::Success)
    throw DomainError("verify: shifted Gram matrix not PD");
  return hermitian_part(h.adjoint() * llt.solve(h));
}

}  // namespace

Lemma3Check check_lemma3(const CMat& e, const SolverConfig& cfg) {
  Lemma3Check out;
  VariationalOptimum closed = lemma3_closed_form(e);
  const int n = static_cast<int>(e.rows());

  LogDetProgram p;
  p.blocks.push_back({n, true, "s"});
  p.budget = 10.0 * (closed.argmax.real().trace() + n);
  LogDetTerm t;
  t.weight = 1.0;
  t.factors.push_back({0, CMat::Identity(n, n)});
  ConcaveExpr obj;
  obj.logdets.push_back(std::move(t));
  obj.affine.mat_coeff.push_back(-hermitian_part(e));
  obj.affine.constant = n;
  p.objective = std::move(obj);

  SolverConfig scfg = cfg;
  scfg.eps = std::min(cfg.eps, 1e-9);
  KernelSolution sol = solve(p, scfg);
  out.status = sol.status;
  if (sol.status != KernelStatus::Optimal) return out;
  out.value_gap = std::abs(sol.objective - closed.value);
  out.argmax_gap = (sol.x.mats[0] - closed.argmax).norm();
  out.pass = out.value_gap <= 1e-6 && out.argmax_gap <= 1e-6;
  return out;
}

bool check_det_ratio(const CMat& a, const CMat& b, const CMat& d, double tol,
                     double* gap) {
  const double lhs = logdet_hermitian_pd(hermitian_part(a + b)) -
                     logdet_hermitian_pd(hermitian_part(b));
  const double rhs = logdet_hermitian_pd(hermitian_part(a + b + d)) -
                     logdet_hermitian_pd(hermitian_part(b + d));
  const double g = lhs - rhs;
  if (gap) *gap = g;
  return g >= -tol;
}

double danskin_gap(const ChannelSet& ch, const CovarianceTriple& cov) {
  ch.check();
  CovarianceTriple s = sanitize(cov);
  WsrmSlacks sl = closed_form_slacks(ch, s.confidential, s.noise);
  double gap = 0.0;
  auto track = [&](const CMat& a, const CMat& b) {
    gap = std::max(gap, (a - b).norm());
  };

  // Authorized link, cover route vs capacity route.
  {
    const CMat& h0 = ch.rx[0];
    CMat joint = shifted_inverse_map(h0, s.confidential + s.noise);
    CMat cover_qc = joint;
    CMat cover_qa =
        joint - hermitian_part(h0.adjoint() * sl.noise_cover * h0);
    TripleGrad g = grad_confidential(ch, s);
    track(cover_qc, g.confidential);
    track(cover_qa, g.noise);
  }
  for (int k = 1; k < ch.users(); ++k) {
    const CMat& h = ch.rx[k];
    CMat mapped = hermitian_part(h.adjoint() * sl.joint_cover[k] * h);
    CMat cover_qc = mapped;
    CMat cover_qa = mapped - shifted_inverse_map(h, s.noise);
    TripleGrad g = grad_eavesdrop(ch, s, k);
    track(cover_qc, g.confidential);
    track(cover_qa, g.noise);
  }
  for (int k = 0; k < ch.users(); ++k) {
    const CMat& h = ch.rx[k];
    CMat full = shifted_inverse_map(h, s.sum());
    CMat mapped = hermitian_part(h.adjoint() * sl.joint_cover[k] * h);
    TripleGrad g = grad_multicast(ch, s, k);
    track(full, g.multicast);
    track(full - mapped, g.confidential);
    track(full - mapped, g.noise);
  }
  return gap;
}

CMat orth_complement_projector(const CMat& h, double rho) {
  const int rows = static_cast<int>(h.rows());
  const int cols = static_cast<int>(h.cols());
  if (rows >= cols)
    throw DomainError(
        "orth_complement_projector: needs strictly fewer rows than columns");
  CMat gram = hermitian_part(h * h.adjoint());
  Eigen::LLT<CMat> llt(gram);
  if (llt.info() != Eigen::Success)
    throw DomainError("orth_complement_projector: rows not independent");
  const auto& l = llt.matrixLLT();
  double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
  for (int i = 0; i < rows; ++i) {
    double piv = l(i, i).real();
    dmin = std::min(dmin, piv);
    dmax = std::max(dmax, piv);
  }
  if (dmin * dmin <= 1e-14 * dmax * dmax)
    throw DomainError("orth_complement_projector: rows nearly dependent");
  CMat proj = h.adjoint() * llt.solve(h);
  return hermitian_part(rho * (CMat::Identity(cols, cols) - proj));
}

SlackImprovement improve_if_slack(const ChannelSet& ch,
                                  const CovarianceTriple& cov,
                                  double tau_bits) {
  ch.check();
  SlackImprovement out;
  out.cov = cov;
  const double m = multicast_rate(ch, cov);
  out.pre_slack_bits = m - tau_bits;
  if (m < tau_bits - 1e-9)
    throw DomainError("improve_if_slack: multicast rate below the floor");
  if (out.pre_slack_bits <= 1e-6) return out;

  int sum_eav = 0;
  for (int k = 1; k < ch.users(); ++k) sum_eav += ch.n_r(k);
  int condition;
  CMat stack;
  if (ch.n_t > ch.n_r(0)) {
    condition = 1;
    stack = ch.rx[0];
  } else if (ch.users() > 1 && ch.n_t > sum_eav) {
    condition = 2;
    stack = CMat(sum_eav, ch.n_t);
    int row = 0;
    for (int k = 1; k < ch.users(); ++k) {
      stack.middleRows(row, ch.n_r(k)) = ch.rx[k];
      row += ch.n_r(k);
    }
  } else {
    throw DomainError(
        "improve_if_slack: no null space available at this geometry");
  }
  const double q0_trace = cov.multicast.real().trace();
  const int denom = ch.n_t - static_cast<int>(stack.rows());
  CMat unit = orth_complement_projector(stack, 1.0);

  auto build = [&](double xi) {
    CovarianceTriple c = cov;
    const double rho = (1.0 - xi) * q0_trace / denom;
    c.multicast = cov.multicast * xi;
    if (condition == 1)
      c.noise = cov.noise + rho * unit;
    else
      c.confidential = cov.confidential + rho * unit;
    return c;
  };
  auto floor_gap = [&](double xi) {
    return multicast_rate(ch, build(xi)) - tau_bits;
  };

  double lo = 0.0, hi = 1.0, mid = 1.0;
  for (int it = 0; it < 70; ++it) {
    mid = 0.5 * (lo + hi);
    const double g = floor_gap(mid);
    if (std::abs(g) <= 1e-8) break;
    if (g > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  out.cov = build(mid);
  if (std::abs(multicast_rate(ch, out.cov) - tau_bits) > 1e-6)
    out.cov = build(hi);
  out.improved = true;
  out.condition = condition;
  out.xi = mid;
  return out;
}

double KktReport::max_stationarity() const {
  return std::max({stat_multicast, stat_confidential, stat_noise});
}

bool KktReport::pass(double tol) const {
  return max_stationarity() <= tol && viol_eav <= tol && viol_mul <= tol &&
         comp_eav <= tol && comp_mul <= tol && comp_budget <= tol &&
         comp_psd <= tol && simplex_eav <= tol && simplex_mul <= tol &&
         sign_violation <= tol && zmin_multicast >= -tol &&
         zmin_confidential >= -tol && zmin_noise >= -tol &&
         trace_slack >= -tol && danskin <= tol;
}

KktReport kkt_residuals(const ChannelSet& ch, const CovarianceTriple& cov,
                        const AoDuals& duals) {
  ch.check();
  if (!duals.valid) throw DomainError("kkt_residuals: missing duals");
  const double lc = duals.lambda_c;
  if (lc <= 0.0)
    throw DomainError("kkt_residuals: needs a positive secrecy weight");
  if (ch.users() < 2)
    throw DomainError("kkt_residuals: needs at least one eavesdropper");
  if (duals.eav_raw.size() != ch.users() - 1 ||
      duals.multicast_raw.size() != ch.users())
    throw DomainError("kkt_residuals: dual vector sizes do not match");

  CovarianceTriple s = sanitize(cov);
  const int nt = ch.n_t;
  KktReport r;

  RVec ce(ch.users() - 1), cm(ch.users());
  for (int k = 1; k < ch.users(); ++k)
    ce[k - 1] = bits_to_nats(eavesdrop_capacity(ch, s, k));
  for (int k = 0; k < ch.users(); ++k)
    cm[k] = bits_to_nats(multicast_capacity(ch, s, k));
  const double beta_t = ce.maxCoeff();
  const double alpha_t = cm.minCoeff();

  const double rho_sum = duals.eav_raw.sum();
  const double mu_sum = duals.multicast_raw.sum();
  RVec rho = duals.eav_raw / (rho_sum > 0.0 ? rho_sum : 1.0);
  RVec mu = duals.multicast_raw / (mu_sum > 0.0 ? mu_sum : 1.0);
  const double gamma = duals.budget;

  CMat i_nt = CMat::Identity(nt, nt);
  CMat g0 = -gamma * i_nt + duals.z_multicast;
  CMat gc = -gamma * i_nt + duals.z_confidential;
  CMat ga = -gamma * i_nt + duals.z_noise;

  TripleGrad gb = grad_confidential(ch, s);
  gc += lc * gb.confidential;
  ga += lc * gb.noise;
  for (int k = 1; k < ch.users(); ++k) {
    TripleGrad ge = grad_eavesdrop(ch, s, k);
    gc -= lc * rho[k - 1] * ge.confidential;
    ga -= lc * rho[k - 1] * ge.noise;
  }
  for (int k = 0; k < ch.users(); ++k) {
    TripleGrad gm = grad_multicast(ch, s, k);
    g0 += mu[k] * gm.multicast;
    gc += mu[k] * gm.confidential;
    ga += mu[k] * gm.noise;
  }
  r.stat_multicast = g0.norm();
  r.stat_confidential = gc.norm();
  r.stat_noise = ga.norm();

  for (int k = 0; k < ch.users() - 1; ++k) {
    r.viol_eav = std::max(r.viol_eav, std::max(0.0, ce[k] - beta_t));
    r.comp_eav = std::max(r.comp_eav, std::abs(rho[k] * (ce[k] - beta_t)));
  }
  for (int k = 0; k < ch.users(); ++k) {
    r.viol_mul = std::max(r.viol_mul, std::max(0.0, alpha_t - cm[k]));
    r.comp_mul = std::max(r.comp_mul, std::abs(mu[k] * (alpha_t - cm[k])));
  }
  r.trace_slack = s.power - s.total_trace();
  r.comp_budget = std::abs(gamma * r.trace_slack);
  r.comp_psd = std::max(
      {std::abs((duals.z_multicast * s.multicast).trace().real()),
       std::abs((duals.z_confidential * s.confidential).trace().real()),
       std::abs((duals.z_noise * s.noise).trace().real())});
  r.simplex_eav = std::abs(rho_sum / lc - 1.0);
  r.simplex_mul = std::abs(mu_sum - 1.0);
  double most_negative = std::min(
      {duals.eav_raw.size() ? duals.eav_raw.minCoeff() : 0.0,
       duals.multicast_raw.minCoeff(), gamma});
  r.sign_violation = std::max(0.0, -most_negative);
  r.zmin_multicast = min_eigenvalue(duals.z_multicast);
  r.zmin_confidential = min_eigenvalue(duals.z_confidential);
  r.zmin_noise = min_eigenvalue(duals.z_noise);
  r.danskin = danskin_gap(ch, s);
  return r;
}

ScalarOracleResult brute_force_scalar_oracle(const ScalarInstance& inst) {
  if (inst.users < 1 ||
      static_cast<int>(inst.gains.size()) != inst.users)
    throw DomainError("scalar oracle: gain count must match users");
  for (double g : inst.gains)
    if (g < 0.0) throw DomainError("scalar oracle: negative gain");
  if (inst.power <= 0.0) throw DomainError("scalar oracle: power must be > 0");
  const bool floor_mode = inst.tau_bits >= 0.0;
  const bool weighted_mode = inst.lambda_c >= 0.0;
  if (floor_mode == weighted_mode)
    throw DomainError("scalar oracle: choose exactly one of tau or weight");
  const double step = inst.step > 0.0 ? inst.step : inst.power / 200.0;
  if (step > 0.02 * inst.power + 1e-15)
    throw DomainError("scalar oracle: step too coarse for the power budget");

  const int n = static_cast<int>(std::floor(inst.power / step + 1e-9));
  const double tau_nats = floor_mode ? bits_to_nats(inst.tau_bits) : 0.0;
  const auto& g = inst.gains;
  const int users = inst.users;

  auto objective = [&](double q0, double qc, double qa) {
    double cb = std::log1p(g[0] * (qc + qa)) - std::log1p(g[0] * qa);
    double leak = 0.0;
    for (int k = 1; k < users; ++k)
      leak = std::max(leak, std::log1p(g[k] * (qc + qa)) -
                                std::log1p(g[k] * qa));
    if (users == 1) leak = 0.0;
    double floor = std::numeric_limits<double>::infinity();
    for (int k = 0; k < users; ++k)
      floor = std::min(floor, std::log1p(g[k] * (q0 + qc + qa)) -
                                  std::log1p(g[k] * (qc + qa)));
    if (floor_mode) return cb - leak;  // the floor gates feasibility instead
    return inst.lambda_c * (cb - leak) + floor;
  };
  auto floor_value = [&](double q0, double qc, double qa) {
    double floor = std::numeric_limits<double>::infinity();
    for (int k = 0; k < users; ++k)
      floor = std::min(floor, std::log1p(g[k] * (q0 + qc + qa)) -
                                  std::log1p(g[k] * (qc + qa)));
    return floor;
  };

  ScalarOracleResult out;
  out.step = step;
  double best = -std::numeric_limits<double>::infinity();
  double lip = 0.0;

  std::vector<double> prev_plane((n + 1) * (n + 1),
                                 std::numeric_limits<double>::quiet_NaN());
  std::vector<double> plane((n + 1) * (n + 1),
                            std::numeric_limits<double>::quiet_NaN());
  std::vector<double> prev_row(n + 1), row(n + 1);

  for (int l = 0; l <= n; ++l) {
    const double qa = l * step;
    for (int j = 0; j + l <= n; ++j) {
      const double qc = j * step;
      for (int i = 0; i + j + l <= n; ++i) {
        const double q0 = i * step;
        const double f = objective(q0, qc, qa);
        row[i] = f;
        if (i > 0) lip = std::max(lip, std::abs(f - row[i - 1]) / step);
        if (j > 0 && i + j - 1 + l <= n)
          lip = std::max(lip, std::abs(f - prev_row[i]) / step);
        const double pv = prev_plane[j * (n + 1) + i];
        if (l > 0 && !std::isnan(pv))
          lip = std::max(lip, std::abs(f - pv) / step);
        plane[j * (n + 1) + i] = f;

        if (floor_mode && floor_value(q0, qc, qa) < tau_nats) continue;
        if (f > best) {
          best = f;
          out.q0 = q0;
          out.qc = qc;
          out.qa = qa;
        }
      }
      std::swap(prev_row, row);
    }
    std::swap(prev_plane, plane);
    std::fill(plane.begin(), plane.end(),
              std::numeric_limits<double>::quiet_NaN());
  }
  out.feasible = std::isfinite(best);
  out.value_bits = out.feasible ? nats_to_bits(best) : 0.0;
  out.lipschitz_bits = nats_to_bits(lip);
  return out;
}

MajorizationCheck tse_majorization_check(const ChannelSet& ch, double power,
                                         int samples, std::uint64_t seed) {
  ch.check();
  Mt64 gen(seed);
  MajorizationCheck out;
  out.samples = samples;
  double min_slack = std::numeric_limits<double>::infinity();
  double max_tan = 0.0;
  const int nt = ch.n_t;
  for (int s = 0; s < samples; ++s) {
    CMat qa0 = random_psd(gen, nt, power * gen.uniform() / 4.0);
    CMat qc0 = random_psd(gen, nt, power * gen.uniform() / 4.0);
    CMat qa = random_psd(gen, nt, power * gen.uniform() / 4.0);
    CMat qc = random_psd(gen, nt, power * gen.uniform() / 4.0);

    NoiseExpansion nx = expand_noise_logdet(ch.rx[0], qa0);
    min_slack =
        std::min(min_slack, nx.at(qa) - shifted_logdet(ch.rx[0], qa));
    max_tan = std::max(
        max_tan, std::abs(nx.at(qa0) - shifted_logdet(ch.rx[0], qa0)));
    for (int k = 0; k < ch.users(); ++k) {
      JointExpansion jx = expand_joint_logdet(ch.rx[k], qc0, qa0);
      min_slack = std::min(
          min_slack, jx.at(qc, qa) - shifted_logdet(ch.rx[k], qc + qa));
      max_tan = std::max(max_tan, std::abs(jx.at(qc0, qa0) -
                                           shifted_logdet(ch.rx[k],
                                                          qc0 + qa0)));
    }
  }
  out.min_slack = min_slack;
  out.max_tangency_gap = max_tan;
  out.pass = min_slack >= -1e-9 && max_tan <= 1e-10;
  return out;
}

BatteryResult run_identity_battery(std::uint64_t seed) {
  using clock = std::chrono::steady_clock;
  auto t0 = clock::now();
  BatteryResult out;
  Mt64 gen(seed);

  {
    BatterySuite s;
    s.name = "variational closed form (worst gap)";
    s.total = 50;
    for (int i = 0; i < s.total; ++i) {
      const int dim = 2 + i % 4;
      CMat g = random_psd(gen, dim, 1.0 + 3.0 * gen.uniform());
      CMat e = g + (0.2 * g.real().trace() / dim + 0.05) *
                       CMat::Identity(dim, dim);
      Lemma3Check c = check_lemma3(e);
      s.worst = std::max({s.worst, c.value_gap, c.argmax_gap});
      if (c.pass) ++s.passed;
    }
    s.pass = s.passed == s.total;
    out.suites.push_back(std::move(s));
  }
  {
    BatterySuite s;
    s.name = "determinant-ratio monotonicity (worst margin)";
    s.total = 200;
    double min_gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < s.total; ++i) {
      CMat a = random_psd(gen, 4, 4.0 * gen.uniform());
      CMat b = random_psd(gen, 4, 4.0 * gen.uniform()) +
               0.3 * CMat::Identity(4, 4);
      CMat d = random_psd(gen, 4, 4.0 * gen.uniform());
      double g = 0.0;
      if (check_det_ratio(a, b, d, 1e-12, &g)) ++s.passed;
      min_gap = std::min(min_gap, g);
    }
    s.worst = min_gap;
    s.pass = s.passed == s.total;
    out.suites.push_back(std::move(s));
  }
  {
    BatterySuite s;
    s.name = "surrogate majorization (worst slack)";
    s.total = 500;
    ChannelSet ch;
    ch.n_t = 4;
    for (int k = 0; k < 3; ++k) {
      CMat h(2, 4);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 4; ++j) h(i, j) = gen.cgauss_unit();
      ch.rx.push_back(std::move(h));
    }
    MajorizationCheck c = tse_majorization_check(
        ch, 10.0, s.total, seed ^ 0x9e3779b97f4a7c15ull);
    s.passed = c.pass ? s.total : 0;
    s.worst = std::min(c.min_slack, -c.max_tangency_gap);
    s.pass = c.pass;
    out.suites.push_back(std::move(s));
  }
  {
    BatterySuite s;
    s.name = "gradient identities (worst mismatch)";
    s.total = 100;
    for (int i = 0; i < s.total; ++i) {
      ChannelSet ch;
      ch.n_t = 3;
      const int sizes[3] = {2, 2, 1};
      for (int k = 0; k < 3; ++k) {
        CMat h(sizes[k], 3);
        for (int r = 0; r < sizes[k]; ++r)
          for (int c = 0; c < 3; ++c) h(r, c) = gen.cgauss_unit();
        ch.rx.push_back(std::move(h));
      }
      CovarianceTriple cov = CovarianceTriple::zero(3, 10.0);
      cov.multicast = random_psd(gen, 3, 3.0 * gen.uniform() + 0.1);
      cov.confidential = random_psd(gen, 3, 3.0 * gen.uniform() + 0.1);
      cov.noise = random_psd(gen, 3, 3.0 * gen.uniform() + 0.1);
      const double g = danskin_gap(ch, cov);
      s.worst = std::max(s.worst, g);
      if (g <= 1e-8) ++s.passed;
    }
    s.pass = s.passed == s.total;
    out.suites.push_back(std::move(s));
  }

  out.pass = true;
  for (const BatterySuite& s : out.suites) out.pass = out.pass && s.pass;
  out.wall_ms = std::chrono::duration_cast<
                    std::chrono::duration<double, std::milli>>(clock::now() -
                                                               t0)
                    .count();
  return out;
}

double tau_max_two_user_miso_oracle(const ChannelSet& ch, double power) {
  ch.check();
  if (ch.users() != 2 || ch.n_r(0) != 1 || ch.n_r(1) != 1)
    throw DomainError("oracle: needs exactly two single-antenna receivers");
  CVec h0 = ch.rx[0].adjoint().col(0);
  CVec h1 = ch.rx[1].adjoint().col(0);
  auto top = [&](double m) {
    CMat a = m * h0 * h0.adjoint() + (1.0 - m) * h1 * h1.adjoint();
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(a),
                                           Eigen::EigenvaluesOnly);
    return power * es.eigenvalues().maxCoeff();
  };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = 1.0;
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = top(x1), f2 = top(x2);
  for (int it = 0; it < 120; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = top(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = top(x2);
    }
  }
  return std::log2(1.0 + std::min(f1, f2));
}

}  // namespace srr
