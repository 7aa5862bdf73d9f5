#include "srr/ao.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "srr/linalg.hpp"

namespace srr {

namespace {

CMat shifted_gram(const CMat& h, const CMat& q) {
  const int nr = static_cast<int>(h.rows());
  return hermitian_part(CMat::Identity(nr, nr) + h * q * h.adjoint());
}

CMat pd_inverse(const CMat& m) {
  Eigen::LLT<CMat> llt(m);
  if (llt.info() != Eigen::Success)
    throw DomainError("cover: matrix not positive definite");
  return hermitian_part(llt.solve(CMat::Identity(m.rows(), m.cols())));
}

}  // namespace

VariationalOptimum lemma3_closed_form(const CMat& e) {
  VariationalOptimum v;
  v.value = -logdet_hermitian_pd(e);
  v.argmax = pd_inverse(hermitian_part(e));
  return v;
}

WsrmSlacks closed_form_slacks(const ChannelSet& ch, const CMat& qc,
                              const CMat& qa) {
  ch.check();
  WsrmSlacks s;
  s.noise_cover = pd_inverse(shifted_gram(ch.rx[0], qa));
  s.joint_cover.reserve(ch.users());
  for (int k = 0; k < ch.users(); ++k)
    s.joint_cover.push_back(pd_inverse(shifted_gram(ch.rx[k], qa + qc)));
  return s;
}

double wsrm_surrogate(const ChannelSet& ch, const CovarianceTriple& cov,
                      const WsrmSlacks& slacks, double lambda_c) {
  ch.check();
  const CMat& qc = cov.confidential;
  const CMat& qa = cov.noise;
  const CMat& q0 = cov.multicast;

  double phi_b = 0.0;
  if (lambda_c != 0.0) {
    const CMat& h0 = ch.rx[0];
    const CMat& s1 = slacks.noise_cover;
    phi_b = -(s1 * shifted_gram(h0, qa)).trace().real() +
            logdet_hermitian_pd(s1) + ch.n_r(0) +
            logdet_hermitian_pd(shifted_gram(h0, qa + qc));
  }
  double worst_leak = -std::numeric_limits<double>::infinity();
  for (int k = 1; k < ch.users(); ++k) {
    const CMat& h = ch.rx[k];
    const CMat& sk = slacks.joint_cover[k];
    double phi_e = -logdet_hermitian_pd(sk) -
                   logdet_hermitian_pd(shifted_gram(h, qa)) - ch.n_r(k) +
                   (sk * shifted_gram(h, qa + qc)).trace().real();
    worst_leak = std::max(worst_leak, phi_e);
  }
  if (ch.users() == 1) worst_leak = 0.0;

  double floor = std::numeric_limits<double>::infinity();
  for (int k = 0; k < ch.users(); ++k) {
    const CMat& h = ch.rx[k];
    const CMat& uk = slacks.joint_cover[k];
    double phi_m = -(uk * shifted_gram(h, qc + qa)).trace().real() +
                   logdet_hermitian_pd(uk) +
                   logdet_hermitian_pd(shifted_gram(h, q0 + qc + qa)) +
                   ch.n_r(k);
    floor = std::min(floor, phi_m);
  }
  return lambda_c * (phi_b - worst_leak) + floor;
}

LogDetProgram assemble_wsrm_subproblem(const ChannelSet& ch, double power,
                                       double lambda_c,
                                       const WsrmSlacks& slacks,
                                       bool include_an, WsrmLayout* layout) {
  ch.check();
  if (lambda_c < 0.0)
    throw DomainError("assemble_wsrm_subproblem: negative weight");
  const int nt = ch.n_t;
  const int users = ch.users();
  const bool leak_rows = lambda_c > 0.0 && users > 1;

  WsrmLayout lay;
  LogDetProgram p;
  p.budget = power;
  lay.b_q0 = 0;
  p.blocks.push_back({nt, true, "q0"});
  lay.b_qc = 1;
  p.blocks.push_back({nt, true, "qc"});
  if (include_an) {
    lay.b_qa = 2;
    p.blocks.push_back({nt, true, "qa"});
  }
  lay.s_alpha = 0;
  lay.s_beta = leak_rows ? 1 : -1;
  p.num_scalars = leak_rows ? 2 : 1;
  const int nb = static_cast<int>(p.blocks.size());
  auto zero_coeffs = [&] { return std::vector<CMat>(nb); };
  auto scalars = [&] { return RVec::Zero(p.num_scalars); };

  // Objective: lambda_c (phi_b - beta) + alpha with the covers frozen.
  {
    ConcaveExpr e;
    e.affine.mat_coeff = zero_coeffs();
    e.affine.scalar_coeff = scalars();
    e.affine.scalar_coeff[lay.s_alpha] = 1.0;
    if (lambda_c > 0.0) {
      const CMat& h0 = ch.rx[0];
      const CMat& s1 = slacks.noise_cover;
      LogDetTerm t;
      t.weight = lambda_c;
      t.base = CMat::Identity(ch.n_r(0), ch.n_r(0));
      t.factors.push_back({lay.b_qc, h0});
      if (include_an) t.factors.push_back({lay.b_qa, h0});
      e.logdets.push_back(std::move(t));
      if (include_an)
        e.affine.mat_coeff[lay.b_qa] =
            -lambda_c * hermitian_part(h0.adjoint() * s1 * h0);
      e.affine.constant +=
          lambda_c * (-s1.trace().real() + logdet_hermitian_pd(s1) +
                      ch.n_r(0));
      if (leak_rows) e.affine.scalar_coeff[lay.s_beta] = -lambda_c;
    }
    p.objective = std::move(e);
  }

  // Leakage rows: beta - phi_ek >= 0.
  lay.eav_row0 = leak_rows ? 0 : -1;
  if (leak_rows) {
    for (int k = 1; k < users; ++k) {
      const CMat& h = ch.rx[k];
      const CMat& sk = slacks.joint_cover[k];
      ConcaveExpr e;
      if (include_an) {
        LogDetTerm t;
        t.weight = 1.0;
        t.base = CMat::Identity(ch.n_r(k), ch.n_r(k));
        t.factors.push_back({lay.b_qa, h});
        e.logdets.push_back(std::move(t));
      }
      CMat mapped = hermitian_part(h.adjoint() * sk * h);
      e.affine.mat_coeff = zero_coeffs();
      e.affine.mat_coeff[lay.b_qc] = -mapped;
      if (include_an) e.affine.mat_coeff[lay.b_qa] = -mapped;
      e.affine.constant +=
          logdet_hermitian_pd(sk) + ch.n_r(k) - sk.trace().real();
      e.affine.scalar_coeff = scalars();
      e.affine.scalar_coeff[lay.s_beta] = 1.0;
      p.constraints.push_back(std::move(e));
    }
  }

  // Multicast rows: phi_mk - alpha >= 0.
  lay.mul_row0 = static_cast<int>(p.constraints.size());
  for (int k = 0; k < users; ++k) {
    const CMat& h = ch.rx[k];
    const CMat& uk = slacks.joint_cover[k];
    ConcaveExpr e;
    LogDetTerm t;
    t.weight = 1.0;
    t.base = CMat::Identity(ch.n_r(k), ch.n_r(k));
    t.factors.push_back({lay.b_q0, h});
    t.factors.push_back({lay.b_qc, h});
    if (include_an) t.factors.push_back({lay.b_qa, h});
    e.logdets.push_back(std::move(t));
    CMat mapped = hermitian_part(h.adjoint() * uk * h);
    e.affine.mat_coeff = zero_coeffs();
    e.affine.mat_coeff[lay.b_qc] = -mapped;
    if (include_an) e.affine.mat_coeff[lay.b_qa] = -mapped;
    e.affine.constant +=
        logdet_hermitian_pd(uk) + ch.n_r(k) - uk.trace().real();
    e.affine.scalar_coeff = scalars();
    e.affine.scalar_coeff[lay.s_alpha] = -1.0;
    p.constraints.push_back(std::move(e));
  }
  if (layout) *layout = lay;
  return p;
}

AoResult ao_solve(const ChannelSet& ch, double power, double lambda_c,
                  const AoConfig& cfg) {
  ch.check();
  if (power < 0.0) throw DomainError("ao_solve: negative power");
  if (lambda_c < 0.0) throw DomainError("ao_solve: negative weight");
  AoResult res;
  res.cov = CovarianceTriple::zero(ch.n_t, power);
  if (power == 0.0) {
    res.rates = rate_point(ch, res.cov);
    res.converged = true;
    res.status = "ok";
    res.trace.push_back({1, 0.0, 0.0, 0.0});
    return res;
  }

  const int nt = ch.n_t;
  CMat qc = CMat::Identity(nt, nt) * (power / (2.0 * nt));
  CMat qa = cfg.include_an ? qc : CMat(CMat::Zero(nt, nt));
  CMat q0_prev = CMat::Zero(nt, nt);

  KernelPoint hint_store;
  const KernelPoint* hint = nullptr;
  double prev_f_bits = std::numeric_limits<double>::quiet_NaN();
  bool f_settled = false;
  int tail = 0;
  const double move_tol = 1e-6 * (1.0 + power);
  const int max_tail = 60;

  for (int n = 1; n <= cfg.max_outer; ++n) {
    WsrmSlacks slacks = closed_form_slacks(ch, qc, qa);
    WsrmLayout lay;
    LogDetProgram prog = assemble_wsrm_subproblem(ch, power, lambda_c, slacks,
                                                  cfg.include_an, &lay);
    const KernelPoint* use_hint = nullptr;
    if (hint && hint->mats.size() == prog.blocks.size() &&
        hint->scalars.size() == prog.num_scalars)
      use_hint = hint;
    KernelSolution sol = solve(prog, cfg.kernel, use_hint);
    ++res.inner_solves;
    if (sol.status != KernelStatus::Optimal) {
      res.status = "failed";
      return res;
    }
    res.cov.multicast = sanitize_psd(sol.x.mats[lay.b_q0]);
    res.cov.confidential = sanitize_psd(sol.x.mats[lay.b_qc]);
    if (cfg.include_an) res.cov.noise = sanitize_psd(sol.x.mats[lay.b_qa]);
    res.rates = rate_point(ch, res.cov);
    res.objective_nats = sol.objective;
    res.outer_iters = n;
    res.trace.push_back({n, sol.objective, res.rates.multicast_bits,
                         res.rates.secrecy_bits});

    res.duals.lambda_c = lambda_c;
    res.duals.budget = sol.budget_dual;
    res.duals.z_multicast = sol.psd_duals[lay.b_q0];
    res.duals.z_confidential = sol.psd_duals[lay.b_qc];
    res.duals.z_noise = cfg.include_an ? sol.psd_duals[lay.b_qa]
                                       : CMat(CMat::Zero(nt, nt));
    const int n_eav = lay.eav_row0 >= 0 ? ch.users() - 1 : 0;
    res.duals.eav_raw.resize(n_eav);
    for (int k = 0; k < n_eav; ++k)
      res.duals.eav_raw[k] = sol.constraint_duals[lay.eav_row0 + k];
    res.duals.multicast_raw.resize(ch.users());
    for (int k = 0; k < ch.users(); ++k)
      res.duals.multicast_raw[k] = sol.constraint_duals[lay.mul_row0 + k];
    res.duals.alpha = sol.x.scalars[lay.s_alpha];
    res.duals.beta = lay.s_beta >= 0 ? sol.x.scalars[lay.s_beta] : 0.0;
    res.duals.valid = true;

    const double moved = (res.cov.multicast - q0_prev).norm() +
                         (res.cov.confidential - qc).norm() +
                         (res.cov.noise - qa).norm();
    q0_prev = res.cov.multicast;
    qc = res.cov.confidential;
    qa = res.cov.noise;
    hint_store = sol.x;
    hint = &hint_store;

    const double f_bits = nats_to_bits(sol.objective);
    if (std::isfinite(prev_f_bits) &&
        std::abs(f_bits - prev_f_bits) <= cfg.tol_bits)
      f_settled = true;
    prev_f_bits = f_bits;
    // The duals above certify the point the covers were built from, which is
    // the delivered point only when consecutive iterates coincide.  So once
    // the objective settles, keep alternating until the iterate stops moving.
    if (f_settled && (moved <= move_tol || ++tail >= max_tail)) {
      res.converged = true;
      break;
    }
  }
  if (f_settled) res.converged = true;
  res.status = res.converged ? "ok" : "max_outer";
  return res;
}

std::vector<double> default_weight_grid() {
  // Zero (pure multicast endpoint) plus 20 log-spaced weights in [0.05, 20].
  std::vector<double> w{0.0};
  for (int i = 0; i < 20; ++i)
    w.push_back(0.05 * std::pow(400.0, i / 19.0));
  return w;
}

RegionBoundary trace_region_ao(const ChannelSet& ch, double power,
                               const AoSweepConfig& cfg) {
  using clock = std::chrono::steady_clock;
  RegionBoundary rb;
  rb.method = "ao";
  std::vector<double> weights =
      cfg.weights.empty() ? default_weight_grid() : cfg.weights;
  for (double w : weights) {
    auto t0 = clock::now();
    AoResult r = ao_solve(ch, power, w, cfg.ao);
    auto t1 = clock::now();
    BoundaryRecord rec;
    rec.param = w;
    rec.r0_bits = r.rates.multicast_bits;
    rec.rc_bits = r.rates.secrecy_bits;
    rec.outer_iters = r.outer_iters;
    rec.inner_solves = r.inner_solves;
    rec.wall_ms =
        std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(
            t1 - t0)
            .count();
    rec.status = r.status;
    rec.trace = r.trace;
    rb.records.push_back(std::move(rec));
    rb.solutions.push_back(r.cov);
  }
  return rb;
}

}  // namespace srr
