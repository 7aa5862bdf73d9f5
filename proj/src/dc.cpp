#include "srr/dc.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "srr/linalg.hpp"

namespace srr {

namespace {

CMat shifted_inverse_map(const CMat& h, const CMat& q) {
  // H^H (I + H Q H^H)^{-1} H, the slope of logdet(I + H (.) H^H) at q.
  const int nr = static_cast<int>(h.rows());
  CMat m = hermitian_part(CMat::Identity(nr, nr) + h * q * h.adjoint());
  Eigen::LLT<CMat> llt(m);
  if (llt.info() != Eigen::Success)
    throw DomainError("expansion: shifted Gram matrix not PD");
  return hermitian_part(h.adjoint() * llt.solve(h));
}

double shifted_logdet(const CMat& h, const CMat& q) {
  const int nr = static_cast<int>(h.rows());
  CMat m = CMat::Identity(nr, nr) + h * q * h.adjoint();
  return logdet_hermitian_pd(hermitian_part(m));
}

}  // namespace

NoiseExpansion expand_noise_logdet(const CMat& h, const CMat& qa0) {
  NoiseExpansion e;
  e.slope = shifted_inverse_map(h, qa0);
  e.offset = shifted_logdet(h, qa0) - (e.slope * qa0).trace().real();
  return e;
}

JointExpansion expand_joint_logdet(const CMat& h, const CMat& qc0,
                                   const CMat& qa0) {
  JointExpansion e;
  CMat sum0 = qc0 + qa0;
  e.slope = shifted_inverse_map(h, sum0);
  e.offset = shifted_logdet(h, sum0) - (e.slope * sum0).trace().real();
  return e;
}

TauMaxResult compute_tau_max(const ChannelSet& ch, double power,
                             const SolverConfig& kernel) {
  ch.check();
  if (power < 0.0) throw DomainError("compute_tau_max: negative power");
  TauMaxResult r;
  if (power == 0.0) {
    r.tau_bits = 0.0;
    r.q0 = CMat::Zero(ch.n_t, ch.n_t);
    return r;
  }
  LogDetProgram p;
  p.blocks.push_back({ch.n_t, true, "q0"});
  p.num_scalars = 1;
  p.budget = power;
  p.objective.affine.scalar_coeff = RVec::Ones(1);
  for (int k = 0; k < ch.users(); ++k) {
    ConcaveExpr e;
    LogDetTerm t;
    t.weight = 1.0;
    t.base = CMat::Identity(ch.n_r(k), ch.n_r(k));
    t.factors.push_back({0, ch.rx[k]});
    e.logdets.push_back(std::move(t));
    e.affine.scalar_coeff = -RVec::Ones(1);
    p.constraints.push_back(std::move(e));
  }
  KernelSolution sol = solve(p, kernel);
  if (sol.status != KernelStatus::Optimal)
    throw DomainError("compute_tau_max: kernel did not converge");
  r.q0 = sanitize_psd(sol.x.mats[0]);
  CovarianceTriple cov = CovarianceTriple::zero(ch.n_t, power);
  cov.multicast = r.q0;
  r.tau_bits = multicast_rate(ch, cov);
  r.sol = std::move(sol);
  return r;
}

LogDetProgram assemble_dc_subproblem(const ChannelSet& ch, double power,
                                     double tau_nats, const CMat& qc0,
                                     const CMat& qa0, const DcOptions& opt) {
  ch.check();
  const int nt = ch.n_t;
  const int users = ch.users();
  const bool an = opt.include_an;
  const bool has_eav = users > 1;

  LogDetProgram p;
  p.budget = power;
  int b_q0 = -1, b_qc = -1, b_qa = -1;
  if (opt.include_multicast) {
    b_q0 = static_cast<int>(p.blocks.size());
    p.blocks.push_back({nt, true, "q0"});
  }
  b_qc = static_cast<int>(p.blocks.size());
  p.blocks.push_back({nt, true, "qc"});
  if (an) {
    b_qa = static_cast<int>(p.blocks.size());
    p.blocks.push_back({nt, true, "qa"});
  }
  p.num_scalars = has_eav ? 1 : 0;  // leakage bound

  const int nb = static_cast<int>(p.blocks.size());
  auto zero_coeffs = [&] { return std::vector<CMat>(nb); };

  // Objective: logdet(I + H0 (Qc [+Qa]) H0^H) - expansion of the receiver-0
  // noise floor - leakage bound.
  {
    ConcaveExpr e;
    LogDetTerm t;
    t.weight = 1.0;
    t.base = CMat::Identity(ch.n_r(0), ch.n_r(0));
    t.factors.push_back({b_qc, ch.rx[0]});
    if (an) t.factors.push_back({b_qa, ch.rx[0]});
    e.logdets.push_back(std::move(t));
    e.affine.mat_coeff = zero_coeffs();
    if (an) {
      NoiseExpansion nx = expand_noise_logdet(ch.rx[0], qa0);
      e.affine.mat_coeff[b_qa] = -nx.slope;
      e.affine.constant -= nx.offset;
    }
    if (has_eav) {
      e.affine.scalar_coeff = RVec::Constant(1, -1.0);
    }
    p.objective = std::move(e);
  }

  // Eavesdropper rows: logdet(I + Hk Qa Hk^H) - expansion of the joint
  // logdet + bound >= 0.
  for (int k = 1; k < users; ++k) {
    ConcaveExpr e;
    if (an) {
      LogDetTerm t;
      t.weight = 1.0;
      t.base = CMat::Identity(ch.n_r(k), ch.n_r(k));
      t.factors.push_back({b_qa, ch.rx[k]});
      e.logdets.push_back(std::move(t));
    }
    JointExpansion jx = expand_joint_logdet(
        ch.rx[k], qc0, an ? qa0 : CMat(CMat::Zero(nt, nt)));
    e.affine.mat_coeff = zero_coeffs();
    e.affine.mat_coeff[b_qc] = -jx.slope;
    if (an) e.affine.mat_coeff[b_qa] = -jx.slope;
    e.affine.constant -= jx.offset;
    e.affine.scalar_coeff = RVec::Constant(1, 1.0);
    p.constraints.push_back(std::move(e));
  }

  // Multicast floor rows: logdet(I + Hk (Q0+Qc[+Qa]) Hk^H) - expansion of
  // the same receiver's joint logdet - tau >= 0.
  if (opt.include_multicast) {
    for (int k = 0; k < users; ++k) {
      ConcaveExpr e;
      LogDetTerm t;
      t.weight = 1.0;
      t.base = CMat::Identity(ch.n_r(k), ch.n_r(k));
      t.factors.push_back({b_q0, ch.rx[k]});
      t.factors.push_back({b_qc, ch.rx[k]});
      if (an) t.factors.push_back({b_qa, ch.rx[k]});
      e.logdets.push_back(std::move(t));
      JointExpansion jx = expand_joint_logdet(
          ch.rx[k], qc0, an ? qa0 : CMat(CMat::Zero(nt, nt)));
      e.affine.mat_coeff = zero_coeffs();
      e.affine.mat_coeff[b_qc] = -jx.slope;
      if (an) e.affine.mat_coeff[b_qa] = -jx.slope;
      e.affine.constant -= jx.offset + tau_nats;
      if (has_eav) e.affine.scalar_coeff = RVec::Zero(1);
      p.constraints.push_back(std::move(e));
    }
  }
  return p;
}

namespace {

CovarianceTriple triple_from_kernel(const ChannelSet& ch,
                                    const KernelSolution& sol, double power,
                                    const DcOptions& opt) {
  CovarianceTriple cov = CovarianceTriple::zero(ch.n_t, power);
  int idx = 0;
  if (opt.include_multicast) cov.multicast = sanitize_psd(sol.x.mats[idx++]);
  cov.confidential = sanitize_psd(sol.x.mats[idx++]);
  if (opt.include_an) cov.noise = sanitize_psd(sol.x.mats[idx++]);
  return cov;
}

}  // namespace

DcResult dc_solve(const ChannelSet& ch, double power, double tau_bits,
                  const DcConfig& cfg, const DcWarmstart* warm) {
  ch.check();
  if (power < 0.0) throw DomainError("dc_solve: negative power");
  if (tau_bits < 0.0) throw DomainError("dc_solve: negative multicast floor");
  DcResult res;
  res.cov = CovarianceTriple::zero(ch.n_t, power);

  if (power == 0.0) {
    res.status = tau_bits > 0.0 ? "infeasible" : "ok";
    res.converged = tau_bits <= 0.0;
    res.rates = rate_point(ch, res.cov);
    res.trace.push_back({1, 0.0, 0.0, 0.0});
    return res;
  }

  double tau_max_bits = cfg.tau_max_hint_bits;
  TauMaxResult tm;
  if (tau_max_bits < 0.0) {
    tm = compute_tau_max(ch, power, cfg.kernel);
    tau_max_bits = tm.tau_bits;
  }
  if (tau_bits > tau_max_bits + 1e-9) {
    res.status = "infeasible";
    return res;
  }
  const double edge = std::max(1e-9, 1e-7 * tau_max_bits);
  if (tau_bits >= tau_max_bits - edge && tau_bits > 0.0) {
    // The floor saturates the channel: only the pure multicast point is
    // feasible, and its interior is empty. Return it directly.
    if (tm.q0.size() == 0) tm = compute_tau_max(ch, power, cfg.kernel);
    res.cov.multicast = tm.q0;
    res.rates = rate_point(ch, res.cov);
    res.status = "endpoint";
    res.converged = true;
    res.trace.push_back(
        {1, 0.0, res.rates.multicast_bits, res.rates.secrecy_bits});
    return res;
  }

  DcOptions opt;
  opt.include_an = cfg.include_an;
  opt.include_multicast = tau_bits > 0.0;
  const double tau_nats = bits_to_nats(tau_bits);

  CMat qc0, qa0;
  if (warm) {
    qc0 = warm->qc0;
    qa0 = warm->qa0;
  } else {
    qc0 = CMat::Identity(ch.n_t, ch.n_t) * (power / (2.0 * ch.n_t));
    qa0 = qc0;
  }
  if (!cfg.include_an) qa0 = CMat::Zero(ch.n_t, ch.n_t);

  const KernelPoint* hint = nullptr;
  KernelPoint hint_store;
  if (warm && warm->has_kernel_hint) {
    hint_store = warm->kernel_hint;
    hint = &hint_store;
  }

  double prev_obj_bits = std::numeric_limits<double>::quiet_NaN();
  bool restarted = false;
  for (int n = 1; n <= cfg.max_outer; ++n) {
    LogDetProgram prog =
        assemble_dc_subproblem(ch, power, tau_nats, qc0, qa0, opt);
    const KernelPoint* use_hint = nullptr;
    if (hint && hint->mats.size() == prog.blocks.size() &&
        hint->scalars.size() == prog.num_scalars)
      use_hint = hint;
    KernelSolution sol = solve(prog, cfg.kernel, use_hint);
    ++res.inner_solves;
    if (sol.status == KernelStatus::Infeasible) {
      if (n == 1 && !restarted) {
        // The protocol expansion point can make the first surrogate
        // infeasible even when the true problem is not; the zero expansion
        // never does (its floor rows relax to the pure multicast ones).
        qc0 = CMat::Zero(ch.n_t, ch.n_t);
        qa0 = CMat::Zero(ch.n_t, ch.n_t);
        restarted = true;
        hint = nullptr;
        --n;
        continue;
      }
      res.status = n == 1 ? "infeasible" : "failed";
      return res;
    }
    if (sol.status != KernelStatus::Optimal) {
      res.status = "failed";
      return res;
    }
    res.cov = triple_from_kernel(ch, sol, power, opt);
    res.rates = rate_point(ch, res.cov);
    res.outer_iters = n;
    res.trace.push_back({n, sol.objective, res.rates.multicast_bits,
                         res.rates.secrecy_bits});
    qc0 = res.cov.confidential;
    qa0 = res.cov.noise;
    hint_store = sol.x;
    hint = &hint_store;
    res.last_kernel = sol.x;
    res.has_last_kernel = true;
    const double obj_bits = nats_to_bits(sol.objective);
    if (std::isfinite(prev_obj_bits) &&
        std::abs(obj_bits - prev_obj_bits) <= cfg.tol_bits) {
      res.converged = true;
      break;
    }
    prev_obj_bits = obj_bits;
  }
  res.status = res.converged ? "ok" : "max_outer";
  return res;
}

CovarianceTriple rescale_to_equality(const ChannelSet& ch,
                                     const CovarianceTriple& cov,
                                     double tau_bits) {
  double m = multicast_rate(ch, cov);
  if (std::abs(m - tau_bits) <= 1e-6) return cov;
  if (m < tau_bits - 1e-9)
    throw DomainError("rescale_to_equality: multicast rate below the floor");
  auto at = [&](double nu) {
    CovarianceTriple c = cov;
    c.multicast = cov.multicast * nu;
    return multicast_rate(ch, c) - tau_bits;
  };
  double lo = 0.0, hi = 1.0;
  double mid = 0.5;
  for (int it = 0; it < 80; ++it) {
    mid = 0.5 * (lo + hi);
    double g = at(mid);
    if (std::abs(g) <= 1e-8) break;
    if (g > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  CovarianceTriple out = cov;
  out.multicast = cov.multicast * mid;
  // Prefer the upper end if the midpoint undershoots the tolerance window.
  if (std::abs(multicast_rate(ch, out) - tau_bits) > 1e-6) {
    out.multicast = cov.multicast * hi;
  }
  return out;
}

RegionBoundary trace_region_dc(const ChannelSet& ch, double power,
                               const DcSweepConfig& cfg) {
  using clock = std::chrono::steady_clock;
  RegionBoundary rb;
  rb.method = "dc";
  TauMaxResult tm = compute_tau_max(ch, power, cfg.dc.kernel);
  DcWarmstart warm;
  bool have_warm = false;
  const int npts = std::max(1, cfg.points);
  for (int i = 0; i < npts; ++i) {
    const double frac =
        npts == 1 ? 1.0 : 1.0 - static_cast<double>(i) / (npts - 1);
    const double tau = tm.tau_bits * frac;
    DcConfig c = cfg.dc;
    c.tau_max_hint_bits = tm.tau_bits;
    auto t0 = clock::now();
    DcResult r = dc_solve(ch, power, tau, c, have_warm ? &warm : nullptr);
    CovarianceTriple final_cov = r.cov;
    if (cfg.rescale && (r.status == "ok" || r.status == "max_outer" ||
                        r.status == "endpoint"))
      final_cov = rescale_to_equality(ch, r.cov, tau);
    auto t1 = clock::now();
    BoundaryRecord rec;
    rec.param = tau;
    RatePoint rp = rate_point(ch, final_cov);
    rec.r0_bits = rp.multicast_bits;
    rec.rc_bits = rp.secrecy_bits;
    rec.outer_iters = r.outer_iters;
    rec.inner_solves = r.inner_solves;
    rec.wall_ms =
        std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(
            t1 - t0)
            .count();
    rec.status = r.status;
    rec.trace = r.trace;
    rb.records.push_back(std::move(rec));
    rb.solutions.push_back(final_cov);
    if (r.status == "ok" || r.status == "max_outer" ||
        r.status == "endpoint") {
      warm.qc0 = r.cov.confidential;
      warm.qa0 = r.cov.noise;
      warm.has_kernel_hint = r.has_last_kernel;
      if (r.has_last_kernel) warm.kernel_hint = r.last_kernel;
      have_warm = true;
    }
  }
  return rb;
}

}  // namespace srr
