#include "srr/kernel.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "srr/linalg.hpp"

namespace srr {

int LogDetProgram::coords() const {
  int n = 0;
  for (const auto& b : blocks) n += b.dim * b.dim;
  return n + num_scalars;
}

int LogDetProgram::block_offset(int v) const {
  int off = 0;
  for (int i = 0; i < v; ++i) off += blocks[i].dim * blocks[i].dim;
  return off;
}

int LogDetProgram::scalar_offset() const { return coords() - num_scalars; }

namespace {

void check_expr(const LogDetProgram& p, const ConcaveExpr& e,
                const char* what) {
  for (const auto& t : e.logdets) {
    if (t.weight < 0.0)
      throw DomainError(std::string(what) + ": negative logdet weight");
    if (t.factors.empty())
      throw DomainError(std::string(what) + ": logdet term without factors");
    int r = t.base.size() ? static_cast<int>(t.base.rows())
                          : static_cast<int>(t.factors[0].map.rows());
    if (t.base.size() && t.base.rows() != t.base.cols())
      throw DomainError(std::string(what) + ": base not square");
    std::vector<bool> seen(p.blocks.size(), false);
    for (const auto& f : t.factors) {
      if (f.block < 0 || f.block >= static_cast<int>(p.blocks.size()))
        throw DomainError(std::string(what) + ": factor block out of range");
      if (seen[f.block])
        throw DomainError(std::string(what) + ": block repeated in one term");
      seen[f.block] = true;
      if (f.map.rows() != r || f.map.cols() != p.blocks[f.block].dim)
        throw DomainError(std::string(what) + ": factor map shape mismatch");
    }
  }
  if (e.affine.scalar_coeff.size() != 0 &&
      e.affine.scalar_coeff.size() != p.num_scalars)
    throw DomainError(std::string(what) + ": scalar coefficient size mismatch");
  if (!e.affine.mat_coeff.empty() &&
      e.affine.mat_coeff.size() != p.blocks.size())
    throw DomainError(std::string(what) + ": matrix coefficient count");
}

}  // namespace

void LogDetProgram::check() const {
  if (blocks.empty()) throw DomainError("program: no matrix blocks");
  if (budget <= 0.0) throw DomainError("program: budget must be positive");
  for (const auto& b : blocks)
    if (b.dim <= 0) throw DomainError("program: block with nonpositive dim");
  check_expr(*this, objective, "objective");
  for (const auto& c : constraints) check_expr(*this, c, "constraint");
}

void pack_hermitian(const CMat& a, double* out) {
  const int n = static_cast<int>(a.rows());
  int idx = 0;
  for (int i = 0; i < n; ++i) out[idx++] = a(i, i).real();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      out[idx++] = M_SQRT2 * a(i, j).real();
      out[idx++] = M_SQRT2 * a(i, j).imag();
    }
}

CMat unpack_hermitian(const double* in, int n) {
  CMat a(n, n);
  int idx = 0;
  for (int i = 0; i < n; ++i) a(i, i) = in[idx++];
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double re = in[idx++] * M_SQRT1_2;
      double im = in[idx++] * M_SQRT1_2;
      a(i, j) = Cplx(re, im);
      a(j, i) = Cplx(re, -im);
    }
  return a;
}

namespace {

void pack_add(const CMat& g, double w, int off, RVec* out) {
  const int n = static_cast<int>(g.rows());
  int idx = off;
  for (int i = 0; i < n; ++i) (*out)[idx++] += w * g(i, i).real();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      (*out)[idx++] += w * M_SQRT2 * g(i, j).real();
      (*out)[idx++] += w * M_SQRT2 * g(i, j).imag();
    }
}

// Magnitude version for the rounding-noise accumulator.
void pack_add_abs(const CMat& g, double w, int off, RVec* out) {
  const int n = static_cast<int>(g.rows());
  int idx = off;
  for (int i = 0; i < n; ++i) (*out)[idx++] += w * std::abs(g(i, i).real());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      (*out)[idx++] += w * M_SQRT2 * std::abs(g(i, j).real());
      (*out)[idx++] += w * M_SQRT2 * std::abs(g(i, j).imag());
    }
}

struct TermCache {
  Eigen::LLT<CMat> llt;
  double logdet = 0.0;
};

bool factor_term(const LogDetTerm& t, const KernelPoint& x, TermCache* c) {
  const int r = t.base.size() ? static_cast<int>(t.base.rows())
                              : static_cast<int>(t.factors[0].map.rows());
  CMat m = t.base.size() ? CMat(t.base) : CMat(CMat::Zero(r, r));
  for (const auto& f : t.factors)
    m.noalias() += f.map * x.mats[f.block] * f.map.adjoint();
  c->llt.compute(hermitian_part(m));
  if (c->llt.info() != Eigen::Success) return false;
  double acc = 0.0;
  const auto& l = c->llt.matrixLLT();
  for (Eigen::Index i = 0; i < l.rows(); ++i) acc += std::log(l(i, i).real());
  c->logdet = 2.0 * acc;
  return true;
}

double affine_value(const AffineTerm& a, const KernelPoint& x) {
  double v = a.constant;
  for (size_t b = 0; b < a.mat_coeff.size(); ++b)
    if (a.mat_coeff[b].size())
      v += (a.mat_coeff[b] * x.mats[b]).trace().real();
  if (a.scalar_coeff.size()) v += a.scalar_coeff.dot(x.scalars);
  return v;
}

// Hessian of a weighted logdet term in packed coordinates: for basis matrix
// E_p of block v, Y_p = B E_p B^H, W_p = M^{-1} Y_p, and the (p,q) entry is
// -w Re tr(W_p W_q). The X-cone barrier reuses this with B = I, M = X.
void logdet_hessian(const LogDetProgram& p, const TermCache& cache,
                    const std::vector<LogDetTerm::Factor>& factors, double w,
                    Eigen::MatrixXd* hess) {
  std::vector<CMat> ws;
  std::vector<int> cidx;
  for (const auto& f : factors) {
    const int nb = static_cast<int>(f.map.cols());
    const int off = p.block_offset(f.block);
    const CMat& b = f.map;
    for (int i = 0; i < nb; ++i) {
      CMat y = b.col(i) * b.col(i).adjoint();
      ws.push_back(cache.llt.solve(y));
      cidx.push_back(off + i);
    }
    int idx = nb;
    for (int i = 0; i < nb; ++i)
      for (int j = i + 1; j < nb; ++j) {
        CMat tm = b.col(i) * b.col(j).adjoint();
        CMat yre = (tm + tm.adjoint()) * M_SQRT1_2;
        CMat yim = (Cplx(0.0, 1.0) * tm - Cplx(0.0, 1.0) * tm.adjoint()) *
                   M_SQRT1_2;
        ws.push_back(cache.llt.solve(yre));
        cidx.push_back(off + idx++);
        ws.push_back(cache.llt.solve(yim));
        cidx.push_back(off + idx++);
      }
  }
  const size_t m = ws.size();
  for (size_t a = 0; a < m; ++a)
    for (size_t b2 = a; b2 < m; ++b2) {
      double hv =
          -w * ws[a].cwiseProduct(ws[b2].transpose()).sum().real();
      (*hess)(cidx[a], cidx[b2]) += hv;
      if (a != b2) (*hess)(cidx[b2], cidx[a]) += hv;
    }
}

// Value, packed gradient and Hessian of a concave expression. grad/hess may
// be null; when given they are overwritten. Returns false when some logdet
// argument leaves the PD cone.
bool evaluate_expr(const LogDetProgram& p, const ConcaveExpr& e,
                   const KernelPoint& x, double* value, RVec* grad,
                   Eigen::MatrixXd* hess, double* mag = nullptr) {
  const int n = p.coords();
  if (grad) grad->setZero(n);
  if (hess) hess->setZero(n, n);
  double v = affine_value(e.affine, x);
  if (mag) {
    // Sum of term magnitudes: the value can cancel to ~0 while its rounding
    // error stays at eps times this scale.
    *mag = std::abs(e.affine.constant);
    for (size_t b = 0; b < e.affine.mat_coeff.size(); ++b)
      if (e.affine.mat_coeff[b].size())
        *mag += std::abs((e.affine.mat_coeff[b] * x.mats[b]).trace().real());
    for (Eigen::Index j = 0; j < e.affine.scalar_coeff.size(); ++j)
      *mag += std::abs(e.affine.scalar_coeff[j] * x.scalars[j]);
  }
  if (grad) {
    for (size_t b = 0; b < e.affine.mat_coeff.size(); ++b)
      if (e.affine.mat_coeff[b].size())
        pack_add(e.affine.mat_coeff[b], 1.0, p.block_offset(b), grad);
    if (e.affine.scalar_coeff.size())
      grad->segment(p.scalar_offset(), p.num_scalars) += e.affine.scalar_coeff;
  }
  TermCache cache;
  for (const auto& t : e.logdets) {
    if (t.weight == 0.0) continue;
    if (!factor_term(t, x, &cache)) return false;
    v += t.weight * cache.logdet;
    if (mag) *mag += std::abs(t.weight * cache.logdet);
    if (grad) {
      for (const auto& f : t.factors) {
        CMat z = cache.llt.solve(f.map);
        CMat g = hermitian_part(f.map.adjoint() * z);
        pack_add(g, t.weight, p.block_offset(f.block), grad);
      }
    }
    if (hess) logdet_hessian(p, cache, t.factors, t.weight, hess);
  }
  *value = v;
  return true;
}

double sum_budgeted_trace(const LogDetProgram& p, const KernelPoint& x) {
  double s = 0.0;
  for (size_t v = 0; v < p.blocks.size(); ++v)
    if (p.blocks[v].budgeted) s += x.mats[v].real().trace();
  return s;
}

struct BarrierEval {
  double phi = 0.0;
  double f = 0.0;
};

// Phi_t value only, for line searches. nullopt when the trial point is not
// strictly feasible. fref is subtracted from the objective before the t
// scaling: a constant shift, but it keeps |phi| small at large t so Armijo
// comparisons stay above rounding noise.
std::optional<BarrierEval> barrier_value(const LogDetProgram& p, double t,
                                         const KernelPoint& x, double fref) {
  BarrierEval be;
  if (!evaluate_expr(p, p.objective, x, &be.f, nullptr, nullptr))
    return std::nullopt;
  double phi = t * (be.f - fref);
  Eigen::LLT<CMat> llt;
  for (size_t v = 0; v < p.blocks.size(); ++v) {
    llt.compute(hermitian_part(x.mats[v]));
    if (llt.info() != Eigen::Success) return std::nullopt;
    double acc = 0.0;
    const auto& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < l.rows(); ++i)
      acc += std::log(l(i, i).real());
    phi += 2.0 * acc;
  }
  double slack = p.budget - sum_budgeted_trace(p, x);
  if (slack <= 0.0) return std::nullopt;
  phi += std::log(slack);
  double gv = 0.0;
  for (const auto& c : p.constraints) {
    if (!evaluate_expr(p, c, x, &gv, nullptr, nullptr)) return std::nullopt;
    if (gv <= 0.0) return std::nullopt;
    phi += std::log(gv);
  }
  be.phi = phi;
  return be;
}

struct NewtonWork {
  RVec grad;
  RVec gnoise;  // per-entry rounding bound on grad, for the decrement floor
  Eigen::MatrixXd hess;
  std::vector<Eigen::LLT<CMat>> block_llt;
  double budget_slack = 0.0;
  RVec cons;
  double f = 0.0;
  double fmag = 0.0;  // sum of |objective terms|: rounding scale of f
  double phi = 0.0;
  RVec tmp_g;
  Eigen::MatrixXd tmp_h;
};

bool assemble(const LogDetProgram& p, double t, const KernelPoint& x,
              NewtonWork* w, double fref = 0.0) {
  const int n = p.coords();
  const double em = std::numeric_limits<double>::epsilon();
  if (!evaluate_expr(p, p.objective, x, &w->f, &w->tmp_g, &w->tmp_h,
                     &w->fmag))
    return false;
  w->grad = t * w->tmp_g;
  w->gnoise = em * t * w->tmp_g.cwiseAbs();
  w->hess = t * w->tmp_h;
  double phi = t * (w->f - fref);

  w->block_llt.resize(p.blocks.size());
  for (size_t v = 0; v < p.blocks.size(); ++v) {
    const int nb = p.blocks[v].dim;
    w->block_llt[v].compute(hermitian_part(x.mats[v]));
    if (w->block_llt[v].info() != Eigen::Success) return false;
    double acc = 0.0;
    const auto& l = w->block_llt[v].matrixLLT();
    for (int i = 0; i < nb; ++i) acc += std::log(l(i, i).real());
    phi += 2.0 * acc;
    CMat inv = w->block_llt[v].solve(CMat::Identity(nb, nb));
    pack_add(hermitian_part(inv), 1.0, p.block_offset(v), &w->grad);
    pack_add_abs(hermitian_part(inv), em, p.block_offset(v), &w->gnoise);
    TermCache cone;
    cone.llt = w->block_llt[v];
    std::vector<LogDetTerm::Factor> self{
        {static_cast<int>(v), CMat::Identity(nb, nb)}};
    logdet_hessian(p, cone, self, 1.0, &w->hess);
  }

  w->budget_slack = p.budget - sum_budgeted_trace(p, x);
  if (w->budget_slack <= 0.0) return false;
  phi += std::log(w->budget_slack);
  std::vector<int> diag_idx;
  for (size_t v = 0; v < p.blocks.size(); ++v)
    if (p.blocks[v].budgeted)
      for (int i = 0; i < p.blocks[v].dim; ++i)
        diag_idx.push_back(p.block_offset(v) + i);
  const double inv_s = 1.0 / w->budget_slack;
  for (int pi : diag_idx) {
    w->grad[pi] -= inv_s;
    w->gnoise[pi] += em * inv_s;
  }
  for (int pi : diag_idx)
    for (int qi : diag_idx) w->hess(pi, qi) -= inv_s * inv_s;

  const int nc = static_cast<int>(p.constraints.size());
  w->cons.resize(nc);
  for (int c = 0; c < nc; ++c) {
    double gc = 0.0;
    if (!evaluate_expr(p, p.constraints[c], x, &gc, &w->tmp_g, &w->tmp_h))
      return false;
    if (gc <= 0.0) return false;
    w->cons[c] = gc;
    phi += std::log(gc);
    w->grad += w->tmp_g / gc;
    w->gnoise += (em / gc) * w->tmp_g.cwiseAbs();
    w->hess += w->tmp_h / gc;
    w->hess.noalias() -= (w->tmp_g * w->tmp_g.transpose()) / (gc * gc);
  }
  w->phi = phi;
  (void)n;
  return true;
}

KernelPoint apply_step(const LogDetProgram& p, const KernelPoint& x,
                       const RVec& d, double alpha) {
  KernelPoint y = x;
  for (size_t v = 0; v < p.blocks.size(); ++v) {
    const int nb = p.blocks[v].dim;
    CMat dv = unpack_hermitian(d.data() + p.block_offset(v), nb);
    y.mats[v] = hermitian_part(y.mats[v] + alpha * dv);
  }
  if (p.num_scalars > 0)
    y.scalars += alpha * d.segment(p.scalar_offset(), p.num_scalars);
  return y;
}

double max_step(const LogDetProgram& p, const NewtonWork& w, const RVec& d) {
  double amax = std::numeric_limits<double>::infinity();
  double dtr = 0.0;
  for (size_t v = 0; v < p.blocks.size(); ++v) {
    const int nb = p.blocks[v].dim;
    CMat dv = unpack_hermitian(d.data() + p.block_offset(v), nb);
    if (p.blocks[v].budgeted) dtr += dv.real().trace();
    CMat t1 = w.block_llt[v].matrixL().solve(dv);
    CMat dtil = w.block_llt[v].matrixL().solve(t1.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(dtil),
                                           Eigen::EigenvaluesOnly);
    double lam = es.eigenvalues().minCoeff();
    if (lam < 0.0) amax = std::min(amax, -1.0 / lam);
  }
  if (dtr > 0.0) amax = std::min(amax, w.budget_slack / dtr);
  return amax;
}

enum class CenterOutcome { Centered, Stalled, Failed };

CenterOutcome center(const LogDetProgram& p, const SolverConfig& cfg, double t,
                     double fref, KernelPoint* x, NewtonWork* w,
                     int* newton_steps) {
  Eigen::LLT<Eigen::MatrixXd> allt;
  for (int it = 0; it < cfg.max_newton_per_center; ++it) {
    if (!assemble(p, t, *x, w, fref)) return CenterOutcome::Failed;
    Eigen::MatrixXd a = -w->hess;
    double scale = std::max(1.0, a.diagonal().cwiseAbs().maxCoeff());
    double ridge = 0.0;
    bool fact = false;
    for (int attempt = 0; attempt < 8; ++attempt) {
      Eigen::MatrixXd areg = a;
      if (ridge > 0.0)
        areg.diagonal().array() += ridge;
      allt.compute(areg);
      if (allt.info() == Eigen::Success) {
        fact = true;
        break;
      }
      ridge = (ridge == 0.0) ? 1e-13 * scale : ridge * 100.0;
    }
    if (!fact) return CenterOutcome::Failed;
    RVec d = allt.solve(w->grad);
    double lam2 = w->grad.dot(d);
    // Two machine-precision floors bound the smallest decrement that is
    // distinguishable from zero.  The gradient carries per-entry rounding of
    // magnitude gnoise (large-t cancellation of t grad F against the barrier
    // gradient), whose own decrement is gnoise' H^-1 gnoise.  And the line
    // search compares phi values whose absolute rounding is about
    // eps * (t |f| + |barrier|); a predicted decrement below that cannot be
    // verified, so further steps would walk in evaluation noise.
    const double lam2_floor = w->gnoise.dot(allt.solve(w->gnoise));
    const double eps_m = std::numeric_limits<double>::epsilon();
    const double phi_noise =
        eps_m * (t * (w->fmag + std::abs(fref)) +
                 std::abs(w->phi - t * (w->f - fref)) + 1.0);
    const double lam2_noise =
        std::max(4.0 * lam2_floor, (2.0 / cfg.armijo_c) * phi_noise);
    if (lam2 <= std::max(2.0 * cfg.newton_tol, lam2_noise))
      return CenterOutcome::Centered;

    double amax = max_step(p, *w, d);
    double alpha = std::min(1.0, 0.99 * amax);
    const double dnorm = d.norm();
    bool accepted = false;
    KernelPoint trial;
    for (int ls = 0; ls < 60 && alpha * dnorm > 1e-18; ++ls) {
      trial = apply_step(p, *x, d, alpha);
      auto bv = barrier_value(p, t, trial, fref);
      if (bv && bv->phi >= w->phi + cfg.armijo_c * alpha * lam2) {
        accepted = true;
        break;
      }
      alpha *= cfg.backtrack;
    }
    // A rounding-limited line search with a nearly met decrement still
    // counts: the centering error it leaves is far below the path tolerance.
    if (!accepted)
      return (lam2 <= 1e-7 || lam2 <= 4.0 * lam2_noise)
                 ? CenterOutcome::Centered
                 : CenterOutcome::Stalled;
    *x = trial;
    ++*newton_steps;
  }
  return CenterOutcome::Stalled;
}

double barrier_nu(const LogDetProgram& p) {
  double nu = 1.0;  // budget
  for (const auto& b : p.blocks) nu += b.dim;
  nu += static_cast<double>(p.constraints.size());
  return nu;
}

// One-pass interval assignment: give every scalar a value that clears each
// constraint it enters by a margin of delta, treating not-yet-assigned
// scalars as zero.
void assign_scalars(const LogDetProgram& p, KernelPoint* x) {
  x->scalars = RVec::Zero(p.num_scalars);
  const double delta = 1.0;
  const double inf = std::numeric_limits<double>::infinity();
  for (int j = 0; j < p.num_scalars; ++j) {
    double lo = -inf, hi = inf;
    for (const auto& c : p.constraints) {
      if (c.affine.scalar_coeff.size() == 0) continue;
      double a = c.affine.scalar_coeff[j];
      if (a == 0.0) continue;
      KernelPoint probe = *x;
      probe.scalars[j] = 0.0;
      double base = 0.0;
      if (!evaluate_expr(p, c, probe, &base, nullptr, nullptr)) continue;
      double bound = (delta - base) / a;
      if (a > 0.0)
        lo = std::max(lo, bound);
      else
        hi = std::min(hi, bound);
    }
    double val = 0.0;
    if (std::isfinite(lo) && std::isfinite(hi))
      val = 0.5 * (lo + hi);  // may be out of order; verification catches it
    else if (std::isfinite(lo))
      val = lo;
    else if (std::isfinite(hi))
      val = hi;
    x->scalars[j] = val;
  }
}

KernelPoint heuristic_point(const LogDetProgram& p) {
  int maxdim = 0;
  for (const auto& b : p.blocks) maxdim = std::max(maxdim, b.dim);
  const double eps0 =
      p.budget / (10.0 * static_cast<double>(p.blocks.size()) * maxdim);
  KernelPoint x;
  x.mats.reserve(p.blocks.size());
  for (const auto& b : p.blocks)
    x.mats.push_back(CMat::Identity(b.dim, b.dim) * eps0);
  assign_scalars(p, &x);
  return x;
}

// Max-min-slack program. The original scalars get box rows |s_j| <= box[j]:
// a scalar entering constraints with one sign only would otherwise send the
// analytic center to infinity along it.
LogDetProgram make_aux(const LogDetProgram& p, const RVec& box) {
  LogDetProgram aux;
  aux.blocks = p.blocks;
  aux.num_scalars = p.num_scalars + 1;
  aux.budget = p.budget;
  aux.objective.affine.scalar_coeff = RVec::Zero(aux.num_scalars);
  aux.objective.affine.scalar_coeff[p.num_scalars] = 1.0;
  aux.constraints.reserve(p.constraints.size() + 2 * p.num_scalars);
  for (const auto& c : p.constraints) {
    ConcaveExpr e = c;
    RVec sc = RVec::Zero(aux.num_scalars);
    if (c.affine.scalar_coeff.size())
      sc.head(p.num_scalars) = c.affine.scalar_coeff;
    sc[p.num_scalars] = -1.0;
    e.affine.scalar_coeff = sc;
    aux.constraints.push_back(std::move(e));
  }
  for (int j = 0; j < p.num_scalars; ++j) {
    for (double sign : {1.0, -1.0}) {
      ConcaveExpr e;
      e.affine.scalar_coeff = RVec::Zero(aux.num_scalars);
      e.affine.scalar_coeff[j] = sign;
      e.affine.constant = box[j];
      aux.constraints.push_back(std::move(e));
    }
  }
  return aux;
}

}  // namespace

RVec constraint_values(const LogDetProgram& p, const KernelPoint& x) {
  RVec g(p.constraints.size());
  for (size_t c = 0; c < p.constraints.size(); ++c) {
    double v = 0.0;
    if (!evaluate_expr(p, p.constraints[c], x, &v, nullptr, nullptr))
      throw DomainError("constraint_values: logdet argument left the PD cone");
    g[c] = v;
  }
  return g;
}

std::optional<double> interior_margin(const LogDetProgram& p,
                                      const KernelPoint& x) {
  double m = std::numeric_limits<double>::infinity();
  for (size_t v = 0; v < p.blocks.size(); ++v) {
    if (x.mats[v].rows() != p.blocks[v].dim) return std::nullopt;
    m = std::min(m, min_eigenvalue(x.mats[v]));
  }
  m = std::min(m, p.budget - sum_budgeted_trace(p, x));
  for (const auto& c : p.constraints) {
    double v = 0.0;
    if (!evaluate_expr(p, c, x, &v, nullptr, nullptr)) return std::nullopt;
    m = std::min(m, v);
  }
  return m;
}

double objective_and_gradient(const LogDetProgram& p, const KernelPoint& x,
                              RVec* grad) {
  double v = 0.0;
  if (!evaluate_expr(p, p.objective, x, &v, grad, nullptr))
    throw DomainError(
        "objective_and_gradient: logdet argument left the PD cone");
  return v;
}

Phase1Result phase1_initialize(const LogDetProgram& prog,
                               const SolverConfig& cfg) {
  prog.check();
  Phase1Result r;
  r.point = heuristic_point(prog);
  auto m = interior_margin(prog, r.point);
  if (m && *m > 1e-9) {
    r.feasible = true;
    r.margin = *m;
    return r;
  }
  // Max-min-slack program; trivially strictly feasible, so its own phase 1
  // never recurses.
  RVec box(prog.num_scalars);
  for (int j = 0; j < prog.num_scalars; ++j)
    box[j] = 1e3 * (1.0 + std::abs(r.point.scalars[j]));
  LogDetProgram aux = make_aux(prog, box);
  KernelPoint x0 = r.point;
  x0.scalars.conservativeResize(aux.num_scalars);
  RVec g0 = constraint_values(prog, r.point);
  double smin = g0.size() ? g0.minCoeff() : 1.0;
  x0.scalars[prog.num_scalars] = std::min(smin, 0.0) - 1.0;
  SolverConfig acfg = cfg;
  acfg.eps = std::min(cfg.eps * 1e2, 1e-6);
  KernelSolution as = solve(aux, acfg, &x0);
  r.used_aux = true;
  r.aux_optimum = as.x.scalars[prog.num_scalars];
  if (as.status != KernelStatus::Optimal || r.aux_optimum <= 0.0) {
    r.feasible = false;
    return r;
  }
  // Keep the centered blocks, but rebuild the scalars: the aux center may
  // park an epigraph scalar anywhere inside its box.
  r.point.mats = as.x.mats;
  assign_scalars(prog, &r.point);
  auto m2 = interior_margin(prog, r.point);
  r.feasible = m2 && *m2 > 0.0;
  r.margin = m2 ? *m2 : 0.0;
  return r;
}

namespace {

// Warmstart ladder: the hint itself, blends pulled toward the heuristic
// point, the heuristic point, then the auxiliary program.
std::optional<KernelPoint> find_strict_start(const LogDetProgram& p,
                                             const SolverConfig& cfg,
                                             const KernelPoint* hint,
                                             Phase1Result* ph_out) {
  const double m0 = 1e-9;
  if (hint && hint->mats.size() == p.blocks.size() &&
      hint->scalars.size() == p.num_scalars) {
    auto mh = interior_margin(p, *hint);
    if (mh && *mh > m0) return *hint;
    KernelPoint heur = heuristic_point(p);
    auto mheur = interior_margin(p, heur);
    if (mheur && *mheur > m0) {
      for (double w : {0.001, 0.01, 0.05, 0.1, 0.25, 0.5}) {
        KernelPoint blend;
        blend.mats.resize(p.blocks.size());
        for (size_t v = 0; v < p.blocks.size(); ++v)
          blend.mats[v] = (1.0 - w) * hint->mats[v] + w * heur.mats[v];
        blend.scalars =
            (1.0 - w) * hint->scalars + w * heur.scalars;
        auto mb = interior_margin(p, blend);
        if (mb && *mb > m0) return blend;
      }
    }
  }
  Phase1Result ph = phase1_initialize(p, cfg);
  if (ph_out) *ph_out = ph;
  if (!ph.feasible) return std::nullopt;
  return ph.point;
}

}  // namespace

KernelSolution solve(const LogDetProgram& prog, const SolverConfig& cfg,
                     const KernelPoint* warmstart) {
  prog.check();
  KernelSolution sol;
  Phase1Result ph;
  auto start = find_strict_start(prog, cfg, warmstart, &ph);
  if (!start) {
    sol.status = KernelStatus::Infeasible;
    sol.infeasibility_certificate = ph.aux_optimum;
    return sol;
  }
  KernelPoint x = *start;
  const double nu = barrier_nu(prog);
  double t = cfg.t_init;
  // The gap bound nu/t <= eps is met exactly at t_final.  Never overshoot
  // it: every extra decade of barrier weight worsens the Hessian
  // conditioning without tightening the certificate.
  const double t_final = cfg.eps > 0.0
                             ? std::max(cfg.t_init, nu / cfg.eps)
                             : std::numeric_limits<double>::infinity();
  NewtonWork w;
  bool done = false;
  CenterOutcome last = CenterOutcome::Stalled;
  double fref = objective_and_gradient(prog, x, nullptr);
  for (int ci = 0; ci < cfg.max_centers; ++ci) {
    last = center(prog, cfg, t, fref, &x, &w, &sol.newton_steps);
    ++sol.centers;
    if (last == CenterOutcome::Failed) {
      sol.status = KernelStatus::NewtonFailure;
      sol.x = x;
      return sol;
    }
    fref = w.f;
    if (t >= t_final) {
      done = true;
      break;
    }
    t = std::min(t * cfg.mu, t_final);
  }
  // Refresh caches so duals and values correspond to the returned point.
  if (!assemble(prog, t, x, &w, fref)) {
    sol.status = KernelStatus::NewtonFailure;
    sol.x = x;
    return sol;
  }
  // A stall at the final barrier weight means the delivered point is not
  // the analytic center there, so neither the gap bound nor the duals hold.
  sol.status = (done && last == CenterOutcome::Centered)
                   ? KernelStatus::Optimal
                   : KernelStatus::MaxIterations;
  sol.x = x;
  sol.objective = w.f;
  sol.t_final = t;
  sol.gap = nu / t;
  sol.budget_dual = 1.0 / (t * w.budget_slack);
  sol.constraint_duals.resize(prog.constraints.size());
  for (Eigen::Index c = 0; c < sol.constraint_duals.size(); ++c)
    sol.constraint_duals[c] = 1.0 / (t * w.cons[c]);
  sol.psd_duals.resize(prog.blocks.size());
  for (size_t v = 0; v < prog.blocks.size(); ++v) {
    const int nb = prog.blocks[v].dim;
    sol.psd_duals[v] =
        hermitian_part(w.block_llt[v].solve(CMat::Identity(nb, nb))) / t;
  }
  return sol;
}

}  // namespace srr
