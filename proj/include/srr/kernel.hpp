#pragma once

#include <optional>

#include "srr/types.hpp"

namespace srr {

// Concave maximization over Hermitian PSD matrix blocks and free scalars:
//
//   maximize  F(X, s) = sum_j w_j logdet(A_j + sum_i B_ji X_v(i) B_ji^H)
//                       + sum_v Re tr(C_v X_v) + c^T s + const
//   s.t.      g_c(X, s) >= 0 for each constraint (same concave shape as F)
//             X_v >= 0,  sum over budgeted v of tr X_v <= budget
//
// Weights w_j must be >= 0 so every expression stays concave. Each base A_j
// must keep the logdet argument PD whenever all X_v are PD; in practice A_j
// is I, or 0 combined with an invertible square factor. A matrix block may
// appear at most once among the factors of one term.
//
// Solved by log-barrier path following with exact damped Newton steps on
//   Phi_t = t F + sum_v logdet X_v + ln(budget slack) + sum_c ln g_c,
// t <- mu t until the standard gap bound nu/t drops below eps. Hermitian
// blocks run in a real parameterization (diagonal, then sqrt(2)-scaled
// re/im of the upper triangle) so inner products match Frobenius ones.
// Deterministic: no randomness anywhere.

struct LogDetTerm {
  double weight = 1.0;
  CMat base;  // r x r; empty means zero
  struct Factor {
    int block;
    CMat map;  // r x n_block
  };
  std::vector<Factor> factors;
};

struct AffineTerm {
  std::vector<CMat> mat_coeff;  // per block, Hermitian; empty entry = zero
  RVec scalar_coeff;            // empty = zero
  double constant = 0.0;
};

struct ConcaveExpr {
  std::vector<LogDetTerm> logdets;
  AffineTerm affine;
};

struct MatrixBlock {
  int dim = 0;
  bool budgeted = true;
  std::string name;
};

struct LogDetProgram {
  std::vector<MatrixBlock> blocks;
  int num_scalars = 0;
  ConcaveExpr objective;
  std::vector<ConcaveExpr> constraints;
  double budget = 0.0;

  int coords() const;
  int block_offset(int v) const;  // coordinate offset of block v
  int scalar_offset() const;
  void check() const;
};

struct KernelPoint {
  std::vector<CMat> mats;
  RVec scalars;
};

// Hermitian <-> real coordinates; the map is a Frobenius isometry so matrix
// gradients pack through the same function as points.
void pack_hermitian(const CMat& a, double* out);
CMat unpack_hermitian(const double* in, int n);

enum class KernelStatus { Optimal, Infeasible, NewtonFailure, MaxIterations };

struct KernelSolution {
  KernelStatus status = KernelStatus::NewtonFailure;
  KernelPoint x;
  double objective = 0.0;      // F at x, natural-log scale
  double gap = 0.0;            // nu / t at exit
  double t_final = 0.0;
  int centers = 0;
  int newton_steps = 0;
  // Barrier multipliers at the last center: 1/(t g_c), 1/(t budget slack),
  // X_v^{-1}/t. Approximate KKT multipliers of the original program.
  RVec constraint_duals;
  double budget_dual = 0.0;
  std::vector<CMat> psd_duals;
  double infeasibility_certificate = 0.0;  // aux optimum when Infeasible
};

struct SolverConfig {
  double eps = 1e-8;           // target duality-gap bound
  double t_init = 1.0;
  double mu = 10.0;
  double newton_tol = 1e-10;   // on lambda^2 / 2
  int max_newton_per_center = 50;
  double armijo_c = 0.25;
  double backtrack = 0.5;
  int max_centers = 64;
};

struct Phase1Result {
  bool feasible = false;
  KernelPoint point;
  double margin = 0.0;    // min constraint slack at the point
  bool used_aux = false;  // heuristic failed, max-slack program ran
  double aux_optimum = 0.0;
};

// Strictly feasible start: every block eps0 * I with eps0 = budget /
// (10 * #blocks * max dim), scalars by one-pass interval assignment against
// the constraints; falls back to an auxiliary max-min-slack program whose
// optimum decides feasibility.
Phase1Result phase1_initialize(const LogDetProgram& prog,
                               const SolverConfig& cfg = {});

KernelSolution solve(const LogDetProgram& prog, const SolverConfig& cfg = {},
                     const KernelPoint* warmstart = nullptr);

// F and its packed gradient at x (throws if some logdet argument is not PD).
double objective_and_gradient(const LogDetProgram& prog, const KernelPoint& x,
                              RVec* grad);

// Constraint values g_c(x), for feasibility checks and tests.
RVec constraint_values(const LogDetProgram& prog, const KernelPoint& x);

// Strict interior margin: min of constraint slacks, budget slack and block
// eigenvalue floors; nullopt when some logdet argument is outside the cone.
std::optional<double> interior_margin(const LogDetProgram& prog,
                                      const KernelPoint& x);

}  // namespace srr
