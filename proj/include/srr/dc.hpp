#pragma once

#include "srr/capacities.hpp"
#include "srr/kernel.hpp"
#include "srr/region.hpp"
#include "srr/types.hpp"

namespace srr {

// Inner maximization of the secrecy rate under a multicast-rate floor, by
// successive concave surrogates: at each round the convex-in-(Qc,Qa) logdet
// pieces are replaced by their first-order expansions at the previous point,
// which majorize them, so the surrogate optimum never decreases and every
// surrogate-feasible point is feasible for the true constraints.

// First-order expansion of log det(I + H Qa H^H) around qa0 (natural logs):
// value_at(qa) = offset + Re tr(slope qa).
struct NoiseExpansion {
  CMat slope;
  double offset = 0.0;
  double at(const CMat& qa) const {
    return offset + (slope * qa).trace().real();
  }
};
NoiseExpansion expand_noise_logdet(const CMat& h, const CMat& qa0);

// Expansion of log det(I + H (Qc + Qa) H^H) around (qc0, qa0); the slope is
// shared between the two arguments.
struct JointExpansion {
  CMat slope;
  double offset = 0.0;
  double at(const CMat& qc, const CMat& qa) const {
    return offset + (slope * (qc + qa)).trace().real();
  }
};
JointExpansion expand_joint_logdet(const CMat& h, const CMat& qc0,
                                   const CMat& qa0);

// Largest multicast rate supportable alone (no confidential stream, no
// noise): max over Q0 in the power ball of the worst receiver's capacity.
struct TauMaxResult {
  double tau_bits = 0.0;  // evaluated worst-receiver capacity at q0
  CMat q0;
  KernelSolution sol;
};
TauMaxResult compute_tau_max(const ChannelSet& ch, double power,
                             const SolverConfig& kernel = {});

struct DcOptions {
  bool include_an = true;
  bool include_multicast = true;  // Q0 block and the floor rows
};

// One surrogate round as a kernel program. Blocks: [Q0,] Qc [, Qa]; scalar 0
// is the leakage bound when there are eavesdroppers.
LogDetProgram assemble_dc_subproblem(const ChannelSet& ch, double power,
                                     double tau_nats, const CMat& qc0,
                                     const CMat& qa0, const DcOptions& opt);

struct DcConfig {
  double tol_bits = 1e-4;  // stop when successive surrogate optima are closer
  int max_outer = 50;
  bool include_an = true;
  SolverConfig kernel;
  double tau_max_hint_bits = -1.0;  // < 0: compute internally
};

// Warm data carried between sweep points: the expansion point to start from
// and the previous kernel iterate.
struct DcWarmstart {
  CMat qc0, qa0;
  KernelPoint kernel_hint;
  bool has_kernel_hint = false;
};

struct DcResult {
  CovarianceTriple cov;
  RatePoint rates;
  std::vector<TraceRow> trace;
  bool converged = false;
  int outer_iters = 0;
  int inner_solves = 0;
  std::string status;  // ok, endpoint, infeasible, max_outer, failed
  KernelPoint last_kernel;  // final interior iterate, reusable as a hint
  bool has_last_kernel = false;
};

DcResult dc_solve(const ChannelSet& ch, double power, double tau_bits,
                  const DcConfig& cfg = {},
                  const DcWarmstart* warm = nullptr);

// Tighten a slack multicast floor exactly: shrink Q0 by bisection until the
// worst receiver sits on tau (input returned untouched when already within
// 1e-6 bits). Requires multicast_rate >= tau - 1e-9.
CovarianceTriple rescale_to_equality(const ChannelSet& ch,
                                     const CovarianceTriple& cov,
                                     double tau_bits);

struct DcSweepConfig {
  int points = 21;
  bool rescale = true;
  DcConfig dc;
};

// Boundary sweep: tau descends from tau_max to 0 on a uniform grid, each
// point warm-started from the previous one.
RegionBoundary trace_region_dc(const ChannelSet& ch, double power,
                               const DcSweepConfig& cfg = {});

}  // namespace srr
