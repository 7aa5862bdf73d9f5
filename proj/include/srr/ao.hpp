#pragma once

#include "srr/capacities.hpp"
#include "srr/kernel.hpp"
#include "srr/region.hpp"
#include "srr/types.hpp"

namespace srr {

// Weighted-sum maximization of lambda_c * (confidential - worst leakage) +
// multicast rate, by alternating between closed-form auxiliary covers and a
// joint covariance step. The covers come from the variational identity
// max_{S>0} (-tr(S E) + logdet S + N) = -logdet E at S = E^{-1}, which turns
// every troublesome convex logdet into an affine-in-Q expression.

struct VariationalOptimum {
  double value = 0.0;  // -logdet(E)
  CMat argmax;         // E^{-1}
};
VariationalOptimum lemma3_closed_form(const CMat& e);

// Covers at a given (Qc, Qa): noise_cover = (I + H0 Qa H0^H)^{-1}; one
// joint_cover per receiver, (I + Hk (Qa+Qc) Hk^H)^{-1}. The same joint cover
// serves the leakage row (k >= 1) and the multicast row of receiver k.
struct WsrmSlacks {
  CMat noise_cover;
  std::vector<CMat> joint_cover;
};
WsrmSlacks closed_form_slacks(const ChannelSet& ch, const CMat& qc,
                              const CMat& qa);

// The alternating objective at frozen covers (natural logs); equals the true
// weighted objective when the covers are the closed forms at (Qc, Qa).
double wsrm_surrogate(const ChannelSet& ch, const CovarianceTriple& cov,
                      const WsrmSlacks& slacks, double lambda_c);

struct WsrmLayout {
  int b_q0 = -1, b_qc = -1, b_qa = -1;
  int s_alpha = -1, s_beta = -1;  // -1 when absent
  int eav_row0 = -1;              // first eavesdropper constraint index
  int mul_row0 = -1;              // first multicast constraint index
};

// Covariance step at frozen covers as a kernel program. Blocks: Q0, Qc
// [, Qa]; scalars: multicast epigraph, then the leakage epigraph when
// lambda_c > 0 and eavesdroppers exist.
LogDetProgram assemble_wsrm_subproblem(const ChannelSet& ch, double power,
                                       double lambda_c,
                                       const WsrmSlacks& slacks,
                                       bool include_an, WsrmLayout* layout);

struct AoConfig {
  double tol_bits = 1e-4;  // on successive objective values
  int max_outer = 100;
  bool include_an = true;
  // Covariance-step solver.  The gap stops at 1e-6: the duals of the final
  // step feed first-order certificates, and centering can only be verified
  // down to the rounding noise of the weighted objective, which grows with
  // the barrier weight.  Past t ~ 1e8 the dual accuracy degrades again, so
  // a tighter gap buys nothing here.  Warmstarts keep the per-round bias
  // coherent, and the measured ascent stays monotone to ~1e-11.
  SolverConfig kernel{.eps = 1e-6};
};

// Multipliers of the final covariance step, raw barrier values plus the
// epigraph positions; kkt_residuals normalizes them.
struct AoDuals {
  double lambda_c = 0.0;
  RVec eav_raw;        // one per eavesdropper row (empty when lambda_c == 0)
  RVec multicast_raw;  // one per receiver row
  double budget = 0.0;
  CMat z_multicast, z_confidential, z_noise;
  double alpha = 0.0;  // multicast epigraph value, nats
  double beta = 0.0;   // leakage epigraph value, nats
  bool valid = false;
};

struct AoResult {
  CovarianceTriple cov;
  RatePoint rates;
  std::vector<TraceRow> trace;
  bool converged = false;
  int outer_iters = 0;
  int inner_solves = 0;
  std::string status;  // ok, max_outer, failed
  double objective_nats = 0.0;
  AoDuals duals;
};

AoResult ao_solve(const ChannelSet& ch, double power, double lambda_c,
                  const AoConfig& cfg = {});

struct AoSweepConfig {
  std::vector<double> weights;  // empty: 0 plus 20 log-spaced in [0.05, 20]
  AoConfig ao;
};

RegionBoundary trace_region_ao(const ChannelSet& ch, double power,
                               const AoSweepConfig& cfg = {});

std::vector<double> default_weight_grid();

}  // namespace srr
