#pragma once

#include "srr/ao.hpp"
#include "srr/kernel.hpp"
#include "srr/types.hpp"

namespace srr {

// Independent checks used by the test battery: closed-form identities
// re-derived through separate code paths, exhaustive scalar searches, and
// first-order certificates for delivered solutions.

struct Lemma3Check {
  double value_gap = 0.0;
  double argmax_gap = 0.0;
  bool pass = false;
  KernelStatus status = KernelStatus::NewtonFailure;
};
// Maximize -tr(SE) + logdet S + N through the barrier kernel (synthetic
// budget 10 (tr E^{-1} + N), never active) and compare with the closed form.
Lemma3Check check_lemma3(const CMat& e, const SolverConfig& cfg = {});

// log det(A+B) - log det(B) >= log det(A+B+D) - log det(B+D) for A, D PSD
// and B PD; returns the (nonnegative up to tol) margin through *gap.
bool check_det_ratio(const CMat& a, const CMat& b, const CMat& d,
                     double tol = 1e-12, double* gap = nullptr);

// Largest gradient mismatch between the frozen-cover expressions at their
// closed-form covers and the plain capacity gradients, over all receivers
// and all three covariance slots.
double danskin_gap(const ChannelSet& ch, const CovarianceTriple& cov);

// rho (I - H^H (H H^H)^{-1} H): scaled projector onto the null space of H.
// Errors when H has at least as many rows as columns or is row-rank
// deficient.
CMat orth_complement_projector(const CMat& h, double rho);

struct SlackImprovement {
  bool improved = false;
  int condition = 0;  // 1: null space of receiver 0; 2: of the stacked
                      // eavesdroppers
  double pre_slack_bits = 0.0;
  double xi = 1.0;
  CovarianceTriple cov;
};
// When the multicast rate sits strictly above tau, shrink Q0 and pour the
// freed power into the relevant null space so the floor is met with
// equality, total power unchanged and the secrecy rate not decreased.
SlackImprovement improve_if_slack(const ChannelSet& ch,
                                  const CovarianceTriple& cov,
                                  double tau_bits);

struct KktReport {
  double stat_multicast = 0.0;
  double stat_confidential = 0.0;
  double stat_noise = 0.0;
  double viol_eav = 0.0;
  double viol_mul = 0.0;
  double comp_eav = 0.0;
  double comp_mul = 0.0;
  double comp_budget = 0.0;
  double comp_psd = 0.0;
  double simplex_eav = 0.0;
  double simplex_mul = 0.0;
  double sign_violation = 0.0;
  double zmin_multicast = 0.0, zmin_confidential = 0.0, zmin_noise = 0.0;
  double trace_slack = 0.0;
  double danskin = 0.0;  // gradient-identity mismatch at the same point

  double max_stationarity() const;
  bool pass(double tol) const;
};
// First-order certificate for a weighted-sum solution: multipliers are the
// delivered raw duals normalized onto their simplexes, thresholds are
// recomputed at the delivered point. Requires lambda_c > 0 and at least one
// eavesdropper.
KktReport kkt_residuals(const ChannelSet& ch, const CovarianceTriple& cov,
                        const AoDuals& duals);

struct ScalarInstance {
  int users = 2;
  std::vector<double> gains;  // squared channel magnitudes, receiver 0 first
  double power = 1.0;
  double tau_bits = -1.0;   // >= 0 selects the multicast-floor mode
  double lambda_c = -1.0;   // >= 0 selects the weighted mode
  double step = 0.0;        // 0: power/200
};

struct ScalarOracleResult {
  double value_bits = 0.0;
  double q0 = 0.0, qc = 0.0, qa = 0.0;
  double lipschitz_bits = 0.0;  // observed grid bound, bits per power unit
  double step = 0.0;
  bool feasible = false;
};
// Exhaustive simplex-grid search for single-antenna instances; the optimum
// is within lipschitz_bits * step of the reported value.
ScalarOracleResult brute_force_scalar_oracle(const ScalarInstance& inst);

struct MajorizationCheck {
  double min_slack = 0.0;        // most negative surrogate - true difference
  double max_tangency_gap = 0.0;
  int samples = 0;
  bool pass = false;
};
// Random-pair audit that both expansions stay above their functions and
// touch them at the expansion point.
MajorizationCheck tse_majorization_check(const ChannelSet& ch, double power,
                                         int samples, std::uint64_t seed);

// Exact worst-receiver SNR of the two-user single-receive-antenna case via
// the one-dimensional concave-game dual, golden-section on the weight:
// min over mu of P lambda_max(mu h0 h0^H + (1-mu) h1 h1^H). Returned as a
// rate in bits for direct comparison with compute_tau_max.
double tau_max_two_user_miso_oracle(const ChannelSet& ch, double power);

struct BatterySuite {
  std::string name;
  int total = 0;
  int passed = 0;
  double worst = 0.0;  // suite-specific worst statistic, see name
  bool pass = false;
};

struct BatteryResult {
  std::vector<BatterySuite> suites;
  double wall_ms = 0.0;
  bool pass = false;
};

// The full identity battery: variational closed form (50 draws),
// determinant-ratio monotonicity (200), surrogate majorization (500
// samples), gradient identities (100 points).
BatteryResult run_identity_battery(std::uint64_t seed);

}  // namespace srr
