#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace srr {

using Cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

constexpr double kLn2 = 0.6931471805599453094;

inline double nats_to_bits(double x) { return x / kLn2; }
inline double bits_to_nats(double x) { return x * kLn2; }

// One multi-antenna downlink: a transmitter with n_t antennas and K receivers.
// Receiver 0 is the authorized one; receivers 1..K-1 are the unauthorized set
// that must not decode the confidential stream.
struct ChannelSet {
  int n_t = 0;
  std::vector<CMat> rx;  // rx[k] has n_r(k) rows, n_t columns

  int users() const { return static_cast<int>(rx.size()); }
  int eavesdroppers() const { return users() - 1; }
  int n_r(int k) const { return static_cast<int>(rx.at(k).rows()); }

  void check() const;
};

// Transmit covariances of the three superposed components plus the power cap.
struct CovarianceTriple {
  CMat multicast;     // open stream, decoded by everyone
  CMat confidential;  // protected stream for receiver 0
  CMat noise;         // artificial noise
  double power = 0.0;

  CMat sum() const { return multicast + confidential + noise; }
  double total_trace() const {
    return multicast.real().trace() + confidential.real().trace() +
           noise.real().trace();
  }
  static CovarianceTriple zero(int n_t, double p) {
    CovarianceTriple c;
    c.multicast = CMat::Zero(n_t, n_t);
    c.confidential = CMat::Zero(n_t, n_t);
    c.noise = CMat::Zero(n_t, n_t);
    c.power = p;
    return c;
  }
};

struct RatePoint {
  double multicast_bits = 0.0;  // min over receivers of the open-stream rate
  double secrecy_bits = 0.0;    // clamped at zero
  double secrecy_gap_bits = 0.0;  // unclamped difference, for diagnostics
};

// Per-matrix validation outcome; pass means every covariance is Hermitian to
// tolerance, PSD after the -1e-9 clip, and the trace fits the budget.
struct CovarianceReport {
  double hermitian_defect[3] = {0, 0, 0};
  double min_eigenvalue[3] = {0, 0, 0};
  double trace_slack = 0.0;
  bool pass = false;
};

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace srr
