#include "srr/capacities.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "srr/linalg.hpp"

namespace srr {

void ChannelSet::check() const {
  if (n_t <= 0) throw DomainError("channel set: n_t must be positive");
  if (rx.empty()) throw DomainError("channel set: no receivers");
  for (size_t k = 0; k < rx.size(); ++k) {
    if (rx[k].cols() != n_t || rx[k].rows() < 1) {
      std::ostringstream os;
      os << "channel set: receiver " << k << " has shape " << rx[k].rows()
         << "x" << rx[k].cols() << ", expected *x" << n_t;
      throw DomainError(os.str());
    }
  }
}

namespace {

void check_rx_index(const ChannelSet& ch, int k) {
  if (k < 0 || k >= ch.users()) {
    std::ostringstream os;
    os << "receiver index " << k << " out of range [0, " << ch.users() << ")";
    throw DomainError(os.str());
  }
}

void check_dims(const ChannelSet& ch, const CovarianceTriple& cov) {
  ch.check();
  if (cov.multicast.rows() != ch.n_t || cov.confidential.rows() != ch.n_t ||
      cov.noise.rows() != ch.n_t)
    throw DomainError("covariance dimension does not match n_t");
}

CMat gram(const CMat& h, const CMat& q) { return h * q * h.adjoint(); }

double shifted_logdet(const CMat& h, const CMat& q) {
  int nr = static_cast<int>(h.rows());
  CMat m = CMat::Identity(nr, nr) + gram(h, q);
  return logdet_hermitian_pd(hermitian_part(m));
}

// Rates on a sanitized triple, in nats.
double multicast_nats(const ChannelSet& ch, const CovarianceTriple& s, int k) {
  const CMat& h = ch.rx[k];
  return shifted_logdet(h, s.sum()) -
         shifted_logdet(h, s.confidential + s.noise);
}

double confidential_nats(const ChannelSet& ch, const CovarianceTriple& s) {
  const CMat& h = ch.rx[0];
  return shifted_logdet(h, s.noise + s.confidential) -
         shifted_logdet(h, s.noise);
}

double eavesdrop_nats(const ChannelSet& ch, const CovarianceTriple& s, int k) {
  const CMat& h = ch.rx[k];
  return shifted_logdet(h, s.noise + s.confidential) -
         shifted_logdet(h, s.noise);
}

double multicast_rate_nats(const ChannelSet& ch, const CovarianceTriple& s) {
  double lo = std::numeric_limits<double>::infinity();
  for (int k = 0; k < ch.users(); ++k)
    lo = std::min(lo, multicast_nats(ch, s, k));
  return lo;
}

double max_leakage_nats(const ChannelSet& ch, const CovarianceTriple& s) {
  double hi = 0.0;  // no eavesdroppers: nothing leaks
  for (int k = 1; k < ch.users(); ++k)
    hi = std::max(hi, eavesdrop_nats(ch, s, k));
  return hi;
}

// (I + H Q H^H)^{-1} mapped back through H: d/dQ of logdet(I + H Q H^H).
CMat logdet_grad(const CMat& h, const CMat& q) {
  int nr = static_cast<int>(h.rows());
  CMat m = hermitian_part(CMat::Identity(nr, nr) + gram(h, q));
  Eigen::LLT<CMat> llt(m);
  if (llt.info() != Eigen::Success)
    throw DomainError("gradient: shifted Gram matrix not PD");
  return hermitian_part(h.adjoint() * llt.solve(h));
}

}  // namespace

CovarianceTriple sanitize(const CovarianceTriple& cov) {
  CovarianceTriple s;
  s.multicast = sanitize_psd(cov.multicast);
  s.confidential = sanitize_psd(cov.confidential);
  s.noise = sanitize_psd(cov.noise);
  s.power = cov.power;
  return s;
}

CovarianceReport validate_covariances(const CovarianceTriple& cov) {
  CovarianceReport r;
  const CMat* qs[3] = {&cov.multicast, &cov.confidential, &cov.noise};
  bool ok = true;
  for (int i = 0; i < 3; ++i) {
    r.hermitian_defect[i] = hermitian_defect(*qs[i]);
    r.min_eigenvalue[i] = min_eigenvalue(*qs[i]);
    if (r.hermitian_defect[i] > 1e-9 || r.min_eigenvalue[i] < -1e-9) ok = false;
  }
  r.trace_slack = cov.power - cov.total_trace();
  if (r.trace_slack < -1e-9) ok = false;
  r.pass = ok;
  return r;
}

double multicast_capacity(const ChannelSet& ch, const CovarianceTriple& cov,
                          int k) {
  check_dims(ch, cov);
  check_rx_index(ch, k);
  return nats_to_bits(multicast_nats(ch, sanitize(cov), k));
}

double confidential_capacity(const ChannelSet& ch,
                             const CovarianceTriple& cov) {
  check_dims(ch, cov);
  return nats_to_bits(confidential_nats(ch, sanitize(cov)));
}

double eavesdrop_capacity(const ChannelSet& ch, const CovarianceTriple& cov,
                          int k) {
  check_dims(ch, cov);
  check_rx_index(ch, k);
  if (k == 0)
    throw DomainError("receiver 0 is the authorized one, not an eavesdropper");
  return nats_to_bits(eavesdrop_nats(ch, sanitize(cov), k));
}

double multicast_rate(const ChannelSet& ch, const CovarianceTriple& cov) {
  check_dims(ch, cov);
  return nats_to_bits(multicast_rate_nats(ch, sanitize(cov)));
}

double max_leakage(const ChannelSet& ch, const CovarianceTriple& cov) {
  check_dims(ch, cov);
  return nats_to_bits(max_leakage_nats(ch, sanitize(cov)));
}

double secrecy_rate(const ChannelSet& ch, const CovarianceTriple& cov) {
  check_dims(ch, cov);
  CovarianceTriple s = sanitize(cov);
  double gap = confidential_nats(ch, s) - max_leakage_nats(ch, s);
  return nats_to_bits(std::max(0.0, gap));
}

RatePoint rate_point(const ChannelSet& ch, const CovarianceTriple& cov) {
  check_dims(ch, cov);
  CovarianceTriple s = sanitize(cov);
  RatePoint p;
  p.multicast_bits = nats_to_bits(multicast_rate_nats(ch, s));
  p.secrecy_gap_bits =
      nats_to_bits(confidential_nats(ch, s) - max_leakage_nats(ch, s));
  p.secrecy_bits = std::max(0.0, p.secrecy_gap_bits);
  return p;
}

double weighted_objective(const ChannelSet& ch, const CovarianceTriple& cov,
                          double lambda_c) {
  check_dims(ch, cov);
  CovarianceTriple s = sanitize(cov);
  double gap = confidential_nats(ch, s) - max_leakage_nats(ch, s);
  return nats_to_bits(lambda_c * gap + multicast_rate_nats(ch, s));
}

TripleGrad grad_confidential(const ChannelSet& ch,
                             const CovarianceTriple& cov) {
  check_dims(ch, cov);
  CovarianceTriple s = sanitize(cov);
  const CMat& h = ch.rx[0];
  CMat joint = logdet_grad(h, s.noise + s.confidential);
  CMat noise_only = logdet_grad(h, s.noise);
  TripleGrad g;
  g.multicast = CMat::Zero(ch.n_t, ch.n_t);
  g.confidential = joint;
  g.noise = joint - noise_only;
  return g;
}

TripleGrad grad_eavesdrop(const ChannelSet& ch, const CovarianceTriple& cov,
                          int k) {
  check_dims(ch, cov);
  check_rx_index(ch, k);
  if (k == 0)
    throw DomainError("receiver 0 is the authorized one, not an eavesdropper");
  CovarianceTriple s = sanitize(cov);
  const CMat& h = ch.rx[k];
  CMat joint = logdet_grad(h, s.noise + s.confidential);
  CMat noise_only = logdet_grad(h, s.noise);
  TripleGrad g;
  g.multicast = CMat::Zero(ch.n_t, ch.n_t);
  g.confidential = joint;
  g.noise = joint - noise_only;
  return g;
}

TripleGrad grad_multicast(const ChannelSet& ch, const CovarianceTriple& cov,
                          int k) {
  check_dims(ch, cov);
  check_rx_index(ch, k);
  CovarianceTriple s = sanitize(cov);
  const CMat& h = ch.rx[k];
  CMat full = logdet_grad(h, s.sum());
  CMat interf = logdet_grad(h, s.confidential + s.noise);
  TripleGrad g;
  g.multicast = full;
  g.confidential = full - interf;
  g.noise = full - interf;
  return g;
}

}  // namespace srr
