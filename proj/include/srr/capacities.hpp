#pragma once

#include "srr/types.hpp"

namespace srr {

// Per-receiver rates of the three-stream superposition coding scheme: the
// open stream is decoded last at every receiver (confidential stream and
// artificial noise act as interference), the confidential stream is decoded
// at receiver 0 after stripping the open stream (noise still interferes),
// and an eavesdropper's leakage is the same expression on its own channel.
// Reported in bits; internals run in nats.

double multicast_capacity(const ChannelSet& ch, const CovarianceTriple& cov,
                          int k);
double confidential_capacity(const ChannelSet& ch, const CovarianceTriple& cov);
double eavesdrop_capacity(const ChannelSet& ch, const CovarianceTriple& cov,
                          int k);  // k >= 1

double multicast_rate(const ChannelSet& ch, const CovarianceTriple& cov);
double max_leakage(const ChannelSet& ch, const CovarianceTriple& cov);
double secrecy_rate(const ChannelSet& ch, const CovarianceTriple& cov);

RatePoint rate_point(const ChannelSet& ch, const CovarianceTriple& cov);

// lambda_c * (confidential - max leakage, unclamped) + multicast_rate, bits.
double weighted_objective(const ChannelSet& ch, const CovarianceTriple& cov,
                          double lambda_c);

CovarianceReport validate_covariances(const CovarianceTriple& cov);
CovarianceTriple sanitize(const CovarianceTriple& cov);

// Gradients in nats with respect to (multicast, confidential, noise)
// covariances, for stationarity checks. Evaluated at the sanitized triple.
struct TripleGrad {
  CMat multicast, confidential, noise;
};
TripleGrad grad_confidential(const ChannelSet& ch, const CovarianceTriple& cov);
TripleGrad grad_eavesdrop(const ChannelSet& ch, const CovarianceTriple& cov,
                          int k);
TripleGrad grad_multicast(const ChannelSet& ch, const CovarianceTriple& cov,
                          int k);

}  // namespace srr
