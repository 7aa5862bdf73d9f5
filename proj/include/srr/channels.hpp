#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "srr/types.hpp"

namespace srr {

// Entries are i.i.d. CN(0,1): real and imaginary parts independent
// N(0, 1/2). Receivers are filled in index order, each matrix row by row,
// one complex draw per entry from Mt64(seed); this order is part of the
// contract so a seed pins the channels across builds.
ChannelSet generate_channels(std::uint64_t seed, int n_t,
                             const std::vector<int>& n_r);

// JSON files with real/imag entry arrays; see README for the schema.
// Writes go to a temp file in the same directory, then rename.
void save_channels(const ChannelSet& ch, const std::string& path,
                   std::uint64_t seed = 0);
ChannelSet load_channels(const std::string& path, std::uint64_t* seed_out =
                                                      nullptr);

void save_covariances(const CovarianceTriple& cov, const std::string& path);
CovarianceTriple load_covariances(const std::string& path);

void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace srr
