#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "srr/ao.hpp"
#include "srr/dc.hpp"
#include "srr/region.hpp"
#include "srr/types.hpp"

namespace srr {

double db_to_linear(double db);
double linear_to_db(double p);

struct ComplexityEstimate {
  double n1 = 0.0, n2 = 0.0;  // decision-variable counts of the two solvers
  double t1 = 0.0, t2 = 0.0;  // arithmetic-cost figures per boundary point
};
ComplexityEstimate complexity_estimate(int n_t, int k);

// Re-runs the chosen tracer with the noise covariance structurally removed
// from every program. method is "dc" or "ao"; the relevant sweep config is
// used, with its include_an forced off.
RegionBoundary run_no_an(const ChannelSet& ch, double power,
                         const std::string& method,
                         const DcSweepConfig& dcc = {},
                         const AoSweepConfig& aoc = {});

// Time-shared baseline: the two single-service corners (multicast only at
// full rate; confidential only, floor zero) connected by the slot-share
// segment t in [0,1] on a uniform grid.
RegionBoundary run_tdma(const ChannelSet& ch, double power, int points = 21,
                        const DcConfig& dc = {});

struct ExperimentConfig {
  std::uint64_t seed = 0;
  bool has_seed = false;
  int n_t = 5;
  std::vector<int> n_r = {3, 3, 3, 3};
  std::vector<double> p_db = {0, 4, 8, 12, 16, 20};
  std::string method = "dc";  // dc | ao | no-an-dc | no-an-ao | tdma
  int points = 21;            // floor / time-share grid size
  std::vector<double> weights;  // ao weight grid; empty = default
  double tol_bits = 1e-4;
  int max_outer = 0;  // 0: per-method default
  std::string out_dir = ".";
  std::string channels_path;  // nonempty: load instead of generating
  bool dump_covariances = false;
  bool rescale = true;
  bool write_traces = true;
};

// Throws DomainError on malformed input. Recognized keys documented in the
// README; unknown keys are rejected to catch typos.
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig config_from_json_file(const std::string& path);

std::string boundary_csv(const RegionBoundary& b);
std::string trace_jsonl(const RegionBoundary& b);
RegionBoundary parse_boundary_csv(const std::string& text);

// Runs one power cell of the configured method; the caller provides the
// channels and the linear power.
RegionBoundary run_cell(const ChannelSet& ch, double power,
                        const ExperimentConfig& cfg);

// Full orchestration: resolves channels, runs every power cell (cells run
// concurrently up to SRR_THREADS), writes boundary CSV plus convergence
// JSONL and optional covariance dumps per cell. Returns 0 when every point
// succeeded, 2 when some points failed, 1 on fatal errors.
int run_experiment(const ExperimentConfig& cfg);

}  // namespace srr
