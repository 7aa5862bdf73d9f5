#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "srr/types.hpp"

namespace srr {

// One row of an iterative run, in the exact units the trace files use.
struct TraceRow {
  int n = 0;
  double objective_nats = 0.0;
  double multicast_bits = 0.0;
  double secrecy_bits = 0.0;
};

struct BoundaryRecord {
  double param = 0.0;  // qoms target, weight, or time share depending on method
  double r0_bits = 0.0;
  double rc_bits = 0.0;
  int outer_iters = 0;
  int inner_solves = 0;
  double wall_ms = 0.0;
  std::string status;  // ok, endpoint, infeasible, max_outer, failed
  std::vector<TraceRow> trace;
};

struct RegionBoundary {
  std::string method;
  std::uint64_t seed = 0;
  double p_db = 0.0;
  std::vector<BoundaryRecord> records;
  // One delivered triple per record where the method produces one; empty
  // matrices (dimension zero) otherwise, e.g. interior time-sharing points.
  std::vector<CovarianceTriple> solutions;
};

}  // namespace srr
