#pragma once

// The stage/step renormalization machine at user-chosen toy constants,
// coupling the continuum exploration to oriented site percolation on Z_+^2.
//
// Stages visit Z_+^2 in order of increasing l^1 distance from the origin,
// decreasing lexicographically within a shell.  An accessible stage runs up
// to five steps: two seed-to-seed advances, a branching step creating seeds
// towards both the east and north faces, and two outward advances that must
// land seeds centred inside the right and upper bond-boxes.  Seeds are boxes
// Lambda_m(x), x integer, certified inside depth-2m target slabs, so every
// advance moves the seed centre by exactly N = n + m; that is what puts the
// outward seeds exactly on the closed bond-boxes.  Inaccessible sites are
// declared open with probability 1 - 20 eps0 without exploring.
//
// Runtime assertions (counted, never silently dropped): sub-cluster nesting
// and connectedness, disjointness of the branch north face from the
// two-layer cube cover of the explored set, and slab confinement of every
// cluster point to S_{4N} in coordinates 3..d.

#include <iosfwd>
#include <map>

#include "rcm/connection.hpp"
#include "rcm/exploration.hpp"

namespace rcm {

struct ToyConstants {
  int dim = 2;
  long m = 4;
  long n = 8;  // positive multiple of 2m
  double lambda = 8.0;
  double eps0 = 1.0 / 9999.0;
  double eps1 = 1.0;  // sprinkle intensity, in [0,1] for these experiments
  ConnectionFunction phi = ConnectionFunction::indicator(1.0);
  Norm norm = Norm::l2();

  long big_n() const { return n + m; }
  void validate() const;
};

struct StepOutcome {
  std::string name;
  bool success = false;
};

struct StageRecord {
  long i = 0, j = 0;
  enum class Status { Open, Closed, InaccessibleOpen, InaccessibleClosed };
  Status status = Status::Closed;
  std::vector<StepOutcome> steps;
  std::vector<std::vector<double>> seeds;  // seed centres discovered, in order
  int xi_snapshot = 0;                     // sub-cluster snapshot after the stage
};

const char* to_string(StageRecord::Status s);

struct RenormResult {
  std::vector<StageRecord> stages;
  PointSet final_cluster;
  std::vector<std::size_t> xi_sizes;  // snapshot sizes, one per completed step
  std::size_t assertion_failures = 0;
  std::vector<std::string> assertion_notes;
  bool origin_stage_open = false;
  // Open accessible sites all carried seeds centred in both adjacent
  // bond-boxes (checked as part of the run).
  bool bond_box_postcondition = true;
};

RenormResult run_renormalization(const ToyConstants& tc, long window,
                                 std::uint64_t master_seed);

// JSON-lines stage log: {"i","j","status","steps":[{"name","success"}],
// "seeds":[[coords]]}, one record per stage.
void write_stage_log_jsonl(const std::vector<StageRecord>& stages, std::ostream& os);

}  // namespace rcm
