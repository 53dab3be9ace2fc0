// Comparison schedulers and the small-instance oracle.
//
// The predictive-grouping and rate-maximization schedulers are simplified
// stand-ins rebuilt from published descriptions of CQNCR and FPTAS, not
// ports of the original implementations.

#pragma once

#include <vector>

#include "livemig/planner.hpp"
#include "livemig/simulator.hpp"

namespace livemig {

// One singleton group per task in id order.
MigrationPlan oneByOne(std::vector<MigrationTask> tasks);

struct TimedGroup {
  std::vector<std::size_t> tasks;  // indices into TimedPlan::units
  double start = 0.0;              // absolute
};

struct TimedPlan {
  std::vector<MigrationTask> units;
  std::vector<TimedGroup> groups;
};

// Greedy grouping: repeatedly forms the group of mutually independent tasks
// taken shortest-predicted-first and schedules it when the previous group is
// predicted to finish.  Start times are fixed at planning time.
TimedPlan groupedPredictive(std::vector<MigrationTask> tasks, const Datacenter& dc, double now = 0.0);

// Order in which the rate-maximizing scheduler considers pending units:
// highest probe rate first, ties by unit id.  Units with no positive rate are
// left out.
std::vector<std::size_t> rateMaximizationOrder(const std::vector<const MigrationTask*>& pending, const Datacenter& dc);

constexpr std::size_t kOracleMaxTasks = 6;

struct OracleResult {
  FixedPlan plan;
  SimulationResult result;
  double totalTime = 0.0;
  std::size_t evaluated = 0;
};

// Simulates every ordered partition of the units into internally independent
// groups, with and without merging of small co-path migrations, and keeps the
// one with the fewest failures and then the least total migration time.
// Throws std::invalid_argument above kOracleMaxTasks requests or when some
// request arrives after time 0.
OracleResult exhaustiveOptimal(const SimulationInput& input);

// First start to last completion over completed tasks; 0 when none ran.
double totalMigrationTime(const SimulationResult& result);

}  // namespace livemig
