// Deadline-aware concurrent migration grouping.
//
// Pipeline: deadlines -> merge small co-path migrations -> dependency graph
// (pairs that contend for an interface or for path bandwidth) -> greedy
// complete-subgraph decomposition -> per-task cost -> first-fit concurrent
// groups sorted by total cost.

#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "livemig/datacenter.hpp"
#include "livemig/migration_model.hpp"

namespace livemig {

using TaskId = std::int32_t;

struct SloTracker {
  double threshold = 0.0;   // theta: tolerated violations
  double violations = 0.0;  // Y_t: violations so far
  double rate = 0.0;        // omega: violations per second
};

// One VM/VNF move requested by the resource manager.
struct MigrationRequest {
  TaskId id = 0;
  InstanceId instance = -1;
  NodeId destination = -1;
  std::optional<double> deadline;  // explicit scheduling window, absolute seconds
  std::optional<SloTracker> slo;
  double arrival = 0.0;
  std::optional<double> actualDirtyRate;  // simulated rate when it differs from the monitored one
};

struct TaskMember {
  TaskId request = 0;
  InstanceId instance = -1;
  MigrationSpec spec;
  MigrationEstimate estimate;
};

enum class DeadlineSource { None, Window, Slo, Group };

// Planning unit.  Normally one member; several when small co-path migrations
// are merged and moved together.
struct MigrationTask {
  TaskId id = 0;
  std::vector<TaskMember> members;
  NodeId source = -1;
  NodeId destination = -1;
  PathSet paths;
  double deadline = std::numeric_limits<double>::infinity();  // absolute
  DeadlineSource deadlineSource = DeadlineSource::None;
  bool deadlineInfeasible = false;
  double bandwidth = 0.0;      // predicted per-member rate at planning time
  double executionTime = 0.0;  // predicted T_exe of the whole unit

  bool hasDeadline() const { return deadlineSource != DeadlineSource::None; }
};

struct CostWeights {
  double alpha = 0.5;
  double beta = 0.3;
  double gamma = 0.2;
  double a = 0.5;
  double b = 0.5;
  // With the default the slack term enters as (D - T_mig) so tighter
  // deadlines lower the score; `literal` keeps (T_mig - D).
  bool literalSlack = false;
  void validate() const;
};

struct PlannerConfig {
  int pathsPerTask = 1;
  double horizon = 3600.0;                // deadline used for deadline-free tasks
  double mergeMaxMemoryBits = 4e9 * 8;    // small flavor and below
  double mergeMaxSigma = 0.1;             // rho*R/L
  bool mergeEnabled = true;
  std::optional<int> parallelCap;         // lambda(p) for every path set
};

struct PlanningContext {
  const Datacenter& dc;
  MigrationSpec defaults;  // everything except memory and dirty rate
  CostWeights weights;
  PlannerConfig config;
  double now = 0.0;
};

// Builds unmerged single-member tasks with paths and estimates.
std::vector<MigrationTask> makeTasks(const std::vector<MigrationRequest>& requests, const PlanningContext& ctx);

// Spec of an instance under the context defaults.
MigrationSpec instanceSpec(const Instance& inst, const MigrationSpec& defaults, std::optional<double> dirtyRate = {});

// Re-estimates bandwidth and execution time of the unit on the current state.
void estimateTask(MigrationTask& task, const PlanningContext& ctx);

// SLO trackers give (theta - Y)/omega from now; virtual topologies with a
// group deadline give D(G) minus the other migrating members' execution
// times.  Explicit windows pass through.
void assignDeadlines(std::vector<MigrationTask>& tasks, const std::vector<MigrationRequest>& requests,
                     const PlanningContext& ctx);

std::vector<MigrationTask> preprocessParallel(std::vector<MigrationTask> tasks, const PlanningContext& ctx);

// Rate check between two units that share no endpoint pair.
bool isIndependent(const MigrationTask& j, const MigrationTask& k, const Datacenter& dc);

class DependencyGraph {
 public:
  explicit DependencyGraph(std::size_t n = 0) : adj_(n, std::vector<bool>(n, false)), lists_(n) {}
  std::size_t size() const { return adj_.size(); }
  void addEdge(std::size_t a, std::size_t b);
  bool hasEdge(std::size_t a, std::size_t b) const { return adj_[a][b]; }
  // Ascending.
  const std::vector<std::size_t>& neighbors(std::size_t a) const { return lists_[a]; }
  std::size_t edgeCount() const;

 private:
  std::vector<std::vector<bool>> adj_;
  std::vector<std::vector<std::size_t>> lists_;
};

DependencyGraph buildDependencyGraph(const std::vector<MigrationTask>& tasks, const Datacenter& dc);

using CliqueSet = std::vector<std::vector<std::size_t>>;
CliqueSet completeDependencySubgraphs(const DependencyGraph& graph);

struct CostBreakdown {
  double migrationTime = 0.0;
  double slack = 0.0;
  double directImpact = 0.0;
  double potentialImpact = 0.0;
  double score = 0.0;
};

// Scores for every task (index-aligned).
std::vector<CostBreakdown> scoreTasks(const std::vector<MigrationTask>& tasks, const DependencyGraph& graph,
                                      const PlanningContext& ctx);

struct MigrationGroup {
  std::vector<std::size_t> tasks;  // indices into the planned unit list
  double cost = 0.0;
};

struct MigrationPlan {
  std::vector<MigrationTask> units;
  std::vector<MigrationGroup> groups;
};

std::vector<MigrationGroup> concurrentGroups(const CliqueSet& cliques, const DependencyGraph& graph,
                                             const std::vector<double>& scores);

struct PlanResult {
  MigrationPlan plan;
  DependencyGraph graph;
  CliqueSet cliques;
  std::vector<CostBreakdown> costs;
};

PlanResult plan(const std::vector<MigrationRequest>& requests, const PlanningContext& ctx);

// Ongoing units keep running and are left out of the graph; their bandwidth
// is already reflected in `ctx.dc`.  Pending and new requests are planned
// together on the current state.
PlanResult replan(const std::vector<MigrationRequest>& pending, const std::vector<MigrationRequest>& arrivals,
                  const PlanningContext& ctx);

}  // namespace livemig
