// Discrete-event simulation of migrations and application traffic.
//
// Data movement is fluid: every migration subflow and every request hop has
// a remaining volume and a rate that stays constant between events.  Rates
// are recomputed whenever a flow starts, stops or a placement changes.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "livemig/datacenter.hpp"
#include "livemig/planner.hpp"
#include "livemig/workload.hpp"

namespace livemig {

enum class Algorithm { Slamig, OneByOne, Cqncr, Fptas, Oracle, Imposed };
Algorithm parseAlgorithm(const std::string& name);  // throws std::invalid_argument
std::string toString(Algorithm algo);

enum class EventKind {
  MigPre,
  MigStart,
  PacketComplete,
  SubflowComplete,
  VmPause,
  VmResume,
  MigPost,
  MigScheduler,
  TaskArrival,
  GroupRelease,
  RequestArrival,
  RequestStage,
  HopComplete,
};
std::string toString(EventKind kind);

struct PowerModel {
  double hostIdle = 100.0;  // W
  double hostPeak = 250.0;
  double switchStatic = 66.0;
  double switchPort = 1.0;  // W per active port
};

struct SimulationInput {
  Datacenter dc;  // initial state; copied by every run
  std::vector<MigrationRequest> requests;
  std::vector<WorkloadStream> workloads;
  MigrationSpec defaults;
  CostWeights weights;
  PlannerConfig planner;
  double horizon = 3600.0;
  std::uint64_t seed = 1;
  std::vector<std::vector<TaskId>> imposedOrder;  // groups of request ids, for Algorithm::Imposed
  bool recordTrace = false;
};

enum class TaskStatus { Completed, Failed, Aborted };
std::string toString(TaskStatus status);

struct TaskRecord {
  TaskId id = 0;
  std::string instance;
  std::string source;
  std::string destination;
  TaskStatus status = TaskStatus::Failed;
  std::string reason;
  int unit = -1;       // id of the unit it moved with
  int group = -1;      // plan group index when the unit started, -1 if none
  double arrival = 0.0;
  double start = -1.0;  // MIG_PRE
  double end = -1.0;    // MIG_POST
  double downtime = 0.0;
  double transferred = 0.0;  // bits
  int rounds = 0;
  bool converged = false;
  std::optional<double> deadline;

  double executionTime() const { return end >= start && start >= 0.0 ? end - start : 0.0; }
};

struct TraceRecord {
  double time = 0.0;
  EventKind kind = EventKind::MigScheduler;
  int task = -1;
  std::string detail;
};

// Service rate of a request hop from `time` until the next change.
struct RateChange {
  double time = 0.0;
  int request = 0;
  std::size_t hop = 0;
  double rate = 0.0;
  int migrationsOnPath = 0;  // moving migration subflows on the hop's busiest resource
};

// Aggregate power inputs, recorded whenever they change.
struct PowerSample {
  double time = 0.0;
  int hostsOn = 0;
  double utilizationSum = 0.0;
  int switchesOn = 0;
  int activePorts = 0;
};

struct SimulationResult {
  Algorithm algorithm = Algorithm::Slamig;
  SharingPolicy policy = SharingPolicy::Ratio;
  std::vector<TaskRecord> tasks;  // ordered by request id
  std::vector<RequestRecord> requests;
  std::vector<TraceRecord> trace;
  std::vector<RateChange> rateLog;
  std::vector<PowerSample> power;
  double endTime = 0.0;          // energy integration bound
  double horizonEnd = 0.0;       // reference for deadline slack of failed tasks
  double plannerRuntime = 0.0;   // wall clock, seconds
  int maxConcurrent = 0;         // most units simultaneously past MIG_PRE
};

// Plan executed by the group scheduler.  Units and groups as produced by the
// planner; indices of `groups` refer to `units`.
struct FixedPlan {
  std::vector<MigrationTask> units;
  std::vector<MigrationGroup> groups;
};

SimulationResult runSimulation(const SimulationInput& input, Algorithm algo);

// Runs a given plan under the group scheduler.
SimulationResult runPlan(const SimulationInput& input, const FixedPlan& plan);

// Planning context over the initial state of `input`.
PlanningContext planningContext(const SimulationInput& input, const Datacenter& dc, double now = 0.0);

}  // namespace livemig
