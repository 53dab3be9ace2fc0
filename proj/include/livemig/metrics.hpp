// Statistics reported for a finished run.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "livemig/simulator.hpp"

namespace livemig {

struct EnergyWh {
  double host = 0.0;
  double network = 0.0;
};

// Piecewise-constant integration of the sampled power inputs over
// [first sample, endTime].
EnergyWh integrateEnergy(const std::vector<PowerSample>& samples, double endTime, const PowerModel& model);

struct DeadlineWindow {
  TaskId id = 0;
  double window = 0.0;  // D - completion; D - horizon end for tasks that never completed
  bool miss = false;
};

// Completed tasks miss when finishing after D.  Failed or aborted tasks that
// carry a deadline always count as misses.
std::vector<DeadlineWindow> deadlineAccounting(const std::vector<TaskRecord>& tasks, double horizonEnd);

struct MetricsReport {
  std::string algorithm;
  std::string policy;
  std::size_t tasks = 0;
  std::size_t completed = 0;
  std::size_t failed = 0;
  double totalMigrationTime = 0.0;
  double avgExecutionTime = 0.0;
  double maxExecutionTime = 0.0;
  double avgDowntime = 0.0;
  double maxDowntime = 0.0;
  double totalDowntime = 0.0;
  double totalTransferredBits = 0.0;
  double avgTransferredBits = 0.0;
  std::size_t deadlineTasks = 0;
  std::size_t deadlineMisses = 0;
  std::optional<double> avgRemainingWindow;
  std::vector<DeadlineWindow> windows;
  std::size_t requests = 0;
  std::optional<double> avgTransmissionTime;
  double hostEnergyWh = 0.0;
  double switchEnergyWh = 0.0;
  double plannerRuntime = 0.0;
  int maxConcurrent = 0;
};

MetricsReport computeMetrics(const SimulationResult& result, const PowerModel& power);

}  // namespace livemig
