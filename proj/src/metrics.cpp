#include "livemig/metrics.hpp"

#include <algorithm>

#include "livemig/baselines.hpp"

namespace livemig {

EnergyWh integrateEnergy(const std::vector<PowerSample>& samples, double endTime, const PowerModel& model) {
  EnergyWh e;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    const double until = i + 1 < samples.size() ? samples[i + 1].time : endTime;
    const double dt = std::max(0.0, until - s.time);
    const double host = s.hostsOn * model.hostIdle + (model.hostPeak - model.hostIdle) * s.utilizationSum;
    const double net = s.switchesOn * model.switchStatic + s.activePorts * model.switchPort;
    e.host += host * dt / 3600.0;
    e.network += net * dt / 3600.0;
  }
  return e;
}

std::vector<DeadlineWindow> deadlineAccounting(const std::vector<TaskRecord>& tasks, double horizonEnd) {
  std::vector<DeadlineWindow> out;
  for (const auto& t : tasks) {
    if (!t.deadline) continue;
    DeadlineWindow w;
    w.id = t.id;
    if (t.status == TaskStatus::Completed) {
      w.window = *t.deadline - t.end;
      w.miss = w.window < 0.0;
    } else {
      w.window = *t.deadline - horizonEnd;
      w.miss = true;
    }
    out.push_back(w);
  }
  return out;
}

MetricsReport computeMetrics(const SimulationResult& result, const PowerModel& power) {
  MetricsReport r;
  r.algorithm = toString(result.algorithm);
  r.policy = toString(result.policy);
  r.tasks = result.tasks.size();
  for (const auto& t : result.tasks) {
    if (t.status != TaskStatus::Completed) continue;
    ++r.completed;
    r.avgExecutionTime += t.executionTime();
    r.maxExecutionTime = std::max(r.maxExecutionTime, t.executionTime());
    r.totalDowntime += t.downtime;
    r.maxDowntime = std::max(r.maxDowntime, t.downtime);
    r.totalTransferredBits += t.transferred;
  }
  r.failed = r.tasks - r.completed;
  if (r.completed > 0) {
    const double n = static_cast<double>(r.completed);
    r.avgExecutionTime /= n;
    r.avgDowntime = r.totalDowntime / n;
    r.avgTransferredBits = r.totalTransferredBits / n;
  }
  r.totalMigrationTime = totalMigrationTime(result);

  r.windows = deadlineAccounting(result.tasks, result.horizonEnd);
  r.deadlineTasks = r.windows.size();
  if (!r.windows.empty()) {
    double sum = 0.0;
    for (const auto& w : r.windows) {
      sum += w.window;
      r.deadlineMisses += w.miss;
    }
    r.avgRemainingWindow = sum / static_cast<double>(r.windows.size());
  }

  r.requests = result.requests.size();
  r.avgTransmissionTime = measureTransmission(result.requests);
  const auto e = integrateEnergy(result.power, result.endTime, power);
  r.hostEnergyWh = e.host;
  r.switchEnergyWh = e.network;
  r.plannerRuntime = result.plannerRuntime;
  r.maxConcurrent = result.maxConcurrent;
  return r;
}

}  // namespace livemig
