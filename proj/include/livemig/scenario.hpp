// Scenario files (JSON or YAML) and run output.
//
// File units: bandwidth in Mbps, memory/disk in GB, time in seconds,
// compute loads in million instructions.  Internally everything is bits,
// bits/s and bytes.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "livemig/metrics.hpp"
#include "livemig/simulator.hpp"

namespace livemig {

// Validation failure; `path` names the offending field, e.g. migrations[2].destination.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(const std::string& path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct CustomHost {
  std::string name;
  double ifaceBw = 10e9;
  HostResources res;
};

struct CustomLink {
  std::string a;
  std::string b;
  double capacity = 10e9;
};

struct TopologySpec {
  std::string type = "fattree";  // fattree | wan | custom
  // fattree
  int pods = 8;
  double hostIfaceBw = 10e9;
  double linkBw = 10e9;
  HostResources host;
  // wan
  bool aarnet = false;
  WanSpec wan;
  // custom
  std::vector<CustomHost> hosts;
  std::vector<std::string> switches;
  std::vector<CustomLink> links;
};

struct InstanceEntry {
  std::string name;
  std::string flavor;
  std::string host;
  double dirtyRate = 0.0;  // bits/s
  std::optional<double> mipo;
};

struct VLinkEntry {
  std::string src;
  std::string dst;
  double reserved = 0.0;  // bits/s
};

struct VTopologyEntry {
  std::string name;
  TopologyKind kind = TopologyKind::Single;
  std::optional<double> groupDeadline;
  std::vector<InstanceEntry> instances;
  std::vector<VLinkEntry> links;
};

struct MigrationEntry {
  TaskId id = 0;
  std::string instance;
  std::string destination;
  std::optional<double> deadline;
  std::optional<SloTracker> slo;
  double arrival = 0.0;
  std::optional<double> actualDirtyRate;  // bits/s
};

struct WorkloadEntry {
  std::vector<std::string> chain;
  double rate = 20.0;
  double packetBits = 5e6;
  double senderLoad = 200.0;
  double receiverLoad = 200.0;
  double start = 0.0;
  std::optional<double> end;  // defaults to the horizon
};

struct Scenario {
  std::string name = "scenario";
  std::uint64_t seed = 1;
  double horizon = 600.0;
  SharingPolicy policy = SharingPolicy::Ratio;
  TopologySpec topology;
  std::optional<int> paths;  // defaults: 3 on wan, 1 otherwise
  std::map<std::string, Flavor> flavors;
  MigrationSpec model;
  CostWeights weights;
  PlannerConfig planner;
  PowerModel power;
  std::vector<VTopologyEntry> virtualTopologies;
  std::vector<MigrationEntry> migrations;
  std::vector<WorkloadEntry> workloads;
  std::vector<std::vector<TaskId>> order;

  int pathCount() const { return paths.value_or(topology.type == "wan" ? 3 : 1); }
};

// Throws ScenarioError.
Scenario scenarioFromJson(const nlohmann::json& doc);
nlohmann::json scenarioToJson(const Scenario& scenario);  // every default filled in
nlohmann::json loadDocument(const std::filesystem::path& file);  // .yaml/.yml via YAML, otherwise JSON
Scenario parseScenario(const std::filesystem::path& file);

PhysicalTopology buildTopology(const TopologySpec& spec);
// Builds the initial state; throws ScenarioError on dangling references or
// placements that do not fit.
SimulationInput buildInput(const Scenario& scenario);

struct RunOutput {
  std::string algorithm;
  MetricsReport report;
  SimulationResult result;
};

nlohmann::json summaryJson(const Scenario& scenario, const MetricsReport& report, bool timing);
std::string tasksCsv(const SimulationResult& result);
std::string traceJsonl(const SimulationResult& result);
std::string comparisonCsv(const std::vector<MetricsReport>& reports);

// Writes summary.json and tasks.csv (plus trace.jsonl when requested).
// Throws std::runtime_error when the directory is not writable.
void emitReport(const std::filesystem::path& dir, const Scenario& scenario, const MetricsReport& report,
                const SimulationResult& result, bool trace, bool timing);

}  // namespace livemig
