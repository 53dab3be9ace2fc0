#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "livemig/scenario.hpp"
#include "support.hpp"

using namespace livemig;
using support::json;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> csvRows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("livemig_unit_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("minimal fixture with defaults") {
  const auto s = parseScenario(support::fixture("minimal.yaml"));
  CHECK(s.name == "minimal");
  CHECK(s.migrations.size() == 1);
  const auto j = scenarioToJson(s);
  CHECK(j["model"]["preTime"] == 0.8);
  CHECK(j["model"]["postTime"] == 1.2);
  CHECK(j["model"]["resumeTime"] == doctest::Approx(0.3));
  CHECK(j["model"]["maxRounds"] == 30);
  CHECK(j["policy"] == "ratio");
  CHECK(j["weights"]["alpha"] == 0.5);
  CHECK(j["migrations"][0]["id"] == 0);
  CHECK(j["topology"]["pods"] == 4);
  // a second pass changes nothing
  CHECK(scenarioToJson(scenarioFromJson(j)) == j);
}

TEST_CASE("flavor table") {
  const auto f = standardFlavors();
  CHECK(f.at("xlarge").memoryBytes == 64e9);
  CHECK(f.at("xlarge").cores == 12);
  CHECK(f.at("xlarge").diskBytes == 120e9);
  CHECK(f.at("micro").memoryBytes == 1e9);
  const auto s = parseScenario(support::fixture("minimal.yaml"));
  CHECK(scenarioToJson(s)["flavors"]["xlarge"]["memoryGB"] == 64);
}

TEST_CASE("unknown destination") {
  auto doc = loadDocument(support::fixture("minimal.yaml"));
  doc["migrations"][0]["destination"] = "h99";
  try {
    scenarioFromJson(doc);
    FAIL("accepted");
  } catch (const ScenarioError& e) {
    CHECK(e.path() == "migrations[0].destination");
  }
}

TEST_CASE("malformed fields name their path") {
  auto doc = loadDocument(support::fixture("minimal.yaml"));
  doc["virtualTopologies"][0]["instances"][0]["flavor"] = "huge";
  CHECK_THROWS_AS(scenarioFromJson(doc), ScenarioError);
  doc = loadDocument(support::fixture("minimal.yaml"));
  doc["policy"] = "greedy";
  try {
    scenarioFromJson(doc);
    FAIL("accepted");
  } catch (const ScenarioError& e) {
    CHECK(e.path() == "policy");
  }
  doc = loadDocument(support::fixture("minimal.yaml"));
  doc["migrations"].push_back(doc["migrations"][0]);
  CHECK_THROWS_AS(scenarioFromJson(doc), ScenarioError);
}

TEST_CASE("fixtures round trip") {
  for (const char* f : {"minimal.yaml", "motivation.yaml", "starvation.yaml", "deadline.yaml", "wan.yaml"}) {
    const auto j = scenarioToJson(parseScenario(support::fixture(f)));
    CHECK(scenarioToJson(scenarioFromJson(j)) == j);
  }
}

TEST_CASE("single run output") {
  const auto s = parseScenario(support::fixture("minimal.yaml"));
  auto in = buildInput(s);
  in.recordTrace = true;
  const auto r = runSimulation(in, Algorithm::Slamig);
  const auto m = computeMetrics(r, s.power);
  const auto dir = scratch("single");
  emitReport(dir, s, m, r, true, false);
  const auto summary = json::parse(slurp(dir / "summary.json"));
  CHECK(summary.contains("totalMigrationTime"));
  CHECK_FALSE(summary.contains("plannerRuntime"));
  const auto rows = csvRows(slurp(dir / "tasks.csv"));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].size() == rows[1].size());
  CHECK(rows[1][4] == "completed");
  std::ifstream trace(dir / "trace.jsonl");
  std::string line;
  int n = 0;
  while (std::getline(trace, line)) {
    CHECK(json::accept(line));
    ++n;
  }
  CHECK(n > 5);
  std::filesystem::remove_all(dir);
}

TEST_CASE("comparison table") {
  const auto s = parseScenario(support::fixture("deadline.yaml"));
  const auto in = buildInput(s);
  std::vector<MetricsReport> reports;
  for (auto a : {Algorithm::Slamig, Algorithm::OneByOne, Algorithm::Cqncr, Algorithm::Fptas}) {
    reports.push_back(computeMetrics(runSimulation(in, a), s.power));
  }
  const auto rows = csvRows(comparisonCsv(reports));
  REQUIRE(rows.size() == 5);
  for (const auto& row : rows) CHECK(row.size() == rows[0].size());
  CHECK(rows[1][0] == "slamig");
  CHECK(rows[4][0] == "fptas");
}

TEST_CASE("same seed same bytes") {
  const auto s = parseScenario(support::fixture("wan.yaml"));
  auto once = [&] {
    auto in = buildInput(s);
    in.recordTrace = true;
    const auto r = runSimulation(in, Algorithm::Slamig);
    const auto m = computeMetrics(r, s.power);
    return summaryJson(s, m, false).dump() + tasksCsv(r) + traceJsonl(r);
  };
  CHECK(once() == once());
}

TEST_CASE("unwritable output") {
  const auto s = parseScenario(support::fixture("minimal.yaml"));
  const auto r = runSimulation(buildInput(s), Algorithm::Slamig);
  const auto file = scratch("blocker");
  std::ofstream(file) << "x";
  CHECK_THROWS(emitReport(file / "sub", s, computeMetrics(r, s.power), r, false, false));
  std::filesystem::remove(file);
}
