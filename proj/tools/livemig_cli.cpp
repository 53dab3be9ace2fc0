// livemig: run, compare and validate migration scenarios.

#include <cstdio>
#include <exception>
#include <fstream>
#include <future>
#include <iostream>

#include <CLI11.hpp>

#include "livemig/metrics.hpp"
#include "livemig/scenario.hpp"

namespace {

constexpr int kValidationFailure = 2;
constexpr int kSimulationFailure = 3;

struct Overrides {
  std::string policy;
  std::optional<std::uint64_t> seed;
};

livemig::Scenario load(const std::string& file, const Overrides& o) {
  auto doc = livemig::loadDocument(file);
  if (!o.policy.empty()) doc["policy"] = o.policy;
  if (o.seed) doc["seed"] = *o.seed;
  return livemig::scenarioFromJson(doc);
}

livemig::RunOutput execute(const livemig::Scenario& s, livemig::Algorithm algo, bool trace) {
  auto input = livemig::buildInput(s);
  input.recordTrace = trace;
  livemig::RunOutput out;
  out.algorithm = livemig::toString(algo);
  out.result = livemig::runSimulation(input, algo);
  out.report = livemig::computeMetrics(out.result, s.power);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Concurrent live migration planner and simulator"};
  app.require_subcommand(1);

  std::string scenarioFile, outDir, algo = "slamig";
  std::vector<std::string> algos{"slamig", "onebyone", "cqncr", "fptas"};
  Overrides overrides;
  bool trace = false, timing = false;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "simulate one algorithm");
  run->add_option("--scenario", scenarioFile, "scenario file (.json, .yaml)")->required()->check(CLI::ExistingFile);
  run->add_option("--algo", algo, "slamig|onebyone|cqncr|fptas|oracle|imposed");
  run->add_option("--policy", overrides.policy, "ratio|free|reserved (overrides the file)");
  auto* runSeed = run->add_option("--seed", seed, "random seed (overrides the file)");
  run->add_option("--out", outDir, "output directory")->required();
  run->add_flag("--trace", trace, "write trace.jsonl");
  run->add_flag("--timing", timing, "include planner wall-clock time in summary.json");

  auto* cmp = app.add_subcommand("compare", "simulate several algorithms and tabulate them");
  cmp->add_option("--scenario", scenarioFile, "scenario file")->required()->check(CLI::ExistingFile);
  cmp->add_option("--algos", algos, "algorithms to compare")->delimiter(',');
  cmp->add_option("--policy", overrides.policy, "ratio|free|reserved (overrides the file)");
  auto* cmpSeed = cmp->add_option("--seed", seed, "random seed (overrides the file)");
  cmp->add_option("--out", outDir, "output directory")->required();
  cmp->add_flag("--trace", trace, "write trace.jsonl per algorithm");
  cmp->add_flag("--timing", timing, "include planner wall-clock time");

  auto* val = app.add_subcommand("validate", "check a scenario and print it with defaults filled in");
  val->add_option("--scenario", scenarioFile, "scenario file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kValidationFailure;
  }
  if (runSeed->count() || cmpSeed->count()) overrides.seed = seed;

  livemig::Scenario scenario;
  std::vector<livemig::Algorithm> selected;
  try {
    scenario = load(scenarioFile, overrides);
    if (*val) {
      std::cout << livemig::scenarioToJson(scenario).dump(2) << '\n';
      return 0;
    }
    if (*run) selected.push_back(livemig::parseAlgorithm(algo));
    for (const auto& a : *cmp ? algos : std::vector<std::string>{}) selected.push_back(livemig::parseAlgorithm(a));
  } catch (const livemig::ScenarioError& e) {
    std::cerr << "invalid scenario: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const std::exception& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kValidationFailure;
  }

  try {
    if (*run) {
      const auto out = execute(scenario, selected.front(), trace);
      livemig::emitReport(outDir, scenario, out.report, out.result, trace, timing);
      return 0;
    }
    std::vector<std::future<livemig::RunOutput>> jobs;
    for (auto a : selected) jobs.push_back(std::async(std::launch::async, execute, std::cref(scenario), a, trace));
    std::vector<livemig::MetricsReport> reports;
    for (auto& j : jobs) {
      const auto out = j.get();
      livemig::emitReport(std::filesystem::path(outDir) / out.algorithm, scenario, out.report, out.result, trace,
                          timing);
      reports.push_back(out.report);
    }
    std::ofstream(std::filesystem::path(outDir) / "comparison.csv", std::ios::binary)
        << livemig::comparisonCsv(reports);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "simulation failed: " << e.what() << '\n';
    return kSimulationFailure;
  }
}
