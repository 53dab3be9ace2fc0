#include "livemig/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace livemig {

MigrationPlan oneByOne(std::vector<MigrationTask> tasks) {
  std::sort(tasks.begin(), tasks.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  MigrationPlan plan;
  for (std::size_t i = 0; i < tasks.size(); ++i) plan.groups.push_back({{i}, 0.0});
  plan.units = std::move(tasks);
  return plan;
}

TimedPlan groupedPredictive(std::vector<MigrationTask> tasks, const Datacenter& dc, double now) {
  std::sort(tasks.begin(), tasks.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  std::vector<std::size_t> remaining(tasks.size());
  std::iota(remaining.begin(), remaining.end(), 0);
  std::stable_sort(remaining.begin(), remaining.end(), [&](std::size_t a, std::size_t b) {
    return tasks[a].executionTime < tasks[b].executionTime;
  });
  TimedPlan plan;
  double start = now;
  while (!remaining.empty()) {
    TimedGroup g;
    g.start = start;
    std::vector<std::size_t> rest;
    for (std::size_t i : remaining) {
      const bool ok = std::all_of(g.tasks.begin(), g.tasks.end(),
                                  [&](std::size_t k) { return isIndependent(tasks[i], tasks[k], dc); });
      (ok ? g.tasks : rest).push_back(i);
    }
    double longest = 0.0;
    for (std::size_t i : g.tasks) {
      if (std::isfinite(tasks[i].executionTime)) longest = std::max(longest, tasks[i].executionTime);
    }
    start += longest;
    plan.groups.push_back(std::move(g));
    remaining = std::move(rest);
  }
  plan.units = std::move(tasks);
  return plan;
}

std::vector<std::size_t> rateMaximizationOrder(const std::vector<const MigrationTask*>& pending, const Datacenter& dc) {
  std::vector<std::pair<double, std::size_t>> rated;
  for (std::size_t i = 0; i < pending.size(); ++i) {
    const double r = dc.probeMigrationRate(pending[i]->paths, static_cast<int>(pending[i]->members.size()));
    if (r > 0.0) rated.emplace_back(r, i);
  }
  std::stable_sort(rated.begin(), rated.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return pending[a.second]->id < pending[b.second]->id;
  });
  std::vector<std::size_t> out;
  for (const auto& [r, i] : rated) out.push_back(i);
  return out;
}

double totalMigrationTime(const SimulationResult& result) {
  double first = std::numeric_limits<double>::infinity();
  double last = -std::numeric_limits<double>::infinity();
  for (const auto& t : result.tasks) {
    if (t.status != TaskStatus::Completed) continue;
    first = std::min(first, t.start);
    last = std::max(last, t.end);
  }
  return last >= first ? last - first : 0.0;
}

namespace {

using Blocks = std::vector<std::vector<std::size_t>>;

// Every set partition of 0..n-1 whose blocks are edge-free in `graph`.
void partitions(std::size_t i, std::size_t n, const DependencyGraph& graph, Blocks& cur, std::vector<Blocks>& out) {
  if (i == n) {
    out.push_back(cur);
    return;
  }
  // indices, not references: the recursion appends to cur
  for (std::size_t b = 0; b < cur.size(); ++b) {
    if (std::any_of(cur[b].begin(), cur[b].end(), [&](std::size_t k) { return graph.hasEdge(i, k); })) continue;
    cur[b].push_back(i);
    partitions(i + 1, n, graph, cur, out);
    cur[b].pop_back();
  }
  cur.push_back({i});
  partitions(i + 1, n, graph, cur, out);
  cur.pop_back();
}

std::vector<FixedPlan> orderedPlans(const std::vector<MigrationTask>& units, const DependencyGraph& graph) {
  std::vector<Blocks> parts;
  Blocks cur;
  partitions(0, units.size(), graph, cur, parts);
  std::vector<FixedPlan> plans;
  for (auto& p : parts) {
    std::vector<std::size_t> perm(p.size());
    std::iota(perm.begin(), perm.end(), 0);
    do {
      FixedPlan fp;
      fp.units = units;
      for (std::size_t b : perm) fp.groups.push_back({p[b], 0.0});
      plans.push_back(std::move(fp));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return plans;
}

std::size_t failures(const SimulationResult& r) {
  return static_cast<std::size_t>(std::count_if(r.tasks.begin(), r.tasks.end(),
                                                [](const auto& t) { return t.status != TaskStatus::Completed; }));
}

}  // namespace

OracleResult exhaustiveOptimal(const SimulationInput& input) {
  if (input.requests.size() > kOracleMaxTasks) {
    throw std::invalid_argument("oracle accepts at most " + std::to_string(kOracleMaxTasks) + " migrations");
  }
  for (const auto& r : input.requests) {
    if (r.arrival > 0.0) throw std::invalid_argument("oracle requires every migration to arrive at time 0");
  }
  OracleResult best;
  if (input.requests.empty()) {
    best.result = runPlan(input, best.plan);
    return best;
  }

  const auto ctx = planningContext(input, input.dc, 0.0);
  auto merged = plan(input.requests, ctx);
  auto plain = makeTasks(input.requests, ctx);
  assignDeadlines(plain, input.requests, ctx);
  auto plainGraph = buildDependencyGraph(plain, input.dc);

  std::vector<FixedPlan> candidates = orderedPlans(plain, plainGraph);
  if (merged.plan.units.size() != plain.size()) {
    auto more = orderedPlans(merged.plan.units, merged.graph);
    candidates.insert(candidates.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
  }

  SimulationInput quiet = input;
  quiet.recordTrace = false;
  std::vector<std::pair<std::size_t, double>> scores(candidates.size());
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(8, std::thread::hardware_concurrency()));
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < candidates.size(); i += workers) {
        const auto r = runPlan(quiet, candidates[i]);
        scores[i] = {failures(r), totalMigrationTime(r)};
      }
    }));
  }
  for (auto& j : jobs) j.get();

  std::size_t pick = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if (scores[i] < scores[pick]) pick = i;
  }
  best.plan = candidates[pick];
  best.result = runPlan(input, best.plan);
  best.totalTime = totalMigrationTime(best.result);
  best.evaluated = candidates.size();
  return best;
}

}  // namespace livemig
