// Acceptance checks: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>

#include "livemig/baselines.hpp"
#include "livemig/generator.hpp"
#include "livemig/metrics.hpp"
#include "livemig/scenario.hpp"

using namespace livemig;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

bool close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(LIVEMIG_FIXTURES) / name; }

// Plain per-round loop with a constant link.
struct RoundOracle {
  int n = 0;
  double memTime = 0.0;
  double downtime = 0.0;
  double transferred = 0.0;
};

RoundOracle roundOracle(const MigrationSpec& s, double L) {
  RoundOracle o;
  double v = s.compression * s.memoryBits;
  if (s.dirtyRate == 0.0) {
    o.memTime = v / L;
    o.transferred = v;
    o.downtime = s.resumeTime;
    return o;
  }
  for (int i = 0;; ++i) {
    o.transferred += v;
    o.memTime += v / L;
    if (v <= s.downtimeThreshold * L || i >= s.maxRounds) {
      o.n = i;
      o.downtime = v / L + s.resumeTime;
      return o;
    }
    v = s.compression * (v / L) * s.dirtyRate;
  }
}

MigrationSpec randomSpec(std::mt19937_64& rng, double L, double maxSigma) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MigrationSpec s;
  s.memoryBits = (0.5 + 255.5 * u(rng)) * 8e9;
  s.compression = 0.3 + 0.7 * u(rng);
  const double sigma = maxSigma * u(rng);
  s.dirtyRate = sigma * L / s.compression;
  s.downtimeThreshold = 0.05 + 1.95 * u(rng);
  s.maxRounds = 1 + static_cast<int>(u(rng) * 40);
  s.preTime = 2.0 * u(rng);
  s.postTime = 2.0 * u(rng);
  s.resumeTime = s.postTime * u(rng);
  return s;
}

Outcome closedFormVsOracle() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1);
  Outcome out;
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const double L = 1e8 + std::uniform_real_distribution<double>(0.0, 1e10)(rng);
    const auto spec = randomSpec(rng, L, 0.99);
    const auto e = estimateConstantRate(spec, L);
    const auto o = roundOracle(spec, L);
    if (e.rounds != o.n || !close(e.memCopyTime, o.memTime, 1e-9) || !close(e.downtime, o.downtime, 1e-9) ||
        !close(e.transferredData, o.transferred, 1e-9)) {
      ++bad;
    }
  }
  const double t = seconds(t0);
  out.pass = bad == 0 && t < 5.0;
  out.detail = fmt("%.0f mismatches in 1000 specs, %.3f s", bad, t);
  return out;
}

Outcome workedCase() {
  MigrationSpec s;
  s.memoryBits = 8e9;
  s.compression = 1.0;
  s.dirtyRate = 0.5e9;
  s.downtimeThreshold = 0.5;
  s.maxRounds = 30;
  const auto e = estimateConstantRate(s, 1e9);
  const auto o = roundOracle(s, 1e9);
  Outcome out;
  out.pass = e.rounds == 4 && o.n == 4 && close(e.memCopyTime, 15.5, 1e-12) && close(o.memTime, 15.5, 1e-12) &&
             close(e.transferredData, 15.5e9, 1e-12);
  out.detail = fmt("n=%.0f T_mem=%.9g transferred=%.9g", e.rounds, e.memCopyTime, e.transferredData);
  return out;
}

Outcome simulatorMatchesModel() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  int bad = 0;
  for (int i = 0; i < 100; ++i) {
    const double L = 10e9;
    auto spec = randomSpec(rng, L, 0.95);
    auto topo = std::make_shared<const PhysicalTopology>(buildFatTree(4, L, L, HostResources{}));
    SimulationInput in{Datacenter(topo, SharingPolicy::Ratio), {}, {}, {}, {}, {}, 1e6, 1, {}, false};
    const Flavor f{"probe", spec.memoryBits / 8.0, 1, 1e9};
    const int t = in.dc.addTopology("t", TopologyKind::Single, std::nullopt);
    const auto inst = in.dc.addInstance(t, "vm", f, topo->hosts()[0], spec.dirtyRate, std::nullopt);
    in.defaults = spec;
    MigrationRequest r;
    r.instance = inst;
    r.destination = topo->hosts()[4 + static_cast<std::size_t>(u(rng) * 12)];
    in.requests.push_back(r);
    const auto res = runSimulation(in, Algorithm::Slamig);
    const auto e = estimateConstantRate(spec, L);
    const auto& rec = res.tasks.at(0);
    const double err = std::max(std::abs(rec.executionTime() - e.totalTime), std::abs(rec.downtime - e.downtime));
    worst = std::max(worst, err);
    if (rec.status != TaskStatus::Completed || err > 1e-6) ++bad;
  }
  return {bad == 0, fmt("%.0f of 100 outside 1e-6 s, worst error %.3g s", bad, worst)};
}

Outcome motivationDirection() {
  auto doc = loadDocument(fixture("motivation.yaml"));
  auto runOrder = [&](const nlohmann::json& order) {
    doc["order"] = order;
    const auto s = scenarioFromJson(doc);
    const auto res = runSimulation(buildInput(s), Algorithm::Imposed);
    return computeMetrics(res, s.power);
  };
  const auto s1 = runOrder(nlohmann::json::parse("[[0,1,2],[3],[4,5,6,7]]"));
  const auto s2 = runOrder(nlohmann::json::parse("[[3,2],[0,4],[5],[6],[7],[1]]"));
  const double gap = 1.0 - s1.totalMigrationTime / s2.totalMigrationTime;
  Outcome out;
  out.pass = s1.failed == 0 && s2.failed == 0 && s1.totalMigrationTime < s2.totalMigrationTime && gap >= 0.15 &&
             s1.avgDowntime <= s2.avgDowntime;
  out.detail = fmt("S1 %.3f s vs S2 %.3f s (gap %.1f%%)", s1.totalMigrationTime, s2.totalMigrationTime, gap * 100) +
               fmt(", avg downtime S1 %.6f s vs S2 %.6f s", s1.avgDowntime, s2.avgDowntime);
  return out;
}

GeneratorOptions propertyOptions(std::mt19937_64& rng, int minTasks, int maxTasks) {
  GeneratorOptions o;
  o.tasks = std::uniform_int_distribution<int>(minTasks, maxTasks)(rng);
  o.hostPool = std::uniform_int_distribution<int>(4, 16)(rng);
  o.vlinkProbability = 0.4;
  o.deadlineProbability = 0.3;
  return o;
}

Outcome planValidity() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(5);
  int bad = 0;
  std::string first;
  for (int i = 0; i < 200; ++i) {
    const auto in = randomScenario(1000 + i, propertyOptions(rng, 5, 100));
    const auto ctx = planningContext(in, in.dc);
    const auto pr = plan(in.requests, ctx);
    std::vector<int> seen(pr.plan.units.size(), 0);
    bool ok = true;
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& g : pr.plan.groups) {
      for (std::size_t a : g.tasks) {
        ++seen.at(a);
        for (std::size_t b : g.tasks) ok = ok && (a == b || !pr.graph.hasEdge(a, b));
      }
      ok = ok && g.cost >= prev;
      prev = g.cost;
    }
    ok = ok && std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; });
    std::multiset<TaskId> members;
    for (const auto& u : pr.plan.units) {
      for (const auto& m : u.members) members.insert(m.request);
    }
    std::multiset<TaskId> requested;
    for (const auto& r : in.requests) requested.insert(r.id);
    ok = ok && members == requested;
    if (!ok) {
      ++bad;
      if (first.empty()) first = " first failure at seed " + std::to_string(1000 + i);
    }
  }
  const double t = seconds(t0);
  return {bad == 0 && t < 60.0, fmt("%.0f invalid plans of 200, %.2f s", bad, t) + first};
}

bool hasIndependentPair(const SimulationInput& in) {
  const auto ctx = planningContext(in, in.dc);
  auto tasks = makeTasks(in.requests, ctx);
  const auto g = buildDependencyGraph(tasks, in.dc);
  for (std::size_t a = 0; a < tasks.size(); ++a) {
    for (std::size_t b = a + 1; b < tasks.size(); ++b) {
      if (!g.hasEdge(a, b)) return true;
    }
  }
  return false;
}

constexpr double kTol = 1e-9;

Outcome oracleDominance() {
  std::mt19937_64 rng(6);
  int bad = 0;
  std::string first;
  for (int i = 0; i < 50; ++i) {
    const auto in = randomScenario(2000 + i, propertyOptions(rng, 2, 5));
    const double oracle = totalMigrationTime(exhaustiveOptimal(in).result);
    const double slamig = totalMigrationTime(runSimulation(in, Algorithm::Slamig));
    const double seq = totalMigrationTime(runSimulation(in, Algorithm::OneByOne));
    if (!(oracle <= slamig * (1 + kTol) && slamig <= seq * (1 + kTol))) {
      ++bad;
      if (first.empty()) {
        first = " first at seed " + std::to_string(2000 + i) + fmt(": %.4f / %.4f / %.4f", oracle, slamig, seq);
      }
    }
  }
  return {bad == 0, fmt("%.0f of 50 scenarios violate oracle <= slamig <= onebyone", bad) + first};
}

Outcome improvement() {
  std::mt19937_64 rng(7);
  int bad = 0, withPair = 0;
  std::string first;
  for (int i = 0; i < 200; ++i) {
    const auto in = randomScenario(3000 + i, propertyOptions(rng, 2, 12));
    const bool pair = hasIndependentPair(in);
    withPair += pair;
    const double slamig = totalMigrationTime(runSimulation(in, Algorithm::Slamig));
    const double seq = totalMigrationTime(runSimulation(in, Algorithm::OneByOne));
    const bool ok = pair ? slamig < seq * (1 - kTol) : slamig <= seq * (1 + kTol);
    if (!ok) {
      ++bad;
      if (first.empty()) first = " first at seed " + std::to_string(3000 + i) + fmt(": %.4f vs %.4f", slamig, seq);
    }
  }
  return {bad == 0, fmt("%.0f of 200 scenarios violate (%.0f had an independent pair)", bad, withPair) + first};
}

Outcome starvation() {
  const auto s = parseScenario(fixture("starvation.yaml"));
  const auto in = buildInput(s);
  const auto fp = runSimulation(in, Algorithm::Fptas);
  const auto sl = runSimulation(in, Algorithm::Slamig);
  const auto& b1 = fp.tasks.at(1);
  const auto& b2 = sl.tasks.at(1);
  const bool fptasStarved = b1.status == TaskStatus::Completed && b1.rounds == s.model.maxRounds && !b1.converged &&
                            b1.downtime - s.model.resumeTime > s.model.downtimeThreshold;
  const bool slamigOk = b2.status == TaskStatus::Completed && b2.converged && b2.start > 0.0 &&
                        b2.downtime - s.model.resumeTime <= s.model.downtimeThreshold;
  return {fptasStarved && slamigOk,
          fmt("fptas: %.0f rounds, downtime %.3f s; ", b1.rounds, b1.downtime) +
              fmt("slamig: deferred to %.3f s, %.0f rounds, downtime %.3f s", b2.start, b2.rounds, b2.downtime)};
}

Outcome deadlines() {
  const auto s = parseScenario(fixture("deadline.yaml"));
  const auto in = buildInput(s);
  const auto seq = computeMetrics(runSimulation(in, Algorithm::OneByOne), s.power);
  const auto sl = computeMetrics(runSimulation(in, Algorithm::Slamig), s.power);
  return {s.migrations.size() == 3 && seq.deadlineMisses >= 1 && sl.deadlineMisses == 0,
          fmt("onebyone misses %.0f, slamig misses %.0f", seq.deadlineMisses, sl.deadlineMisses)};
}

Outcome determinism() {
  int runs = 0, bad = 0;
  for (const char* f : {"minimal.yaml", "motivation.yaml", "starvation.yaml", "deadline.yaml", "wan.yaml"}) {
    const auto s = parseScenario(fixture(f));
    for (auto a : {Algorithm::Slamig, Algorithm::OneByOne, Algorithm::Cqncr, Algorithm::Fptas, Algorithm::Oracle,
                   Algorithm::Imposed}) {
      if (a == Algorithm::Oracle && s.migrations.size() > kOracleMaxTasks) continue;
      auto emit = [&] {
        auto in = buildInput(s);
        in.recordTrace = true;
        const auto res = runSimulation(in, a);
        return summaryJson(s, computeMetrics(res, s.power), false).dump(2) + tasksCsv(res) + traceJsonl(res);
      };
      ++runs;
      if (emit() != emit()) ++bad;
    }
  }
  return {bad == 0, fmt("%.0f of %.0f fixture runs differ between repeats", bad, runs)};
}

Outcome scaling() {
  auto timePlan = [](int n) {
    GeneratorOptions o;
    o.pods = 8;
    o.tasks = n;
    o.vlinkProbability = 0.3;
    const auto in = randomScenario(4000 + n, o);
    double best = std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < (n <= 200 ? 3 : 1); ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto pr = plan(in.requests, planningContext(in, in.dc));
      best = std::min(best, seconds(t0));
      if (pr.plan.units.empty()) return -1.0;
    }
    return best;
  };
  const double t100 = timePlan(100);
  const double t1000 = timePlan(1000);
  const double slope = std::log(t1000 / t100) / std::log(10.0);
  return {t1000 > 0 && t1000 < 60.0 && slope <= 2.3,
          fmt("100 tasks %.3f s, 1000 tasks %.3f s, log-log slope %.2f", t100, t1000, slope)};
}

// Replays each hop against the logged piecewise-constant rates.
bool hopsMatchLog(const SimulationResult& r, double& worst) {
  std::map<std::pair<int, std::size_t>, std::vector<std::pair<double, double>>> log;
  for (const auto& c : r.rateLog) log[{c.request, c.hop}].emplace_back(c.time, c.rate);
  bool ok = true;
  for (std::size_t i = 0; i < r.requests.size(); ++i) {
    const auto& req = r.requests[i];
    if (req.completion < 0) continue;
    for (std::size_t h = 0; h < req.hops.size(); ++h) {
      const auto& hop = req.hops[h];
      const auto& steps = log[{static_cast<int>(i), h}];
      double t = hop.start, left = req.packetBits;
      double predicted = hop.start;
      for (std::size_t k = 0; k < steps.size() && left > 0; ++k) {
        if (steps[k].first < hop.start - 1e-12) continue;
        const double rate = steps[k].second;
        if (std::isinf(rate)) {
          predicted = t;
          left = 0;
          break;
        }
        const double until = k + 1 < steps.size() ? steps[k + 1].first : std::numeric_limits<double>::infinity();
        if (rate > 0 && t + left / rate <= until) {
          predicted = t + left / rate;
          left = 0;
          break;
        }
        left -= rate * (until - t);
        t = until;
      }
      const double err = std::abs(predicted - hop.end);
      worst = std::max(worst, err);
      ok = ok && left <= 0 && err <= 1e-6;
    }
  }
  return ok;
}

// Expected ratio-policy rate of a hop: its reservation scaled on the busiest link.
bool ratesFollowFormula(const SimulationResult& r, const SimulationInput& in, double& worst) {
  const auto& topo = in.dc.topology();
  bool ok = true;
  for (const auto& c : r.rateLog) {
    if (std::isinf(c.rate)) continue;
    const auto& req = r.requests.at(static_cast<std::size_t>(c.request));
    const auto vl = req.hops.at(c.hop).vlink;
    const double reserved = in.dc.virtualLinks().at(static_cast<std::size_t>(vl)).reserved;
    // Single service path on a single capacity: see the qos fixture built below.
    const double cap = topo.resourceCapacity(in.dc.vlinkRoute(vl).front());
    const double demand = reserved + c.migrationsOnPath * cap;
    const double expected = reserved * (demand <= cap ? 1.0 : cap / demand);
    worst = std::max(worst, std::abs(expected - c.rate) / reserved);
    ok = ok && std::abs(expected - c.rate) <= 1e-9 * reserved;
  }
  return ok;
}

SimulationInput qosInput(SharingPolicy policy, bool migrations) {
  // Service s0 -> s1 between two racks; migrations cross the same core link.
  auto topo = std::make_shared<PhysicalTopology>();
  const HostResources res;
  const double c = 10e9;
  std::vector<NodeId> h;
  for (int i = 0; i < 6; ++i) h.push_back(topo->addHost("H" + std::to_string(i), res, c));
  const auto a = topo->addSwitch("A"), b = topo->addSwitch("B");
  for (int i = 0; i < 3; ++i) topo->connect(h[i], a, c);
  for (int i = 3; i < 6; ++i) topo->connect(h[i], b, c);
  topo->connect(a, b, c);
  SimulationInput in{Datacenter(std::shared_ptr<const PhysicalTopology>(topo), policy), {}, {}, {}, {}, {}, 200.0, 9,
                     {}, false};
  const auto flavors = standardFlavors();
  const int vt = in.dc.addTopology("svc", TopologyKind::Sfc, std::nullopt);
  const auto s0 = in.dc.addInstance(vt, "s0", flavors.at("small"), h[0], 50e6, std::nullopt);
  const auto s1 = in.dc.addInstance(vt, "s1", flavors.at("small"), h[3], 50e6, std::nullopt);
  in.dc.addVirtualLink(s0, s1, 2e9);
  const int mt = in.dc.addTopology("movers", TopologyKind::Single, std::nullopt);
  for (int i = 0; i < 2; ++i) {
    const auto m = in.dc.addInstance(mt, "m" + std::to_string(i), flavors.at("large"), h[1 + i], 300e6, std::nullopt);
    if (migrations) {
      MigrationRequest r;
      r.id = i;
      r.instance = m;
      r.destination = h[4 + i];
      r.arrival = 5.0 + 20.0 * i;
      in.requests.push_back(r);
    }
  }
  WorkloadStream w;
  w.chain = {s0, s1};
  w.rate = 10;
  w.packetBits = 20e6;
  w.start = 0;
  w.end = 120;
  in.workloads.push_back(w);
  return in;
}

Outcome qosInvariant() {
  std::string detail;
  bool pass = true;
  for (auto policy : {SharingPolicy::Free, SharingPolicy::Reserved}) {
    const auto with = runSimulation(qosInput(policy, true), Algorithm::Slamig);
    const auto without = runSimulation(qosInput(policy, false), Algorithm::Slamig);
    std::size_t differ = 0;
    const bool sameCount = with.requests.size() == without.requests.size();
    for (std::size_t i = 0; sameCount && i < with.requests.size(); ++i) {
      const auto& x = with.requests[i];
      const auto& y = without.requests[i];
      if (x.completion < 0 || y.completion < 0 || x.transmissionTime() != y.transmissionTime()) ++differ;
    }
    const bool migrated = std::all_of(with.tasks.begin(), with.tasks.end(),
                                      [](const auto& t) { return t.status == TaskStatus::Completed; });
    pass = pass && sameCount && differ == 0 && migrated && !with.requests.empty();
    detail += toString(policy) + fmt(": %.0f of %.0f requests differ; ", differ, with.requests.size());
  }
  const auto in = qosInput(SharingPolicy::Ratio, true);
  const auto ratio = runSimulation(in, Algorithm::Slamig);
  const auto base = runSimulation(qosInput(SharingPolicy::Ratio, false), Algorithm::Slamig);
  double worstHop = 0, worstRate = 0;
  const bool hops = hopsMatchLog(ratio, worstHop);
  const bool rates = ratesFollowFormula(ratio, in, worstRate);
  const bool degraded = computeMetrics(ratio, PowerModel{}).avgTransmissionTime.value_or(0) >
                        computeMetrics(base, PowerModel{}).avgTransmissionTime.value_or(0);
  pass = pass && hops && rates && degraded;
  detail += fmt("ratio: hop replay error %.3g s, rate error %.3g (relative), slower with migrations: ", worstHop,
                worstRate) +
            (degraded ? "yes" : "no");
  return {pass, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> checks{
      {"closed-form estimate matches per-round oracle", closedFormVsOracle},
      {"worked model case n=4, T_mem=15.5 s", workedCase},
      {"single idle migration matches the analytic model", simulatorMatchesModel},
      {"motivation example: S1 beats S2", motivationDirection},
      {"plan validity on random scenarios", planValidity},
      {"oracle <= slamig <= onebyone", oracleDominance},
      {"slamig improves on onebyone", improvement},
      {"starvation under rate maximization", starvation},
      {"deadline awareness", deadlines},
      {"determinism of reports and traces", determinism},
      {"planner scaling", scaling},
      {"service transmission under sharing policies", qosInvariant},
  };
  int failed = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    Outcome o;
    try {
      o = checks[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %2zu %s  %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", checks[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
