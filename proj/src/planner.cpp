#include "livemig/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace livemig {

namespace {

constexpr double kRelTol = 1e-9;

double bounded(double t, double horizon) { return std::isfinite(t) ? t : 10.0 * horizon; }

// Unit time when every member moves at `bandwidth`.
double unitTimeAt(const MigrationTask& task, double bandwidth) {
  if (!(bandwidth > 0.0)) return std::numeric_limits<double>::infinity();
  double t = 0.0;
  for (const auto& m : task.members) t = std::max(t, estimateConstantRate(m.spec, bandwidth).totalTime);
  return t;
}

std::vector<std::vector<ResourceId>> unitResources(const MigrationTask& task, const PhysicalTopology& topo) {
  std::vector<std::vector<ResourceId>> out;
  for (const auto& p : task.paths.paths) out.push_back(pathResources(topo, p));
  return out;
}

std::vector<ResourceId> flatten(const std::vector<std::vector<ResourceId>>& lists) {
  std::vector<ResourceId> all;
  for (const auto& l : lists) all.insert(all.end(), l.begin(), l.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

bool intersects(const std::vector<ResourceId>& a, const std::vector<ResourceId>& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return true;
    if (*i < *j) ++i; else ++j;
  }
  return false;
}

struct UnitView {
  std::vector<std::vector<ResourceId>> perPath;
  std::vector<ResourceId> all;
  double alone = 0.0;
  int members = 1;
};

UnitView viewOf(const MigrationTask& t, const Datacenter& dc) {
  UnitView v;
  v.perPath = unitResources(t, dc.topology());
  v.all = flatten(v.perPath);
  v.members = static_cast<int>(t.members.size());
  v.alone = dc.probeMigrationRate(v.perPath, v.members, {});
  return v;
}

bool sharesInterface(const MigrationTask& j, const MigrationTask& k) {
  return j.source == k.source || j.destination == k.destination;
}

// u(P) is read as the rate the probe yields: j keeps what it would
// get alone (capped by its interfaces) despite k's subflows, and vice versa.
bool independentViews(const MigrationTask& j, const UnitView& vj, const MigrationTask& k, const UnitView& vk,
                      const Datacenter& dc) {
  if (j.paths.empty() || k.paths.empty()) return false;
  if (sharesInterface(j, k)) return false;
  if (!intersects(vj.all, vk.all)) return true;
  auto keeps = [&](const UnitView& a, const UnitView& b) {
    std::vector<std::vector<ResourceId>> extra;
    for (int m = 0; m < b.members; ++m) extra.insert(extra.end(), b.perPath.begin(), b.perPath.end());
    const double with = dc.probeMigrationRate(a.perPath, a.members, extra);
    return with >= a.alone * (1.0 - kRelTol);
  };
  return keeps(vj, vk) && keeps(vk, vj);
}

}  // namespace

void CostWeights::validate() const {
  if (alpha < 0 || beta < 0 || gamma < 0 || a < 0 || b < 0) {
    throw std::invalid_argument("cost weights must be non-negative");
  }
  if (std::abs(a + b - 1.0) > 1e-9) throw std::invalid_argument("impact weights a and b must sum to 1");
}

MigrationSpec instanceSpec(const Instance& inst, const MigrationSpec& defaults, std::optional<double> dirtyRate) {
  MigrationSpec s = defaults;
  s.memoryBits = inst.flavor.memoryBytes * 8.0;
  s.dirtyRate = dirtyRate.value_or(inst.dirtyRate);
  return s;
}

void estimateTask(MigrationTask& task, const PlanningContext& ctx) {
  const int members = static_cast<int>(task.members.size());
  task.bandwidth = ctx.dc.probeMigrationRate(task.paths, members);
  task.executionTime = 0.0;
  for (auto& m : task.members) {
    if (task.bandwidth > 0.0) {
      m.estimate = estimateConstantRate(m.spec, task.bandwidth);
      task.executionTime = std::max(task.executionTime, m.estimate.totalTime);
    } else {
      m.estimate = MigrationEstimate{};
      task.executionTime = std::numeric_limits<double>::infinity();
    }
  }
}

std::vector<MigrationTask> makeTasks(const std::vector<MigrationRequest>& requests, const PlanningContext& ctx) {
  std::vector<MigrationTask> tasks;
  tasks.reserve(requests.size());
  for (const auto& r : requests) {
    const auto& inst = ctx.dc.instance(r.instance);
    if (inst.host == r.destination) {
      throw std::invalid_argument("migration " + std::to_string(r.id) + " has identical source and destination");
    }
    MigrationTask t;
    t.id = r.id;
    t.source = inst.host;
    t.destination = r.destination;
    t.paths = ctx.dc.routes().paths(t.source, t.destination, ctx.config.pathsPerTask);
    t.paths.parallelCap = ctx.config.parallelCap;
    t.members.push_back({r.id, r.instance, instanceSpec(inst, ctx.defaults), {}});
    estimateTask(t, ctx);
    tasks.push_back(std::move(t));
  }
  std::sort(tasks.begin(), tasks.end(), [](const auto& x, const auto& y) { return x.id < y.id; });
  return tasks;
}

void assignDeadlines(std::vector<MigrationTask>& tasks, const std::vector<MigrationRequest>& requests,
                     const PlanningContext& ctx) {
  std::unordered_map<TaskId, const MigrationRequest*> byId;
  for (const auto& r : requests) byId[r.id] = &r;
  // Execution time of every migrating instance, grouped by virtual topology.
  std::unordered_map<int, std::vector<std::pair<InstanceId, double>>> byTopology;
  for (const auto& t : tasks) {
    for (const auto& m : t.members) {
      byTopology[ctx.dc.instance(m.instance).topology].emplace_back(m.instance, t.executionTime);
    }
  }
  for (auto& t : tasks) {
    double best = std::numeric_limits<double>::infinity();
    DeadlineSource source = DeadlineSource::None;
    bool infeasible = false;
    auto offer = [&](double d, DeadlineSource s, bool flagged) {
      if (d < best) {
        best = d;
        source = s;
        infeasible = flagged;
      }
    };
    for (const auto& m : t.members) {
      auto it = byId.find(m.request);
      if (it == byId.end()) continue;
      const auto& req = *it->second;
      if (req.deadline) offer(*req.deadline, DeadlineSource::Window, false);
      if (req.slo && req.slo->rate > 0.0) {
        const double window = (req.slo->threshold - req.slo->violations) / req.slo->rate;
        offer(ctx.now + std::max(0.0, window), DeadlineSource::Slo, window <= 0.0);
      }
      const auto& inst = ctx.dc.instance(m.instance);
      if (inst.topology < 0) continue;
      const auto& vt = ctx.dc.virtualTopologies().at(static_cast<std::size_t>(inst.topology));
      if (!vt.groupDeadline) continue;
      double others = 0.0;
      for (const auto& [iid, exe] : byTopology[inst.topology]) {
        if (iid != m.instance) others += bounded(exe, ctx.config.horizon);
      }
      const double window = *vt.groupDeadline - others;
      offer(ctx.now + std::max(0.0, window), DeadlineSource::Group, window <= 0.0);
    }
    t.deadline = best;
    t.deadlineSource = source;
    t.deadlineInfeasible = infeasible;
  }
}

std::vector<MigrationTask> preprocessParallel(std::vector<MigrationTask> tasks, const PlanningContext& ctx) {
  if (!ctx.config.mergeEnabled) return tasks;
  auto candidate = [&](const MigrationTask& t) {
    if (t.members.size() != 1 || t.paths.empty() || !(t.bandwidth > 0.0)) return false;
    const auto& s = t.members.front().spec;
    const double sigma = s.compression * s.dirtyRate / t.bandwidth;
    return s.memoryBits <= ctx.config.mergeMaxMemoryBits && sigma <= ctx.config.mergeMaxSigma;
  };
  std::vector<MigrationTask> out;
  std::vector<bool> used(tasks.size(), false);
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    MigrationTask unit = tasks[i];
    if (candidate(unit)) {
      double sequential = unit.executionTime;
      for (std::size_t j = i + 1; j < tasks.size(); ++j) {
        if (used[j] || !candidate(tasks[j])) continue;
        if (tasks[j].source != unit.source || tasks[j].destination != unit.destination) continue;
        const int m = static_cast<int>(unit.members.size()) + 1;
        if (unit.paths.parallelCap && m > *unit.paths.parallelCap) break;
        MigrationTask trial = unit;
        trial.members.push_back(tasks[j].members.front());
        estimateTask(trial, ctx);
        const double seq = sequential + tasks[j].executionTime;
        if (!(trial.executionTime < seq)) continue;
        const double finish = ctx.now + trial.executionTime;
        if (finish > unit.deadline || finish > tasks[j].deadline) continue;
        if (tasks[j].deadline < trial.deadline) {
          trial.deadline = tasks[j].deadline;
          trial.deadlineSource = tasks[j].deadlineSource;
        }
        trial.deadlineInfeasible = unit.deadlineInfeasible || tasks[j].deadlineInfeasible;
        unit = std::move(trial);
        sequential = seq;
        used[j] = true;
      }
    }
    out.push_back(std::move(unit));
  }
  return out;
}

bool isIndependent(const MigrationTask& j, const MigrationTask& k, const Datacenter& dc) {
  if (&j == &k) return false;
  return independentViews(j, viewOf(j, dc), k, viewOf(k, dc), dc);
}

void DependencyGraph::addEdge(std::size_t a, std::size_t b) {
  if (a == b) throw std::invalid_argument("dependency graph: self edge");
  if (adj_[a][b]) return;
  adj_[a][b] = adj_[b][a] = true;
  lists_[a].insert(std::upper_bound(lists_[a].begin(), lists_[a].end(), b), b);
  lists_[b].insert(std::upper_bound(lists_[b].begin(), lists_[b].end(), a), a);
}

std::size_t DependencyGraph::edgeCount() const {
  std::size_t n = 0;
  for (const auto& l : lists_) n += l.size();
  return n / 2;
}

DependencyGraph buildDependencyGraph(const std::vector<MigrationTask>& tasks, const Datacenter& dc) {
  DependencyGraph g(tasks.size());
  std::vector<UnitView> views;
  views.reserve(tasks.size());
  for (const auto& t : tasks) views.push_back(viewOf(t, dc));
  for (std::size_t j = 0; j < tasks.size(); ++j) {
    for (std::size_t k = j + 1; k < tasks.size(); ++k) {
      if (!independentViews(tasks[j], views[j], tasks[k], views[k], dc)) g.addEdge(j, k);
    }
  }
  return g;
}

CliqueSet completeDependencySubgraphs(const DependencyGraph& graph) {
  const std::size_t n = graph.size();
  std::vector<bool> visited(n, false);
  CliqueSet out;
  std::vector<std::size_t> clique;
  auto completeWith = [&](std::size_t cand) {
    return std::all_of(clique.begin(), clique.end(), [&](std::size_t m) { return graph.hasEdge(m, cand); });
  };
  auto expand = [&](auto&& self, std::size_t node) -> void {
    visited[node] = true;
    for (std::size_t k : graph.neighbors(node)) {
      if (!visited[k] && completeWith(k)) {
        clique.push_back(k);
        self(self, k);
      }
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (visited[i]) continue;
    clique = {i};
    expand(expand, i);
    std::sort(clique.begin(), clique.end());
    out.push_back(clique);
  }
  return out;
}

std::vector<CostBreakdown> scoreTasks(const std::vector<MigrationTask>& tasks, const DependencyGraph& graph,
                                      const PlanningContext& ctx) {
  const auto& w = ctx.weights;
  const double horizon = ctx.config.horizon;
  const auto& topo = ctx.dc.topology();
  const std::size_t n = tasks.size();

  std::vector<UnitView> views;
  views.reserve(n);
  for (const auto& t : tasks) views.push_back(viewOf(t, ctx.dc));
  std::unordered_map<ResourceId, std::vector<std::size_t>> tasksOn;
  for (std::size_t k = 0; k < n; ++k) {
    for (ResourceId r : views[k].all) tasksOn[r].push_back(k);
  }
  std::vector<double> exe(n);
  for (std::size_t k = 0; k < n; ++k) exe[k] = bounded(tasks[k].executionTime, horizon);

  std::vector<CostBreakdown> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    auto& c = out[j];
    c.migrationTime = exe[j];
    const double deadline = tasks[j].hasDeadline() ? tasks[j].deadline - ctx.now : horizon;
    c.slack = w.literalSlack ? c.migrationTime - deadline : deadline - c.migrationTime;

    // Placement after j completes: its instances sit on the destination and
    // their virtual links follow.
    Datacenter after = ctx.dc;
    std::vector<ResourceId> touched;
    bool moved = true;
    for (const auto& m : tasks[j].members) {
      for (VLinkId l : ctx.dc.incidentLinks(m.instance)) {
        const auto& r = ctx.dc.vlinkRoute(l);
        touched.insert(touched.end(), r.begin(), r.end());
      }
      try {
        after.commitPlacement(m.instance, tasks[j].destination);
      } catch (const CapacityError&) {
        moved = false;
      }
      for (VLinkId l : after.incidentLinks(m.instance)) {
        const auto& r = after.vlinkRoute(l);
        touched.insert(touched.end(), r.begin(), r.end());
      }
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());

    std::vector<std::size_t> affected;
    if (moved) {
      for (ResourceId r : touched) {
        auto it = tasksOn.find(r);
        if (it != tasksOn.end()) affected.insert(affected.end(), it->second.begin(), it->second.end());
      }
      std::sort(affected.begin(), affected.end());
      affected.erase(std::unique(affected.begin(), affected.end()), affected.end());
    }

    double deltaExe = 0.0;
    double potent = 0.0;
    for (std::size_t k : affected) {
      if (k == j) continue;
      const double bw = after.probeMigrationRate(views[k].perPath, views[k].members, {});
      deltaExe += bounded(unitTimeAt(tasks[k], bw), horizon) - exe[k];

      // Links of k's paths whose headroom grows.
      const double cs = topo.ifaceOut(tasks[k].source);
      const double cd = topo.ifaceIn(tasks[k].destination);
      for (const auto& p : tasks[k].paths.paths) {
        int raised = 0;
        double minRaised = std::numeric_limits<double>::infinity();
        for (LinkId l : p.links) {
          const double before = ctx.dc.resourceHeadroom(l);
          const double now = after.resourceHeadroom(l);
          if (now > before * (1.0 + kRelTol) + kRelTol) {
            ++raised;
            minRaised = std::min(minRaised, now);
          }
        }
        if (raised == 0 || p.hops() == 0) continue;
        const double bw2 = std::min({minRaised, cs, cd}) * static_cast<double>(tasks[k].paths.paths.size());
        const double frac = static_cast<double>(raised) / static_cast<double>(p.hops());
        potent += frac * (bounded(unitTimeAt(tasks[k], bw2 / views[k].members), horizon) - exe[k]);
      }
    }
    c.directImpact = 2.0 * deltaExe + static_cast<double>(graph.neighbors(j).size()) * exe[j];
    c.potentialImpact = potent;
    c.score = w.alpha * c.migrationTime + w.beta * c.slack + w.gamma * (w.a * c.directImpact + w.b * c.potentialImpact);
  }
  return out;
}

std::vector<MigrationGroup> concurrentGroups(const CliqueSet& cliques, const DependencyGraph& graph,
                                             const std::vector<double>& scores) {
  std::vector<std::size_t> order;
  for (const auto& c : cliques) order.insert(order.end(), c.begin(), c.end());
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (scores[x] != scores[y]) return scores[x] < scores[y];
    return x < y;
  });
  std::vector<MigrationGroup> groups;
  for (std::size_t j : order) {
    bool placed = false;
    for (auto& g : groups) {
      const bool free = std::none_of(g.tasks.begin(), g.tasks.end(), [&](std::size_t k) { return graph.hasEdge(j, k); });
      if (free) {
        g.tasks.push_back(j);
        g.cost += scores[j];
        placed = true;
        break;
      }
    }
    if (!placed) groups.push_back({{j}, scores[j]});
  }
  std::stable_sort(groups.begin(), groups.end(), [](const MigrationGroup& x, const MigrationGroup& y) {
    if (x.cost != y.cost) return x.cost < y.cost;
    return *std::min_element(x.tasks.begin(), x.tasks.end()) < *std::min_element(y.tasks.begin(), y.tasks.end());
  });
  return groups;
}

PlanResult plan(const std::vector<MigrationRequest>& requests, const PlanningContext& ctx) {
  ctx.weights.validate();
  PlanResult res;
  if (requests.empty()) return res;
  auto tasks = makeTasks(requests, ctx);
  assignDeadlines(tasks, requests, ctx);
  tasks = preprocessParallel(std::move(tasks), ctx);
  res.graph = buildDependencyGraph(tasks, ctx.dc);
  res.cliques = completeDependencySubgraphs(res.graph);
  res.costs = scoreTasks(tasks, res.graph, ctx);
  std::vector<double> scores;
  scores.reserve(res.costs.size());
  for (const auto& c : res.costs) scores.push_back(c.score);
  res.plan.groups = concurrentGroups(res.cliques, res.graph, scores);
  res.plan.units = std::move(tasks);
  return res;
}

PlanResult replan(const std::vector<MigrationRequest>& pending, const std::vector<MigrationRequest>& arrivals,
                  const PlanningContext& ctx) {
  std::vector<MigrationRequest> all = pending;
  all.insert(all.end(), arrivals.begin(), arrivals.end());
  return plan(all, ctx);
}

}  // namespace livemig
