#include "livemig/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "livemig/baselines.hpp"

namespace livemig {

Algorithm parseAlgorithm(const std::string& name) {
  if (name == "slamig") return Algorithm::Slamig;
  if (name == "onebyone") return Algorithm::OneByOne;
  if (name == "cqncr") return Algorithm::Cqncr;
  if (name == "fptas") return Algorithm::Fptas;
  if (name == "oracle") return Algorithm::Oracle;
  if (name == "imposed") return Algorithm::Imposed;
  throw std::invalid_argument("unknown algorithm: " + name);
}

std::string toString(Algorithm algo) {
  switch (algo) {
    case Algorithm::Slamig: return "slamig";
    case Algorithm::OneByOne: return "onebyone";
    case Algorithm::Cqncr: return "cqncr";
    case Algorithm::Fptas: return "fptas";
    case Algorithm::Oracle: return "oracle";
    case Algorithm::Imposed: return "imposed";
  }
  return "slamig";
}

std::string toString(EventKind kind) {
  switch (kind) {
    case EventKind::MigPre: return "MIG_PRE";
    case EventKind::MigStart: return "MIG_START";
    case EventKind::PacketComplete: return "PACKET_COMPLETE";
    case EventKind::SubflowComplete: return "SUBFLOW_COMPLETE";
    case EventKind::VmPause: return "VM_PAUSE";
    case EventKind::VmResume: return "VM_RESUME";
    case EventKind::MigPost: return "MIG_POST";
    case EventKind::MigScheduler: return "MIG_SCHEDULER";
    case EventKind::TaskArrival: return "TASK_ARRIVAL";
    case EventKind::GroupRelease: return "GROUP_RELEASE";
    case EventKind::RequestArrival: return "REQUEST_ARRIVAL";
    case EventKind::RequestStage: return "REQUEST_STAGE";
    case EventKind::HopComplete: return "HOP_COMPLETE";
  }
  return "?";
}

std::string toString(TaskStatus status) {
  switch (status) {
    case TaskStatus::Completed: return "completed";
    case TaskStatus::Failed: return "failed";
    case TaskStatus::Aborted: return "aborted";
  }
  return "failed";
}

PlanningContext planningContext(const SimulationInput& input, const Datacenter& dc, double now) {
  return PlanningContext{dc, input.defaults, input.weights, input.planner, now};
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Mode { Group, Sequential, Timed, RateMax };

int priorityOf(EventKind k) {
  switch (k) {
    case EventKind::MigScheduler:
    case EventKind::TaskArrival:
    case EventKind::GroupRelease:
      return 1;
    case EventKind::MigPre:
    case EventKind::MigStart:
    case EventKind::RequestArrival:
      return 2;
    default:
      return 0;
  }
}

struct Event {
  double time;
  int priority;
  std::uint64_t seq;
  EventKind kind;
  int a;
  std::uint64_t version;
};

struct Later {
  bool operator()(const Event& x, const Event& y) const {
    if (x.time != y.time) return x.time > y.time;
    if (x.priority != y.priority) return x.priority > y.priority;
    return x.seq > y.seq;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string num(double v) { return fmt("%.9g", v); }

struct Flow {
  bool migration = true;
  int owner = -1;       // member index or request index
  std::size_t hop = 0;  // request hops
  int dcFlow = -1;
  VLinkId vlink = -1;
  double remaining = 0.0;
  double rate = 0.0;
  double updated = 0.0;
  std::uint64_t version = 0;
  bool active = false;
  bool reschedule = false;
  bool logged = false;
};

struct Member {
  int unit = -1;
  TaskId request = 0;
  InstanceId inst = -1;
  MigrationSpec spec;
  double actualRate = 0.0;
  NodeId src = -1;
  NodeId dst = -1;
  std::vector<int> flows;
  int round = 0;
  bool stopRound = false;
  bool thresholdStop = false;
  double roundStart = 0.0;
  int pendingSubflows = 0;
  double transferred = 0.0;
  double stopCopy = 0.0;
  bool done = false;
};

enum class UnitState { Pending, Active, Done, Failed, Superseded };

struct Unit {
  MigrationTask task;
  UnitState state = UnitState::Pending;
  std::vector<int> members;
  int group = -1;
  int membersDone = 0;
  bool released = true;
};

struct RequestState {
  Request req;
  std::vector<InstanceId> chain;
  int step = -1;
};

class Engine {
 public:
  Engine(const SimulationInput& input, Algorithm algo, Mode mode)
      : in_(input), algo_(algo), mode_(mode), dc_(input.dc) {
    result_.algorithm = algo;
    result_.policy = dc_.policy();
    paused_.assign(dc_.instances().size(), false);
    waiting_.resize(dc_.instances().size());
  }

  SimulationResult run(const FixedPlan* fixed);

 private:
  // queue
  void push(double t, EventKind k, int a, std::uint64_t version = 0) {
    if (t < now_) t = now_;
    queue_.push({t, priorityOf(k), seq_++, k, a, version});
  }
  void trace(EventKind k, int task, std::string detail) {
    if (in_.recordTrace) result_.trace.push_back({now_, k, task, std::move(detail)});
  }

  // planning
  void admit(const std::vector<MigrationRequest>& batch, const FixedPlan* fixed);
  void addUnits(std::vector<MigrationTask> units, const std::vector<MigrationGroup>& groups, bool replaceGroups);
  std::vector<TaskId> pendingRequests() const;

  // scheduling
  void schedule();
  void scheduleGroups();
  void scheduleSequential();
  void scheduleTimed();
  void scheduleRateMax();
  bool interfacesFree(const Unit& u) const;
  bool hostFits(const Unit& u) const;
  bool feasible(const Unit& u) const;
  double probe(const Unit& u) const { return dc_.probeMigrationRate(u.task.paths, static_cast<int>(u.members.size())); }
  void startUnit(int idx);
  void failUnit(int idx, TaskStatus status, const std::string& reason);
  int activeUnits() const;

  // migration phases
  void onMigStart(int unit);
  void beginRound(int member, int round, double volume);
  void onSubflowComplete(int flowKey);
  void roundEnd(int member);
  void onResume(int member);
  void onPost(int member);

  // flows
  int addFlow(Flow f) {
    const int key = nextFlow_++;
    flows_.emplace(key, f);
    return key;
  }
  void reflow();
  int migrationsOn(const std::vector<ResourceId>& route) const;

  // workload
  void onRequestArrival(int ri);
  void doStep(int ri);
  void advance(int ri);
  void onHopComplete(int flowKey);

  void samplePower();

  const SimulationInput& in_;
  Algorithm algo_;
  Mode mode_;
  Datacenter dc_;
  SimulationResult result_;
  double now_ = 0.0;
  std::uint64_t seq_ = 0;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;

  std::vector<Unit> units_;
  std::vector<Member> members_;
  std::vector<MigrationGroup> groups_;  // indices into units_
  std::vector<TimedGroup> timed_;       // indices into units_
  std::size_t cursor_ = 0;
  std::vector<int> order_;              // sequential order
  std::map<int, Flow> flows_;
  int nextFlow_ = 0;
  std::set<ResourceId> heldIfaces_;
  std::vector<bool> paused_;
  std::vector<std::vector<int>> waiting_;
  std::vector<RequestState> requests_;
  std::map<TaskId, std::size_t> recordOf_;
  std::vector<std::vector<MigrationRequest>> batches_;
  std::map<TaskId, MigrationRequest> requestById_;
  double lastEvent_ = 0.0;
};

int Engine::activeUnits() const {
  int n = 0;
  for (const auto& u : units_) n += u.state == UnitState::Active;
  return n;
}

std::vector<TaskId> Engine::pendingRequests() const {
  std::vector<TaskId> ids;
  for (const auto& u : units_) {
    if (u.state != UnitState::Pending) continue;
    for (const auto& m : u.task.members) ids.push_back(m.request);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

void Engine::addUnits(std::vector<MigrationTask> units, const std::vector<MigrationGroup>& groups, bool replaceGroups) {
  const auto offset = units_.size();
  for (auto& t : units) {
    Unit u;
    u.task = std::move(t);
    for (const auto& m : u.task.members) {
      Member mem;
      mem.unit = static_cast<int>(units_.size());
      mem.request = m.request;
      mem.inst = m.instance;
      mem.spec = m.spec;
      mem.actualRate = requestById_.at(m.request).actualDirtyRate.value_or(m.spec.dirtyRate);
      mem.src = u.task.source;
      mem.dst = u.task.destination;
      u.members.push_back(static_cast<int>(members_.size()));
      members_.push_back(std::move(mem));
      result_.tasks[recordOf_.at(m.request)].unit = u.task.id;
    }
    units_.push_back(std::move(u));
  }
  if (replaceGroups) {
    groups_.clear();
    cursor_ = 0;
  }
  for (const auto& g : groups) {
    MigrationGroup mg;
    mg.cost = g.cost;
    for (std::size_t i : g.tasks) mg.tasks.push_back(offset + i);
    groups_.push_back(std::move(mg));
  }
}

void Engine::admit(const std::vector<MigrationRequest>& batch, const FixedPlan* fixed) {
  std::vector<MigrationRequest> fresh;
  for (const auto& r : batch) {
    auto& rec = result_.tasks[recordOf_.at(r.id)];
    if (dc_.instance(r.instance).host == r.destination) {
      rec.status = TaskStatus::Failed;
      rec.reason = "instance already on destination";
      continue;
    }
    trace(EventKind::TaskArrival, r.id, "instance=" + rec.instance);
    fresh.push_back(r);
  }
  if (fresh.empty() && !fixed) return;
  const auto ctx = planningContext(in_, dc_, now_);

  // Per-request deadlines for accounting, identical across algorithms.
  if (!fresh.empty()) {
    auto plain = makeTasks(fresh, ctx);
    assignDeadlines(plain, fresh, ctx);
    for (const auto& t : plain) {
      if (t.hasDeadline()) result_.tasks[recordOf_.at(t.id)].deadline = t.deadline;
    }
  }

  if (fixed) {
    auto units = fixed->units;
    addUnits(std::move(units), fixed->groups, true);
    return;
  }

  switch (mode_) {
    case Mode::Group: {
      if (algo_ == Algorithm::Imposed) {
        auto tasks = makeTasks(fresh, ctx);
        assignDeadlines(tasks, fresh, ctx);
        std::map<TaskId, std::size_t> at;
        for (std::size_t i = 0; i < tasks.size(); ++i) at[tasks[i].id] = i;
        std::vector<MigrationGroup> groups;
        std::set<TaskId> seen;
        for (const auto& g : in_.imposedOrder) {
          MigrationGroup mg;
          for (TaskId id : g) {
            auto it = at.find(id);
            if (it != at.end() && seen.insert(id).second) mg.tasks.push_back(it->second);
          }
          if (!mg.tasks.empty()) groups.push_back(std::move(mg));
        }
        for (std::size_t i = 0; i < tasks.size(); ++i) {
          if (!seen.count(tasks[i].id)) groups.push_back({{i}, 0.0});
        }
        addUnits(std::move(tasks), groups, false);
        break;
      }
      // Pending units are planned again together with the arrivals.
      std::vector<MigrationRequest> pending;
      for (TaskId id : pendingRequests()) pending.push_back(requestById_.at(id));
      for (auto& u : units_) {
        if (u.state == UnitState::Pending) u.state = UnitState::Superseded;
      }
      const auto t0 = std::chrono::steady_clock::now();
      auto res = replan(pending, fresh, ctx);
      result_.plannerRuntime += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      addUnits(std::move(res.plan.units), res.plan.groups, true);
      break;
    }
    case Mode::Sequential: {
      auto tasks = makeTasks(fresh, ctx);
      assignDeadlines(tasks, fresh, ctx);
      auto plan = oneByOne(std::move(tasks));
      const auto offset = units_.size();
      addUnits(std::move(plan.units), {}, false);
      for (const auto& g : plan.groups) order_.push_back(static_cast<int>(offset + g.tasks.front()));
      break;
    }
    case Mode::Timed: {
      auto tasks = makeTasks(fresh, ctx);
      assignDeadlines(tasks, fresh, ctx);
      double start = now_;
      for (const auto& g : timed_) start = std::max(start, g.start);
      // Later batches queue behind the predicted end of the existing plan.
      if (!timed_.empty()) {
        double lastEnd = 0.0;
        for (std::size_t i : timed_.back().tasks) lastEnd = std::max(lastEnd, units_[i].task.executionTime);
        start = std::max(now_, timed_.back().start + (std::isfinite(lastEnd) ? lastEnd : 0.0));
      }
      auto plan = groupedPredictive(std::move(tasks), dc_, start);
      const auto offset = units_.size();
      addUnits(std::move(plan.units), {}, false);
      for (auto& g : plan.groups) {
        TimedGroup tg;
        tg.start = g.start;
        for (std::size_t i : g.tasks) {
          tg.tasks.push_back(offset + i);
          units_[offset + i].released = false;
          units_[offset + i].group = static_cast<int>(timed_.size());
        }
        push(tg.start, EventKind::GroupRelease, static_cast<int>(timed_.size()));
        timed_.push_back(std::move(tg));
      }
      break;
    }
    case Mode::RateMax: {
      auto tasks = makeTasks(fresh, ctx);
      assignDeadlines(tasks, fresh, ctx);
      addUnits(std::move(tasks), {}, false);
      break;
    }
  }
}

bool Engine::interfacesFree(const Unit& u) const {
  const auto& topo = dc_.topology();
  return !heldIfaces_.count(topo.outIface(u.task.source)) && !heldIfaces_.count(topo.inIface(u.task.destination));
}

bool Engine::hostFits(const Unit& u) const {
  double ram = 0.0, disk = 0.0;
  int cores = 0;
  for (const auto& m : u.task.members) {
    const auto& f = dc_.instance(m.instance).flavor;
    ram += f.memoryBytes;
    disk += f.diskBytes;
    cores += f.cores;
  }
  return dc_.canHost(u.task.destination, Flavor{"", ram, cores, disk});
}

bool Engine::feasible(const Unit& u) const {
  if (u.task.paths.empty() || !interfacesFree(u) || !hostFits(u)) return false;
  double need = 0.0;
  for (int m : u.members) need = std::max(need, members_[m].spec.compression * members_[m].spec.dirtyRate);
  return probe(u) > need;
}

void Engine::failUnit(int idx, TaskStatus status, const std::string& reason) {
  auto& u = units_[idx];
  u.state = UnitState::Failed;
  for (int m : u.members) {
    auto& rec = result_.tasks[recordOf_.at(members_[m].request)];
    rec.status = status;
    rec.reason = reason;
  }
  trace(EventKind::MigScheduler, u.task.id, "failed: " + reason);
}

void Engine::startUnit(int idx) {
  auto& u = units_[idx];
  const auto& topo = dc_.topology();
  // Destination capacity may have changed since planning.
  if (!hostFits(u)) {
    failUnit(idx, TaskStatus::Aborted, "destination capacity");
    return;
  }
  u.state = UnitState::Active;
  heldIfaces_.insert(topo.outIface(u.task.source));
  heldIfaces_.insert(topo.inIface(u.task.destination));
  for (int mi : u.members) {
    auto& m = members_[mi];
    dc_.reserve(m.dst, dc_.instance(m.inst).flavor);
    for (const auto& p : u.task.paths.paths) {
      Flow f;
      f.migration = true;
      f.owner = mi;
      f.dcFlow = dc_.addMigrationFlow(pathResources(topo, p), true);
      f.updated = now_;
      m.flows.push_back(addFlow(f));
    }
    auto& rec = result_.tasks[recordOf_.at(m.request)];
    rec.start = now_;
    rec.group = u.group;
  }
  trace(EventKind::MigPre, u.task.id, "group=" + std::to_string(u.group) + " members=" + std::to_string(u.members.size()));
  push(now_ + members_[u.members.front()].spec.preTime, EventKind::MigStart, idx);
  result_.maxConcurrent = std::max(result_.maxConcurrent, activeUnits());
}

void Engine::schedule() {
  switch (mode_) {
    case Mode::Group: scheduleGroups(); break;
    case Mode::Sequential: scheduleSequential(); break;
    case Mode::Timed: scheduleTimed(); break;
    case Mode::RateMax: scheduleRateMax(); break;
  }
}

void Engine::scheduleGroups() {
  for (;;) {
    bool started = false;
    for (std::size_t g = 0; g < groups_.size() && g <= cursor_; ++g) {
      for (std::size_t i : groups_[g].tasks) {
        auto& u = units_[i];
        if (u.state != UnitState::Pending) continue;
        u.group = static_cast<int>(g);
        if (feasible(u)) {
          startUnit(static_cast<int>(i));
          started = true;
        }
      }
    }
    if (cursor_ + 1 < groups_.size()) {
      bool flag = false;
      for (std::size_t i : groups_[cursor_ + 1].tasks) {
        auto& u = units_[i];
        if (u.state != UnitState::Pending) continue;
        u.group = static_cast<int>(cursor_ + 1);
        if (feasible(u)) {
          startUnit(static_cast<int>(i));
          flag = true;
        }
      }
      if (flag) {
        ++cursor_;
        started = true;
      }
    }
    if (started || activeUnits() > 0) return;
    // Idle and nothing can start: what is reachable now will never run.
    bool any = false;
    for (std::size_t g = 0; g < groups_.size() && g <= cursor_ + 1; ++g) {
      for (std::size_t i : groups_[g].tasks) {
        if (units_[i].state == UnitState::Pending) {
          failUnit(static_cast<int>(i), TaskStatus::Failed, "unschedulable");
          any = true;
        }
      }
    }
    if (cursor_ + 1 < groups_.size()) {
      ++cursor_;
    } else if (!any) {
      return;
    }
    bool remaining = false;
    for (const auto& g : groups_) {
      for (std::size_t i : g.tasks) remaining = remaining || units_[i].state == UnitState::Pending;
    }
    if (!remaining) return;
  }
}

void Engine::scheduleSequential() {
  while (activeUnits() == 0) {
    bool started = false;
    for (int idx : order_) {
      auto& u = units_[idx];
      if (u.state != UnitState::Pending || !feasible(u)) continue;
      u.group = idx;
      startUnit(idx);
      started = true;
      break;
    }
    if (started) continue;
    // Nothing can run now and nothing running will change that.
    for (int idx : order_) {
      if (units_[idx].state == UnitState::Pending) failUnit(idx, TaskStatus::Failed, "unschedulable");
    }
    return;
  }
}

void Engine::scheduleTimed() {
  for (std::size_t i = 0; i < units_.size(); ++i) {
    auto& u = units_[i];
    if (u.state != UnitState::Pending || !u.released) continue;
    if (u.task.paths.empty()) {
      failUnit(static_cast<int>(i), TaskStatus::Failed, "no path");
      continue;
    }
    if (interfacesFree(u)) startUnit(static_cast<int>(i));
  }
}

void Engine::scheduleRateMax() {
  for (;;) {
    std::vector<const MigrationTask*> cands;
    std::vector<int> idx;
    for (std::size_t i = 0; i < units_.size(); ++i) {
      const auto& u = units_[i];
      if (u.state != UnitState::Pending || !interfacesFree(u) || !hostFits(u)) continue;
      cands.push_back(&u.task);
      idx.push_back(static_cast<int>(i));
    }
    const auto order = rateMaximizationOrder(cands, dc_);
    if (order.empty()) break;
    startUnit(idx[order.front()]);
  }
  if (activeUnits() > 0) return;
  for (std::size_t i = 0; i < units_.size(); ++i) {
    if (units_[i].state == UnitState::Pending) failUnit(static_cast<int>(i), TaskStatus::Failed, "unschedulable");
  }
}

void Engine::onMigStart(int unit) {
  auto& u = units_[unit];
  for (int mi : u.members) {
    for (int key : members_[mi].flows) {
      auto& f = flows_.at(key);
      dc_.setMigrationFlowState(f.dcFlow, true);
    }
  }
  trace(EventKind::MigStart, u.task.id, "");
  for (int mi : u.members) {
    const auto& s = members_[mi].spec;
    beginRound(mi, 0, s.compression * s.memoryBits);
  }
  reflow();
}

void Engine::beginRound(int mi, int round, double volume) {
  auto& m = members_[mi];
  std::vector<double> rates;
  double total = 0.0;
  for (int key : m.flows) {
    const double r = dc_.migrationFlowRate(flows_.at(key).dcFlow);
    rates.push_back(r);
    total += r;
  }
  const bool below = m.actualRate > 0.0 && volume <= m.spec.downtimeThreshold * total;
  const bool stop = below || round >= m.spec.maxRounds;
  m.thresholdStop = below;
  m.round = round;
  m.stopRound = stop;
  m.roundStart = now_;
  m.transferred += volume;
  if (stop) {
    paused_[m.inst] = true;
    trace(EventKind::VmPause, m.request, "round=" + std::to_string(round) + " volume=" + num(volume));
  }
  m.pendingSubflows = 0;
  for (std::size_t p = 0; p < m.flows.size(); ++p) {
    auto& f = flows_.at(m.flows[p]);
    const double bits = total > 0.0 ? volume * rates[p] / total : volume / static_cast<double>(m.flows.size());
    f.remaining = bits;
    f.updated = now_;
    f.reschedule = true;
    if (bits > 0.0) {
      f.active = true;
      ++m.pendingSubflows;
    } else {
      f.active = false;
      dc_.setMigrationFlowState(f.dcFlow, false);
    }
  }
  if (m.pendingSubflows == 0) roundEnd(mi);
}

void Engine::onSubflowComplete(int key) {
  auto& f = flows_.at(key);
  f.remaining = 0.0;
  f.active = false;
  dc_.setMigrationFlowState(f.dcFlow, false);
  auto& m = members_[f.owner];
  trace(EventKind::SubflowComplete, m.request, "round=" + std::to_string(m.round));
  if (--m.pendingSubflows == 0) roundEnd(f.owner);
  reflow();
}

void Engine::roundEnd(int mi) {
  auto& m = members_[mi];
  const double duration = now_ - m.roundStart;
  trace(EventKind::PacketComplete, m.request, "round=" + std::to_string(m.round) + " duration=" + num(duration));
  if (!m.stopRound && m.actualRate == 0.0) {
    // nothing was dirtied: pause with an empty stop-and-copy
    m.stopRound = true;
    m.thresholdStop = true;
    paused_[m.inst] = true;
    trace(EventKind::VmPause, m.request, "round=" + std::to_string(m.round) + " volume=0");
    m.stopCopy = 0.0;
  } else if (m.stopRound) {
    m.stopCopy = duration;
  }
  if (m.stopRound) {
    for (int key : m.flows) {
      dc_.removeMigrationFlow(flows_.at(key).dcFlow);
      flows_.erase(key);
    }
    m.flows.clear();
    push(now_ + m.spec.resumeTime, EventKind::VmResume, mi);
    push(now_ + m.spec.postTime, EventKind::MigPost, mi);
    if (mode_ == Mode::RateMax) push(now_, EventKind::MigScheduler, -1);
    return;
  }
  for (int key : m.flows) {
    auto& f = flows_.at(key);
    dc_.setMigrationFlowState(f.dcFlow, true);
  }
  const double next = m.spec.compression * duration * m.actualRate;
  beginRound(mi, m.round + 1, next);
}

void Engine::onResume(int mi) {
  auto& m = members_[mi];
  paused_[m.inst] = false;
  trace(EventKind::VmResume, m.request, "");
  auto waiting = std::move(waiting_[m.inst]);
  waiting_[m.inst].clear();
  for (int ri : waiting) doStep(ri);
}

void Engine::onPost(int mi) {
  auto& m = members_[mi];
  dc_.commitPlacement(m.inst, m.dst, true);
  m.done = true;
  auto& rec = result_.tasks[recordOf_.at(m.request)];
  rec.status = TaskStatus::Completed;
  rec.end = now_;
  rec.downtime = m.stopCopy + m.spec.resumeTime;
  rec.transferred = m.transferred;
  rec.rounds = m.round;
  rec.converged = m.thresholdStop;
  trace(EventKind::MigPost, m.request, "host=" + rec.destination);
  auto& u = units_[m.unit];
  if (++u.membersDone == static_cast<int>(u.members.size())) {
    const auto& topo = dc_.topology();
    heldIfaces_.erase(topo.outIface(u.task.source));
    heldIfaces_.erase(topo.inIface(u.task.destination));
    u.state = UnitState::Done;
    push(now_, EventKind::MigScheduler, -1);
  }
  reflow();
}

int Engine::migrationsOn(const std::vector<ResourceId>& route) const {
  int n = 0;
  for (ResourceId r : route) n = std::max(n, dc_.loads()[static_cast<std::size_t>(r)].migrationFlows);
  return n;
}

void Engine::reflow() {
  for (auto& [key, f] : flows_) {
    if (f.active && !f.reschedule) {
      f.remaining = std::max(0.0, f.remaining - f.rate * (now_ - f.updated));
    }
    f.updated = now_;
    if (!f.active) {
      f.rate = 0.0;
      f.reschedule = false;
      continue;
    }
    const double rate = f.migration ? dc_.migrationFlowRate(f.dcFlow) : dc_.vlinkRate(f.vlink);
    if (rate == f.rate && !f.reschedule) continue;
    f.rate = rate;
    f.reschedule = false;
    ++f.version;
    if (!f.migration) {
      result_.rateLog.push_back({now_, f.owner, f.hop, rate, migrationsOn(dc_.vlinkRoute(f.vlink))});
    }
    if (rate > 0.0) {
      const double dt = std::isfinite(rate) ? f.remaining / rate : 0.0;
      push(now_ + dt, f.migration ? EventKind::SubflowComplete : EventKind::HopComplete, key, f.version);
    }
  }
}

void Engine::onRequestArrival(int ri) {
  requests_[ri].step = 0;
  doStep(ri);
}

void Engine::doStep(int ri) {
  auto& rs = requests_[ri];
  const auto len = rs.chain.size();
  if (rs.step % 2 == 0) {
    const std::size_t k = static_cast<std::size_t>(rs.step / 2);
    const InstanceId inst = rs.chain[k];
    if (paused_[inst]) {
      waiting_[inst].push_back(ri);
      return;
    }
    const auto& instance = dc_.instance(inst);
    const double mips = instance.flavor.cores * dc_.topology().node(instance.host).host.mipsPerCore;
    double load = 0.0;
    if (k == 0) load = rs.req.senderLoad;
    else if (k + 1 == len) load = rs.req.receiverLoad;
    else load = instance.mipo.value_or(0.0);
    const double dt = mips > 0.0 ? load / mips : 0.0;
    push(now_ + dt, EventKind::RequestStage, ri);
    return;
  }
  const std::size_t h = static_cast<std::size_t>(rs.step / 2);
  const VLinkId vl = chainLink(dc_, rs.chain[h], rs.chain[h + 1]);
  auto& rec = result_.requests[ri];
  rec.hops.push_back({vl, now_, now_});
  if (!std::isfinite(dc_.vlinkRate(vl))) {
    result_.rateLog.push_back({now_, ri, h, kInf, 0});
    advance(ri);
    return;
  }
  Flow f;
  f.migration = false;
  f.owner = ri;
  f.hop = h;
  f.vlink = vl;
  f.remaining = rs.req.packetBits;
  f.updated = now_;
  f.active = true;
  f.reschedule = true;
  addFlow(f);
  dc_.setServiceActive(vl, true);
  reflow();
}

void Engine::advance(int ri) {
  auto& rs = requests_[ri];
  ++rs.step;
  if (static_cast<std::size_t>(rs.step) == 2 * rs.chain.size() - 1) {
    result_.requests[ri].completion = now_;
    return;
  }
  doStep(ri);
}

void Engine::onHopComplete(int key) {
  const Flow f = flows_.at(key);
  flows_.erase(key);
  dc_.setServiceActive(f.vlink, false);
  result_.requests[f.owner].hops.back().end = now_;
  reflow();
  advance(f.owner);
}

void Engine::samplePower() {
  PowerSample s;
  s.time = now_;
  const auto& topo = dc_.topology();
  for (NodeId h : topo.hosts()) {
    if (dc_.hostPoweredOn(h)) {
      ++s.hostsOn;
      s.utilizationSum += dc_.hostUtilization(h);
    }
  }
  for (NodeId sw : topo.switches()) {
    const int ports = dc_.activePorts(sw);
    if (ports > 0) {
      ++s.switchesOn;
      s.activePorts += ports;
    }
  }
  if (!result_.power.empty()) {
    const auto& last = result_.power.back();
    if (last.hostsOn == s.hostsOn && last.utilizationSum == s.utilizationSum && last.switchesOn == s.switchesOn &&
        last.activePorts == s.activePorts) {
      return;
    }
  }
  result_.power.push_back(s);
}

SimulationResult Engine::run(const FixedPlan* fixed) {
  const auto& topo = dc_.topology();
  // Records for every request, in id order.
  auto reqs = in_.requests;
  std::sort(reqs.begin(), reqs.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (const auto& r : reqs) {
    if (requestById_.count(r.id)) throw std::invalid_argument("duplicate migration id " + std::to_string(r.id));
    requestById_[r.id] = r;
    TaskRecord rec;
    rec.id = r.id;
    rec.instance = dc_.instance(r.instance).name;
    rec.source = topo.node(dc_.instance(r.instance).host).name;
    rec.destination = topo.node(r.destination).name;
    rec.arrival = r.arrival;
    recordOf_[r.id] = result_.tasks.size();
    result_.tasks.push_back(rec);
  }
  std::map<double, std::vector<MigrationRequest>> byTime;
  for (const auto& r : reqs) byTime[std::max(0.0, r.arrival)].push_back(r);
  for (auto& [t, batch] : byTime) {
    batches_.push_back(std::move(batch));
    push(t, EventKind::TaskArrival, static_cast<int>(batches_.size()) - 1);
  }
  if (fixed && byTime.size() > 1) throw std::invalid_argument("fixed plans require all requests at time 0");

  // Workload.
  for (std::size_t s = 0; s < in_.workloads.size(); ++s) {
    const auto& w = in_.workloads[s];
    for (std::size_t k = 0; k + 1 < w.chain.size(); ++k) chainLink(dc_, w.chain[k], w.chain[k + 1]);
    for (auto& r : generateRequests(w, static_cast<int>(s), in_.seed)) {
      RequestRecord rec;
      rec.stream = r.stream;
      rec.arrival = r.arrival;
      rec.packetBits = r.packetBits;
      result_.requests.push_back(rec);
      requests_.push_back({r, w.chain, -1});
      push(r.arrival, EventKind::RequestArrival, static_cast<int>(requests_.size()) - 1);
    }
  }

  samplePower();
  while (!queue_.empty()) {
    const Event ev = queue_.top();
    queue_.pop();
    if (ev.kind == EventKind::SubflowComplete || ev.kind == EventKind::HopComplete) {
      auto it = flows_.find(ev.a);
      if (it == flows_.end() || it->second.version != ev.version || !it->second.active) continue;
    }
    now_ = ev.time;
    lastEvent_ = now_;
    bool migrationEvent = true;
    switch (ev.kind) {
      case EventKind::TaskArrival:
        admit(batches_[static_cast<std::size_t>(ev.a)], fixed);
        schedule();
        break;
      case EventKind::MigScheduler:
        trace(EventKind::MigScheduler, -1, "group=" + std::to_string(cursor_));
        schedule();
        break;
      case EventKind::GroupRelease:
        for (std::size_t i : timed_[static_cast<std::size_t>(ev.a)].tasks) units_[i].released = true;
        trace(EventKind::GroupRelease, -1, "group=" + std::to_string(ev.a));
        schedule();
        break;
      case EventKind::MigStart: onMigStart(ev.a); break;
      case EventKind::SubflowComplete: onSubflowComplete(ev.a); break;
      case EventKind::VmResume: onResume(ev.a); break;
      case EventKind::MigPost: onPost(ev.a); break;
      case EventKind::RequestArrival:
        migrationEvent = false;
        onRequestArrival(ev.a);
        break;
      case EventKind::RequestStage:
        migrationEvent = false;
        advance(ev.a);
        break;
      case EventKind::HopComplete:
        migrationEvent = false;
        onHopComplete(ev.a);
        break;
      default: break;
    }
    if (migrationEvent) samplePower();
  }

  for (std::size_t i = 0; i < units_.size(); ++i) {
    if (units_[i].state == UnitState::Active) failUnit(static_cast<int>(i), TaskStatus::Failed, "stalled");
    if (units_[i].state == UnitState::Pending) failUnit(static_cast<int>(i), TaskStatus::Failed, "never started");
  }
  result_.endTime = std::max(in_.horizon, lastEvent_);
  result_.horizonEnd = result_.endTime;
  return std::move(result_);
}

}  // namespace

SimulationResult runSimulation(const SimulationInput& input, Algorithm algo) {
  switch (algo) {
    case Algorithm::Slamig:
    case Algorithm::Imposed:
      return Engine(input, algo, Mode::Group).run(nullptr);
    case Algorithm::OneByOne:
      return Engine(input, algo, Mode::Sequential).run(nullptr);
    case Algorithm::Cqncr:
      return Engine(input, algo, Mode::Timed).run(nullptr);
    case Algorithm::Fptas:
      return Engine(input, algo, Mode::RateMax).run(nullptr);
    case Algorithm::Oracle: {
      auto res = exhaustiveOptimal(input).result;
      res.algorithm = Algorithm::Oracle;
      return res;
    }
  }
  throw std::invalid_argument("unknown algorithm");
}

SimulationResult runPlan(const SimulationInput& input, const FixedPlan& plan) {
  return Engine(input, Algorithm::Imposed, Mode::Group).run(&plan);
}

}  // namespace livemig
