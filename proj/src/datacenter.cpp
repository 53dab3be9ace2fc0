#include "livemig/datacenter.hpp"

#include <algorithm>
#include <limits>

namespace livemig {

namespace {

constexpr double kByteGB = 1e9;

// Service allocation factor on a resource: 1 when undersubscribed.
double serviceFactor(SharingPolicy policy, double capacity, const LinkLoad& load, int migrationSubflows) {
  double demand = load.reserved;
  if (policy == SharingPolicy::Ratio) demand += migrationSubflows * capacity;
  return demand <= capacity ? 1.0 : capacity / demand;
}

}  // namespace

SharingPolicy parsePolicy(const std::string& name) {
  if (name == "free") return SharingPolicy::Free;
  if (name == "reserved") return SharingPolicy::Reserved;
  if (name == "ratio") return SharingPolicy::Ratio;
  throw std::invalid_argument("unknown sharing policy: " + name);
}

std::string toString(SharingPolicy policy) {
  switch (policy) {
    case SharingPolicy::Free: return "free";
    case SharingPolicy::Reserved: return "reserved";
    case SharingPolicy::Ratio: return "ratio";
  }
  return "ratio";
}

TopologyKind parseTopologyKind(const std::string& name) {
  if (name == "single") return TopologyKind::Single;
  if (name == "star-to-slave") return TopologyKind::StarToSlave;
  if (name == "sfc") return TopologyKind::Sfc;
  if (name == "wiki") return TopologyKind::Wiki;
  throw std::invalid_argument("unknown virtual topology kind: " + name);
}

std::string toString(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::Single: return "single";
    case TopologyKind::StarToSlave: return "star-to-slave";
    case TopologyKind::Sfc: return "sfc";
    case TopologyKind::Wiki: return "wiki";
  }
  return "single";
}

double migrationShare(SharingPolicy policy, double capacity, const LinkLoad& load, int migrationSubflows) {
  if (migrationSubflows <= 0) return capacity;
  switch (policy) {
    case SharingPolicy::Ratio: {
      const double demand = load.reserved + migrationSubflows * capacity;
      return demand <= capacity ? capacity : capacity * capacity / demand;
    }
    case SharingPolicy::Reserved:
      return std::max(0.0, capacity - load.reserved) / migrationSubflows;
    case SharingPolicy::Free: {
      const double throughput = serviceFactor(policy, capacity, load, 0) * load.activeReserved;
      return std::max(0.0, capacity - throughput) / migrationSubflows;
    }
  }
  return 0.0;
}

double serviceShare(SharingPolicy policy, double capacity, const LinkLoad& load, int migrationSubflows,
                    double reserved) {
  return reserved * serviceFactor(policy, capacity, load, migrationSubflows);
}

std::vector<double> shareBandwidth(SharingPolicy policy, double capacity, std::span<const LinkDemand> demands) {
  LinkLoad load;
  for (const auto& d : demands) {
    if (d.migration) {
      ++load.migrationFlows;
    } else {
      load.reserved += d.reserved;
      ++load.services;
      if (d.active) load.activeReserved += d.reserved;
    }
  }
  std::vector<double> out;
  out.reserve(demands.size());
  for (const auto& d : demands) {
    out.push_back(d.migration ? migrationShare(policy, capacity, load, load.migrationFlows)
                              : serviceShare(policy, capacity, load, load.migrationFlows, d.reserved));
  }
  return out;
}

std::map<std::string, Flavor> standardFlavors() {
  std::map<std::string, Flavor> f;
  auto add = [&](const std::string& name, double memGB, int cores, double diskGB) {
    f[name] = Flavor{name, memGB * kByteGB, cores, diskGB * kByteGB};
  };
  add("xlarge", 64, 12, 120);
  add("large", 16, 8, 60);
  add("medium", 8, 4, 20);
  add("small", 4, 2, 10);
  add("tiny", 2, 1, 2);
  add("micro", 1, 1, 1);
  add("lb", 8, 10, 8);
  add("ids", 8, 12, 8);
  add("fw", 8, 16, 8);
  add("web", 256, 8, 1000);
  add("app", 256, 4, 1000);
  add("db", 256, 12, 1000);
  return f;
}

const std::vector<ResourceId>& RouteCache::route(NodeId a, NodeId b) const {
  std::lock_guard lock(mutex_);
  auto key = std::make_pair(a, b);
  auto it = routes_.find(key);
  if (it != routes_.end()) return it->second;
  std::vector<ResourceId> res;
  if (a != b) {
    PathSet ps = kPaths(*topo_, a, b, 1);
    if (ps.empty()) {
      throw std::runtime_error("no route between " + topo_->node(a).name + " and " + topo_->node(b).name);
    }
    res = pathResources(*topo_, ps.paths.front());
  }
  return routes_.emplace(key, std::move(res)).first->second;
}

const PathSet& RouteCache::paths(NodeId a, NodeId b, int k) const {
  std::lock_guard lock(mutex_);
  auto key = std::make_tuple(a, b, k);
  auto it = paths_.find(key);
  if (it != paths_.end()) return it->second;
  return paths_.emplace(key, kPaths(*topo_, a, b, k)).first->second;
}

Datacenter::Datacenter(std::shared_ptr<const PhysicalTopology> topo, SharingPolicy policy)
    : topo_(std::move(topo)),
      routes_(std::make_shared<RouteCache>(topo_)),
      policy_(policy),
      hostUsage_(topo_->nodeCount()),
      loads_(topo_->resourceCount()) {}

int Datacenter::addTopology(const std::string& name, TopologyKind kind, std::optional<double> groupDeadline) {
  topologies_.push_back({name, kind, groupDeadline, {}, {}});
  return static_cast<int>(topologies_.size()) - 1;
}

InstanceId Datacenter::addInstance(int topology, const std::string& name, const Flavor& flavor, NodeId host,
                                   double dirtyRate, std::optional<double> mipo) {
  if (instanceByName_.count(name)) throw std::invalid_argument("duplicate instance name: " + name);
  if (!topo_->isHost(host)) throw std::invalid_argument("instance " + name + " placed on a non-host node");
  reserve(host, flavor);
  const auto id = static_cast<InstanceId>(instances_.size());
  instances_.push_back({name, flavor, dirtyRate, mipo, topology, host});
  instanceByName_[name] = id;
  incident_.emplace_back();
  topologies_.at(static_cast<std::size_t>(topology)).instances.push_back(id);
  return id;
}

VLinkId Datacenter::addVirtualLink(InstanceId src, InstanceId dst, double reserved) {
  if (src == dst) throw std::invalid_argument("virtual link endpoints must differ");
  if (!(reserved > 0.0)) throw std::invalid_argument("virtual link reservation must be positive");
  const auto id = static_cast<VLinkId>(vlinks_.size());
  vlinks_.push_back({src, dst, reserved});
  vlinkRoutes_.emplace_back();
  vlinkActive_.push_back(0);
  incident_.at(static_cast<std::size_t>(src)).push_back(id);
  incident_.at(static_cast<std::size_t>(dst)).push_back(id);
  const int topoId = instance(src).topology;
  if (topoId >= 0) topologies_.at(static_cast<std::size_t>(topoId)).links.push_back(id);
  routeLink(id);
  return id;
}

std::optional<InstanceId> Datacenter::findInstance(const std::string& name) const {
  auto it = instanceByName_.find(name);
  if (it == instanceByName_.end()) return std::nullopt;
  return it->second;
}

const HostUsage& Datacenter::hostUsage(NodeId host) const { return hostUsage_.at(static_cast<std::size_t>(host)); }

bool Datacenter::canHost(NodeId host, const Flavor& flavor) const {
  const auto& res = topo_->node(host).host;
  const auto& used = hostUsage(host);
  return used.cores + flavor.cores <= res.cores && used.ramBytes + flavor.memoryBytes <= res.ramBytes &&
         used.storageBytes + flavor.diskBytes <= res.storageBytes;
}

void Datacenter::reserve(NodeId host, const Flavor& flavor) {
  if (!canHost(host, flavor)) {
    throw CapacityError("host " + topo_->node(host).name + " cannot fit flavor " + flavor.name);
  }
  auto& used = hostUsage_[static_cast<std::size_t>(host)];
  used.cores += flavor.cores;
  used.ramBytes += flavor.memoryBytes;
  used.storageBytes += flavor.diskBytes;
  ++used.instances;
}

void Datacenter::release(NodeId host, const Flavor& flavor) {
  auto& used = hostUsage_[static_cast<std::size_t>(host)];
  used.cores -= flavor.cores;
  used.ramBytes -= flavor.memoryBytes;
  used.storageBytes -= flavor.diskBytes;
  --used.instances;
}

void Datacenter::commitPlacement(InstanceId id, NodeId newHost, bool reserved) {
  auto& inst = instances_.at(static_cast<std::size_t>(id));
  if (!topo_->isHost(newHost)) throw std::invalid_argument("commitPlacement: target is not a host");
  if (inst.host == newHost) return;
  if (!reserved) reserve(newHost, inst.flavor);
  release(inst.host, inst.flavor);
  inst.host = newHost;
  for (VLinkId l : incident_[static_cast<std::size_t>(id)]) routeLink(l);
}

void Datacenter::applyRoute(VLinkId id, int sign) {
  const double r = vlinks_[static_cast<std::size_t>(id)].reserved;
  const bool active = vlinkActive_[static_cast<std::size_t>(id)] > 0;
  for (ResourceId res : vlinkRoutes_[static_cast<std::size_t>(id)]) {
    auto& load = loads_[static_cast<std::size_t>(res)];
    load.reserved += sign * r;
    load.services += sign;
    if (active) load.activeReserved += sign * r;
    if (load.services == 0) {
      load.reserved = 0.0;
      load.activeReserved = 0.0;
    }
  }
}

void Datacenter::routeLink(VLinkId id) {
  applyRoute(id, -1);
  const auto& link = vlinks_[static_cast<std::size_t>(id)];
  vlinkRoutes_[static_cast<std::size_t>(id)] = routes_->route(instance(link.src).host, instance(link.dst).host);
  applyRoute(id, +1);
}

void Datacenter::setServiceActive(VLinkId id, bool active) {
  int& count = vlinkActive_.at(static_cast<std::size_t>(id));
  const bool before = count > 0;
  count += active ? 1 : -1;
  if (count < 0) throw std::logic_error("virtual link activity underflow");
  const bool after = count > 0;
  if (before == after) return;
  const double r = vlinks_[static_cast<std::size_t>(id)].reserved;
  for (ResourceId res : vlinkRoutes_[static_cast<std::size_t>(id)]) {
    auto& load = loads_[static_cast<std::size_t>(res)];
    load.activeReserved += after ? r : -r;
    if (load.activeReserved < 0.0) load.activeReserved = 0.0;
  }
}

int Datacenter::addMigrationFlow(std::vector<ResourceId> resources, bool pending) {
  const int id = nextFlowId_++;
  for (ResourceId r : resources) {
    auto& load = loads_.at(static_cast<std::size_t>(r));
    ++(pending ? load.pendingFlows : load.migrationFlows);
  }
  migFlows_[id] = MigFlow{std::move(resources), !pending};
  return id;
}

void Datacenter::setMigrationFlowState(int flowId, bool moving) {
  auto& flow = migFlows_.at(flowId);
  if (flow.moving == moving) return;
  for (ResourceId r : flow.resources) {
    auto& load = loads_[static_cast<std::size_t>(r)];
    if (moving) {
      --load.pendingFlows;
      ++load.migrationFlows;
    } else {
      --load.migrationFlows;
      ++load.pendingFlows;
    }
  }
  flow.moving = moving;
}

void Datacenter::removeMigrationFlow(int flowId) {
  auto it = migFlows_.find(flowId);
  if (it == migFlows_.end()) return;
  for (ResourceId r : it->second.resources) {
    auto& load = loads_[static_cast<std::size_t>(r)];
    --(it->second.moving ? load.migrationFlows : load.pendingFlows);
  }
  migFlows_.erase(it);
}

const std::vector<ResourceId>& Datacenter::migrationFlowResources(int flowId) const {
  return migFlows_.at(flowId).resources;
}

double Datacenter::vlinkRate(VLinkId id) const {
  const auto& route = vlinkRoutes_.at(static_cast<std::size_t>(id));
  const double r = vlinks_[static_cast<std::size_t>(id)].reserved;
  if (route.empty()) return std::numeric_limits<double>::infinity();
  double rate = std::numeric_limits<double>::infinity();
  for (ResourceId res : route) {
    const auto& load = loads_[static_cast<std::size_t>(res)];
    rate = std::min(rate, serviceShare(policy_, topo_->resourceCapacity(res), load, load.migrationFlows, r));
  }
  return rate;
}

double Datacenter::migrationFlowRate(int flowId) const {
  const auto& flow = migFlows_.at(flowId);
  if (!flow.moving) return 0.0;
  double rate = std::numeric_limits<double>::infinity();
  for (ResourceId res : flow.resources) {
    const auto& load = loads_[static_cast<std::size_t>(res)];
    rate = std::min(rate, migrationShare(policy_, topo_->resourceCapacity(res), load, load.migrationFlows));
  }
  return rate;
}

double Datacenter::probeMigrationRate(const PathSet& paths, int members,
                                      std::span<const std::vector<ResourceId>> extra) const {
  if (paths.empty()) return 0.0;
  std::vector<std::vector<ResourceId>> own;
  own.reserve(paths.paths.size());
  for (const auto& p : paths.paths) own.push_back(pathResources(*topo_, p));
  return probeMigrationRate(own, members, extra);
}

double Datacenter::probeMigrationRate(std::span<const std::vector<ResourceId>> own, int members,
                                      std::span<const std::vector<ResourceId>> extra) const {
  if (own.empty() || members <= 0) return 0.0;
  auto countOn = [&](ResourceId r) {
    int n = 0;
    for (const auto& res : own) n += static_cast<int>(std::binary_search(res.begin(), res.end(), r));
    n *= members;
    for (const auto& res : extra) n += static_cast<int>(std::count(res.begin(), res.end(), r));
    return n;
  };
  double total = 0.0;
  for (const auto& res : own) {
    double rate = std::numeric_limits<double>::infinity();
    for (ResourceId r : res) {
      const auto& load = loads_[static_cast<std::size_t>(r)];
      const int m = load.migrationFlows + load.pendingFlows + countOn(r);
      rate = std::min(rate, migrationShare(policy_, topo_->resourceCapacity(r), load, m));
    }
    if (rate == std::numeric_limits<double>::infinity()) rate = 0.0;
    total += rate;
  }
  return total;
}

double Datacenter::resourceHeadroom(ResourceId r) const {
  const auto& load = loads_.at(static_cast<std::size_t>(r));
  return migrationShare(policy_, topo_->resourceCapacity(r), load, load.migrationFlows + load.pendingFlows + 1);
}

double Datacenter::hostUtilization(NodeId host) const {
  const int cores = topo_->node(host).host.cores;
  return cores > 0 ? std::clamp(static_cast<double>(hostUsage(host).cores) / cores, 0.0, 1.0) : 0.0;
}

bool Datacenter::linkBusy(LinkId l) const {
  const auto& load = loads_[static_cast<std::size_t>(l)];
  return load.services > 0 || load.migrationFlows > 0;
}

int Datacenter::activePorts(NodeId sw) const {
  int ports = 0;
  for (LinkId l : topo_->outLinks(sw)) {
    if (linkBusy(l) || linkBusy(topo_->link(l).reverse)) ++ports;
  }
  return ports;
}

}  // namespace livemig
