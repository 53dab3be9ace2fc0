// Data-center state: physical topology plus virtual topologies (instances
// and reserved virtual links), instance placement, host resource usage and
// per-resource flow aggregates.  Rates follow one of three sharing policies:
//
//   free      migrations get what the service traffic currently in flight leaves
//   reserved  migrations get capacity minus all service reservations
//   ratio     every flow gets c * demand / total demand once the resource is
//             oversubscribed; a migration subflow demands the full capacity
//
// A flow's rate is the minimum of its per-resource shares along its route.

#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "livemig/topology.hpp"

namespace livemig {

enum class SharingPolicy { Free, Reserved, Ratio };

SharingPolicy parsePolicy(const std::string& name);  // throws std::invalid_argument
std::string toString(SharingPolicy policy);

struct LinkDemand {
  int flowId = 0;
  double reserved = 0.0;  // ignored for migrations
  bool migration = false;
  bool active = true;     // service traffic currently in flight (free policy)
};

// Allocation for every demand on a single resource of the given capacity.
std::vector<double> shareBandwidth(SharingPolicy policy, double capacity, std::span<const LinkDemand> demands);

// Aggregates kept per resource.
struct LinkLoad {
  double reserved = 0.0;        // sum of service reservations routed here
  double activeReserved = 0.0;  // part of `reserved` with requests in flight
  int services = 0;             // virtual links routed here
  int migrationFlows = 0;       // migration subflows currently moving data
  int pendingFlows = 0;         // subflows of started migrations not yet moving data
};

double migrationShare(SharingPolicy policy, double capacity, const LinkLoad& load, int migrationSubflows);
double serviceShare(SharingPolicy policy, double capacity, const LinkLoad& load, int migrationSubflows,
                    double reserved);

struct Flavor {
  std::string name;
  double memoryBytes = 0.0;
  int cores = 0;
  double diskBytes = 0.0;
};

// Flavors xlarge..micro and the VNF/server types.
std::map<std::string, Flavor> standardFlavors();

enum class TopologyKind { Single, StarToSlave, Sfc, Wiki };
TopologyKind parseTopologyKind(const std::string& name);
std::string toString(TopologyKind kind);

using InstanceId = std::int32_t;
using VLinkId = std::int32_t;

struct Instance {
  std::string name;
  Flavor flavor;
  double dirtyRate = 0.0;       // bits/s
  std::optional<double> mipo;   // VNFs only
  int topology = -1;
  NodeId host = -1;
};

struct VirtualLink {
  InstanceId src;
  InstanceId dst;
  double reserved;  // bits/s
};

struct VirtualTopology {
  std::string name;
  TopologyKind kind = TopologyKind::Single;
  std::optional<double> groupDeadline;
  std::vector<InstanceId> instances;
  std::vector<VLinkId> links;
};

class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct HostUsage {
  int cores = 0;
  double ramBytes = 0.0;
  double storageBytes = 0.0;
  int instances = 0;  // placed or reserved
};

// Shortest-path cache keyed by host pair.  Safe to share across threads.
class RouteCache {
 public:
  explicit RouteCache(std::shared_ptr<const PhysicalTopology> topo) : topo_(std::move(topo)) {}
  // Resources of the lexicographically smallest shortest path; empty when a == b.
  const std::vector<ResourceId>& route(NodeId a, NodeId b) const;
  const PathSet& paths(NodeId a, NodeId b, int k) const;

 private:
  std::shared_ptr<const PhysicalTopology> topo_;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<NodeId, NodeId>, std::vector<ResourceId>> routes_;
  mutable std::map<std::tuple<NodeId, NodeId, int>, PathSet> paths_;
};

class Datacenter {
 public:
  Datacenter(std::shared_ptr<const PhysicalTopology> topo, SharingPolicy policy);

  const PhysicalTopology& topology() const { return *topo_; }
  std::shared_ptr<const PhysicalTopology> topologyPtr() const { return topo_; }
  const RouteCache& routes() const { return *routes_; }
  SharingPolicy policy() const { return policy_; }

  // Building.  Placement must fit the host; throws CapacityError otherwise.
  int addTopology(const std::string& name, TopologyKind kind, std::optional<double> groupDeadline);
  InstanceId addInstance(int topology, const std::string& name, const Flavor& flavor, NodeId host,
                         double dirtyRate, std::optional<double> mipo = std::nullopt);
  VLinkId addVirtualLink(InstanceId src, InstanceId dst, double reserved);

  const std::vector<Instance>& instances() const { return instances_; }
  const Instance& instance(InstanceId id) const { return instances_.at(static_cast<std::size_t>(id)); }
  std::optional<InstanceId> findInstance(const std::string& name) const;
  const std::vector<VirtualLink>& virtualLinks() const { return vlinks_; }
  const std::vector<VirtualTopology>& virtualTopologies() const { return topologies_; }
  const std::vector<VLinkId>& incidentLinks(InstanceId id) const { return incident_.at(static_cast<std::size_t>(id)); }
  const std::vector<ResourceId>& vlinkRoute(VLinkId id) const { return vlinkRoutes_.at(static_cast<std::size_t>(id)); }

  // Host resources.
  const HostUsage& hostUsage(NodeId host) const;
  bool canHost(NodeId host, const Flavor& flavor) const;
  void reserve(NodeId host, const Flavor& flavor);  // throws CapacityError
  void release(NodeId host, const Flavor& flavor);

  // Moves the instance and reroutes its virtual links along current shortest
  // paths.  When `reserved` is true the destination resources were already
  // reserved (migration in progress) and are not charged again.  On capacity
  // violation throws CapacityError and leaves the state unchanged.
  void commitPlacement(InstanceId id, NodeId newHost, bool reserved = false);

  // Flow aggregates.
  const std::vector<LinkLoad>& loads() const { return loads_; }
  void setServiceActive(VLinkId id, bool active);  // reference counted
  int addMigrationFlow(std::vector<ResourceId> resources, bool pending);
  void setMigrationFlowState(int flowId, bool moving);  // moving vs idle/pending
  void removeMigrationFlow(int flowId);
  const std::vector<ResourceId>& migrationFlowResources(int flowId) const;

  // Current rates.
  double vlinkRate(VLinkId id) const;
  double migrationFlowRate(int flowId) const;

  // Rate each member of a hypothetical migration would get if it started now
  // on `paths` with `members` members moving together.  Pending and moving
  // migration subflows both count as competitors; `extra` adds more
  // hypothetical subflows (one resource list each).
  double probeMigrationRate(const PathSet& paths, int members = 1,
                            std::span<const std::vector<ResourceId>> extra = {}) const;
  // Same with the candidate's per-path resource lists given directly.
  double probeMigrationRate(std::span<const std::vector<ResourceId>> own, int members,
                            std::span<const std::vector<ResourceId>> extra) const;
  // Share one more migration subflow would get on a single resource.
  double resourceHeadroom(ResourceId r) const;

  // Energy bookkeeping.
  bool hostPoweredOn(NodeId host) const { return hostUsage(host).instances > 0; }
  double hostUtilization(NodeId host) const;
  int activePorts(NodeId sw) const;

 private:
  void routeLink(VLinkId id);
  void applyRoute(VLinkId id, int sign);
  bool linkBusy(LinkId l) const;

  std::shared_ptr<const PhysicalTopology> topo_;
  std::shared_ptr<RouteCache> routes_;
  SharingPolicy policy_;
  std::vector<VirtualTopology> topologies_;
  std::vector<Instance> instances_;
  std::map<std::string, InstanceId> instanceByName_;
  std::vector<VirtualLink> vlinks_;
  std::vector<std::vector<VLinkId>> incident_;
  std::vector<std::vector<ResourceId>> vlinkRoutes_;
  std::vector<int> vlinkActive_;
  std::vector<HostUsage> hostUsage_;  // indexed by node id
  std::vector<LinkLoad> loads_;
  struct MigFlow {
    std::vector<ResourceId> resources;
    bool moving = false;
  };
  std::map<int, MigFlow> migFlows_;
  int nextFlowId_ = 0;
};

}  // namespace livemig
