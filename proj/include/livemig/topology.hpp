// Physical data-center graph: hosts, switches and routers joined by
// capacitated directed links.  Every physical cable is stored as two directed
// links.  Each host additionally owns an outbound and an inbound interface
// resource so that allocations can treat links and interfaces uniformly.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace livemig {

using NodeId = std::int32_t;
using LinkId = std::int32_t;
// Index into PhysicalTopology::resources(): links first, then two interfaces per host.
using ResourceId = std::int32_t;

enum class NodeKind { Host, Switch, Router };

struct HostResources {
  int cores = 24;
  double mipsPerCore = 10000.0;
  double ramBytes = 10240.0 * 1e9;
  double storageBytes = 1e16;
};

struct Node {
  std::string name;
  NodeKind kind;
  HostResources host;  // meaningful for hosts only
};

struct Link {
  NodeId from;
  NodeId to;
  double capacity;  // bits/s
  LinkId reverse;
};

class PhysicalTopology {
 public:
  NodeId addHost(const std::string& name, const HostResources& res, double ifaceCapacity);
  NodeId addSwitch(const std::string& name, NodeKind kind = NodeKind::Switch);
  // Adds both directions; returns the a->b link.
  LinkId connect(NodeId a, NodeId b, double capacity);

  std::size_t nodeCount() const { return nodes_.size(); }
  std::size_t linkCount() const { return links_.size(); }
  const Node& node(NodeId id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  const Link& link(LinkId id) const { return links_.at(static_cast<std::size_t>(id)); }
  const std::vector<Link>& links() const { return links_; }
  // Outgoing links sorted by destination node id.
  const std::vector<LinkId>& outLinks(NodeId id) const { return adjacency_.at(static_cast<std::size_t>(id)); }

  const std::vector<NodeId>& hosts() const { return hosts_; }
  std::vector<NodeId> switches() const;
  std::optional<NodeId> find(const std::string& name) const;
  NodeId require(const std::string& name) const;  // throws std::out_of_range
  bool isHost(NodeId id) const { return node(id).kind == NodeKind::Host; }
  std::optional<LinkId> linkBetween(NodeId a, NodeId b) const;

  double ifaceOut(NodeId host) const;
  double ifaceIn(NodeId host) const;

  std::size_t resourceCount() const { return links_.size() + 2 * hosts_.size(); }
  double resourceCapacity(ResourceId r) const;
  ResourceId outIface(NodeId host) const;
  ResourceId inIface(NodeId host) const;
  bool isInterface(ResourceId r) const { return static_cast<std::size_t>(r) >= links_.size(); }

  // True when every host can reach every other host.
  bool hostsConnected() const;

 private:
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::vector<std::vector<LinkId>> adjacency_;
  std::vector<NodeId> hosts_;
  std::vector<int> hostIndex_;  // node id -> position in hosts_, -1 otherwise
  std::vector<double> ifaceCap_;
  std::map<std::string, NodeId> byName_;
};

// k-ary FatTree: (k/2)^2 core, k*k aggregation+edge switches, k^3/4 hosts.
// Hosts are named h0..hN-1 in pod order; switches core<i>, agg<pod>_<i>, edge<pod>_<i>.
PhysicalTopology buildFatTree(int pods, double hostIfaceBw, double linkBw,
                              const HostResources& hostRes = {});

struct WanSpec {
  struct Edge {
    std::string a;
    std::string b;
    std::optional<double> capacity;
  };
  std::vector<std::string> routers;
  std::vector<Edge> edges;
  double routerLinkBw = 10e9;
  double gatewayBw = 40e9;
  double hostIfaceBw = 10e9;
  int hostsPerRouter = 1;
  HostResources hostRes;
};

// Routers named as given.  One host per router hangs directly off the router
// via the gateway link; with more hosts a cluster switch <router>-sw sits
// behind the gateway.  Hosts are named <router>-h<i>.
PhysicalTopology buildWan(const WanSpec& spec);

// Router connectivity of the AARNET inter-datacenter WAN (19 routers).
WanSpec aarnetSpec();

struct Path {
  std::vector<NodeId> nodes;
  std::vector<LinkId> links;
  std::size_t hops() const { return links.size(); }
  bool operator==(const Path&) const = default;
};

struct PathSet {
  std::vector<Path> paths;
  std::optional<int> parallelCap;  // lambda(p): max migrations merged onto these paths
  bool empty() const { return paths.empty(); }
};

// Up to k loop-free paths, shortest first, preferring paths that share few
// links with the ones already chosen.  Ties go to the lexicographically
// smaller node-id sequence.
PathSet kPaths(const PhysicalTopology& topo, NodeId src, NodeId dst, int k);

// Resources a flow on `path` from src to dst consumes: its links plus the
// source out-interface and destination in-interface.  Sorted ascending.
std::vector<ResourceId> pathResources(const PhysicalTopology& topo, const Path& path);

}  // namespace livemig
