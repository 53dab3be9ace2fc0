#include "livemig/topology.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <set>
#include <stdexcept>

namespace livemig {

NodeId PhysicalTopology::addHost(const std::string& name, const HostResources& res, double ifaceCapacity) {
  if (byName_.count(name)) throw std::invalid_argument("duplicate node name: " + name);
  if (!(ifaceCapacity > 0.0)) throw std::invalid_argument("host " + name + ": interface capacity must be positive");
  const auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back({name, NodeKind::Host, res});
  adjacency_.emplace_back();
  hostIndex_.push_back(static_cast<int>(hosts_.size()));
  hosts_.push_back(id);
  ifaceCap_.push_back(ifaceCapacity);
  byName_[name] = id;
  return id;
}

NodeId PhysicalTopology::addSwitch(const std::string& name, NodeKind kind) {
  if (byName_.count(name)) throw std::invalid_argument("duplicate node name: " + name);
  const auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back({name, kind, {}});
  adjacency_.emplace_back();
  hostIndex_.push_back(-1);
  byName_[name] = id;
  return id;
}

LinkId PhysicalTopology::connect(NodeId a, NodeId b, double capacity) {
  if (a == b) throw std::invalid_argument("self link on " + node(a).name);
  if (!(capacity > 0.0)) {
    throw std::invalid_argument("link " + node(a).name + "-" + node(b).name + ": capacity must be positive");
  }
  if (linkBetween(a, b)) throw std::invalid_argument("duplicate link " + node(a).name + "-" + node(b).name);
  const auto ab = static_cast<LinkId>(links_.size());
  links_.push_back({a, b, capacity, ab + 1});
  links_.push_back({b, a, capacity, ab});
  auto insertSorted = [this](NodeId from, LinkId l) {
    auto& adj = adjacency_[static_cast<std::size_t>(from)];
    auto pos = std::lower_bound(adj.begin(), adj.end(), l,
                                [this](LinkId x, LinkId y) { return link(x).to < link(y).to; });
    adj.insert(pos, l);
  };
  insertSorted(a, ab);
  insertSorted(b, ab + 1);
  return ab;
}

std::vector<NodeId> PhysicalTopology::switches() const {
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].kind != NodeKind::Host) out.push_back(static_cast<NodeId>(i));
  }
  return out;
}

std::optional<NodeId> PhysicalTopology::find(const std::string& name) const {
  auto it = byName_.find(name);
  if (it == byName_.end()) return std::nullopt;
  return it->second;
}

NodeId PhysicalTopology::require(const std::string& name) const {
  auto id = find(name);
  if (!id) throw std::out_of_range("unknown node: " + name);
  return *id;
}

std::optional<LinkId> PhysicalTopology::linkBetween(NodeId a, NodeId b) const {
  for (LinkId l : outLinks(a)) {
    if (link(l).to == b) return l;
  }
  return std::nullopt;
}

double PhysicalTopology::ifaceOut(NodeId host) const {
  return ifaceCap_.at(static_cast<std::size_t>(hostIndex_.at(static_cast<std::size_t>(host))));
}

double PhysicalTopology::ifaceIn(NodeId host) const { return ifaceOut(host); }

ResourceId PhysicalTopology::outIface(NodeId host) const {
  const int idx = hostIndex_.at(static_cast<std::size_t>(host));
  if (idx < 0) throw std::invalid_argument(node(host).name + " is not a host");
  return static_cast<ResourceId>(links_.size() + 2 * static_cast<std::size_t>(idx));
}

ResourceId PhysicalTopology::inIface(NodeId host) const { return outIface(host) + 1; }

double PhysicalTopology::resourceCapacity(ResourceId r) const {
  const auto idx = static_cast<std::size_t>(r);
  if (idx < links_.size()) return links_[idx].capacity;
  return ifaceCap_.at((idx - links_.size()) / 2);
}

bool PhysicalTopology::hostsConnected() const {
  if (hosts_.size() < 2) return true;
  std::vector<bool> seen(nodes_.size(), false);
  std::deque<NodeId> queue{hosts_.front()};
  seen[static_cast<std::size_t>(hosts_.front())] = true;
  while (!queue.empty()) {
    const NodeId n = queue.front();
    queue.pop_front();
    for (LinkId l : outLinks(n)) {
      const NodeId m = link(l).to;
      if (!seen[static_cast<std::size_t>(m)]) {
        seen[static_cast<std::size_t>(m)] = true;
        queue.push_back(m);
      }
    }
  }
  return std::all_of(hosts_.begin(), hosts_.end(), [&](NodeId h) { return seen[static_cast<std::size_t>(h)]; });
}

PhysicalTopology buildFatTree(int pods, double hostIfaceBw, double linkBw, const HostResources& hostRes) {
  if (pods < 2 || pods % 2 != 0) throw std::invalid_argument("FatTree pods must be even and at least 2");
  PhysicalTopology topo;
  const int half = pods / 2;
  std::vector<NodeId> cores;
  for (int i = 0; i < half * half; ++i) cores.push_back(topo.addSwitch("core" + std::to_string(i)));
  int hostNo = 0;
  for (int p = 0; p < pods; ++p) {
    std::vector<NodeId> aggs;
    std::vector<NodeId> edges;
    for (int i = 0; i < half; ++i) {
      aggs.push_back(topo.addSwitch("agg" + std::to_string(p) + "_" + std::to_string(i)));
    }
    for (int i = 0; i < half; ++i) {
      edges.push_back(topo.addSwitch("edge" + std::to_string(p) + "_" + std::to_string(i)));
    }
    for (int a = 0; a < half; ++a) {
      for (int c = 0; c < half; ++c) topo.connect(aggs[a], cores[a * half + c], linkBw);
      for (NodeId e : edges) topo.connect(aggs[a], e, linkBw);
    }
    for (NodeId e : edges) {
      for (int h = 0; h < half; ++h) {
        NodeId host = topo.addHost("h" + std::to_string(hostNo++), hostRes, hostIfaceBw);
        topo.connect(e, host, linkBw);
      }
    }
  }
  return topo;
}

PhysicalTopology buildWan(const WanSpec& spec) {
  PhysicalTopology topo;
  if (spec.hostsPerRouter < 1) throw std::invalid_argument("WAN hostsPerRouter must be at least 1");
  for (const auto& r : spec.routers) topo.addSwitch(r, NodeKind::Router);
  for (const auto& e : spec.edges) {
    auto a = topo.find(e.a);
    auto b = topo.find(e.b);
    if (!a) throw std::invalid_argument("WAN edge references unknown router: " + e.a);
    if (!b) throw std::invalid_argument("WAN edge references unknown router: " + e.b);
    topo.connect(*a, *b, e.capacity.value_or(spec.routerLinkBw));
  }
  for (const auto& r : spec.routers) {
    const NodeId router = topo.require(r);
    if (spec.hostsPerRouter == 1) {
      NodeId h = topo.addHost(r + "-h0", spec.hostRes, spec.hostIfaceBw);
      topo.connect(router, h, spec.gatewayBw);
      continue;
    }
    NodeId sw = topo.addSwitch(r + "-sw");
    topo.connect(router, sw, spec.gatewayBw);
    for (int i = 0; i < spec.hostsPerRouter; ++i) {
      NodeId h = topo.addHost(r + "-h" + std::to_string(i), spec.hostRes, spec.hostIfaceBw);
      topo.connect(sw, h, spec.hostIfaceBw);
    }
  }
  return topo;
}

WanSpec aarnetSpec() {
  WanSpec spec;
  spec.routers = {"Darwin",    "Cairns",   "Townsville", "Rockhampton", "Brisbane1", "Brisbane2", "Armidale",
                  "Sydney1",   "Sydney2",  "Canberra1",  "Canberra2",   "Albury",    "Melbourne1", "Melbourne2",
                  "Hobart",    "Adelaide", "AliceSprings", "Perth1",    "Perth2"};
  const std::vector<std::pair<std::string, std::string>> edges = {
      {"Darwin", "AliceSprings"},   {"Darwin", "Cairns"},         {"Cairns", "Townsville"},
      {"Townsville", "Rockhampton"}, {"Rockhampton", "Brisbane1"}, {"Brisbane1", "Brisbane2"},
      {"Brisbane1", "Armidale"},    {"Brisbane2", "Sydney2"},     {"Armidale", "Sydney1"},
      {"Sydney1", "Sydney2"},       {"Sydney1", "Canberra1"},     {"Sydney2", "Canberra2"},
      {"Canberra1", "Canberra2"},   {"Canberra1", "Albury"},      {"Albury", "Melbourne1"},
      {"Canberra2", "Melbourne2"},  {"Melbourne1", "Melbourne2"}, {"Melbourne1", "Hobart"},
      {"Melbourne2", "Hobart"},     {"Melbourne1", "Adelaide"},   {"Adelaide", "AliceSprings"},
      {"Adelaide", "Perth1"},       {"Perth1", "Perth2"},         {"Perth2", "Darwin"}};
  for (const auto& [a, b] : edges) spec.edges.push_back({a, b, std::nullopt});
  return spec;
}

namespace {

struct Banned {
  std::vector<bool> nodes;
  std::set<LinkId> links;
};

// Shortest path by hop count whose node sequence is lexicographically
// smallest among the shortest ones.
std::optional<Path> lexShortest(const PhysicalTopology& topo, NodeId src, NodeId dst, const Banned& banned) {
  const std::size_t n = topo.nodeCount();
  constexpr int kInf = std::numeric_limits<int>::max();
  std::vector<int> dist(n, kInf);
  // Reverse BFS from dst so the forward walk can pick the smallest next hop.
  std::deque<NodeId> queue{dst};
  dist[static_cast<std::size_t>(dst)] = 0;
  while (!queue.empty()) {
    const NodeId v = queue.front();
    queue.pop_front();
    for (LinkId out : topo.outLinks(v)) {
      const LinkId in = topo.link(out).reverse;  // u -> v
      const NodeId u = topo.link(in).from;
      if (banned.nodes[static_cast<std::size_t>(u)] || banned.links.count(in)) continue;
      if (dist[static_cast<std::size_t>(u)] != kInf) continue;
      dist[static_cast<std::size_t>(u)] = dist[static_cast<std::size_t>(v)] + 1;
      // Only hosts at the endpoints; never transit through a host.
      if (u != src && topo.isHost(u)) continue;
      queue.push_back(u);
    }
  }
  if (dist[static_cast<std::size_t>(src)] == kInf) return std::nullopt;
  Path path;
  path.nodes.push_back(src);
  NodeId cur = src;
  while (cur != dst) {
    for (LinkId l : topo.outLinks(cur)) {  // sorted by destination id
      const NodeId next = topo.link(l).to;
      if (banned.links.count(l) || banned.nodes[static_cast<std::size_t>(next)]) continue;
      if (next != dst && topo.isHost(next)) continue;
      if (dist[static_cast<std::size_t>(next)] == dist[static_cast<std::size_t>(cur)] - 1) {
        path.links.push_back(l);
        path.nodes.push_back(next);
        cur = next;
        break;
      }
    }
  }
  return path;
}

bool pathLess(const Path& a, const Path& b) {
  if (a.hops() != b.hops()) return a.hops() < b.hops();
  return a.nodes < b.nodes;
}

// Yen's k-shortest loop-free paths.
std::vector<Path> yen(const PhysicalTopology& topo, NodeId src, NodeId dst, std::size_t count) {
  std::vector<Path> accepted;
  Banned none{std::vector<bool>(topo.nodeCount(), false), {}};
  auto first = lexShortest(topo, src, dst, none);
  if (!first) return accepted;
  accepted.push_back(*first);
  std::vector<Path> candidates;
  while (accepted.size() < count) {
    const Path& last = accepted.back();
    for (std::size_t i = 0; i + 1 < last.nodes.size(); ++i) {
      const NodeId spur = last.nodes[i];
      Banned banned{std::vector<bool>(topo.nodeCount(), false), {}};
      for (const Path& p : accepted) {
        if (p.nodes.size() > i && std::equal(p.nodes.begin(), p.nodes.begin() + static_cast<long>(i) + 1,
                                              last.nodes.begin())) {
          banned.links.insert(p.links[i]);
        }
      }
      for (std::size_t j = 0; j < i; ++j) banned.nodes[static_cast<std::size_t>(last.nodes[j])] = true;
      auto tail = lexShortest(topo, spur, dst, banned);
      if (!tail) continue;
      Path full;
      full.nodes.assign(last.nodes.begin(), last.nodes.begin() + static_cast<long>(i));
      full.links.assign(last.links.begin(), last.links.begin() + static_cast<long>(i));
      full.nodes.insert(full.nodes.end(), tail->nodes.begin(), tail->nodes.end());
      full.links.insert(full.links.end(), tail->links.begin(), tail->links.end());
      if (std::find(candidates.begin(), candidates.end(), full) == candidates.end() &&
          std::find(accepted.begin(), accepted.end(), full) == accepted.end()) {
        candidates.push_back(std::move(full));
      }
    }
    if (candidates.empty()) break;
    auto best = std::min_element(candidates.begin(), candidates.end(), pathLess);
    accepted.push_back(*best);
    candidates.erase(best);
  }
  return accepted;
}

}  // namespace

PathSet kPaths(const PhysicalTopology& topo, NodeId src, NodeId dst, int k) {
  if (src == dst) throw std::invalid_argument("kPaths: source equals destination");
  if (!topo.isHost(src) || !topo.isHost(dst)) throw std::invalid_argument("kPaths: endpoints must be hosts");
  PathSet out;
  if (k <= 0) return out;
  if (k == 1) {
    Banned none{std::vector<bool>(topo.nodeCount(), false), {}};
    if (auto p = lexShortest(topo, src, dst, none)) out.paths.push_back(std::move(*p));
    return out;
  }
  // Over-generate, then choose greedily for low overlap among the shortest.
  auto candidates = yen(topo, src, dst, static_cast<std::size_t>(k) * 4);
  while (static_cast<int>(out.paths.size()) < k && !candidates.empty()) {
    std::size_t bestIdx = 0;
    std::size_t bestOverlap = std::numeric_limits<std::size_t>::max();
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      std::size_t overlap = 0;
      for (const Path& chosen : out.paths) {
        for (LinkId l : candidates[c].links) {
          overlap += static_cast<std::size_t>(std::count(chosen.links.begin(), chosen.links.end(), l));
        }
      }
      const Path& best = candidates[bestIdx];
      const Path& cand = candidates[c];
      const bool better = c == 0 || cand.hops() < best.hops() ||
                          (cand.hops() == best.hops() &&
                           (overlap < bestOverlap || (overlap == bestOverlap && cand.nodes < best.nodes)));
      if (better) {
        bestIdx = c;
        bestOverlap = overlap;
      }
    }
    out.paths.push_back(candidates[bestIdx]);
    candidates.erase(candidates.begin() + static_cast<long>(bestIdx));
  }
  return out;
}

std::vector<ResourceId> pathResources(const PhysicalTopology& topo, const Path& path) {
  std::vector<ResourceId> res(path.links.begin(), path.links.end());
  res.push_back(topo.outIface(path.nodes.front()));
  res.push_back(topo.inIface(path.nodes.back()));
  std::sort(res.begin(), res.end());
  return res;
}

}  // namespace livemig
