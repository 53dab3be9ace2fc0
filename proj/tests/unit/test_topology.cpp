#include <algorithm>
#include <memory>
#include <set>

#include <doctest.h>

#include "livemig/datacenter.hpp"
#include "livemig/topology.hpp"

using namespace livemig;

TEST_CASE("fattree sizes") {
  const auto t8 = buildFatTree(8, 10e9, 10e9);
  CHECK(t8.hosts().size() == 128);
  CHECK(t8.switches().size() == 80);
  const auto t2 = buildFatTree(2, 10e9, 10e9);
  CHECK(t2.hosts().size() == 2);
  CHECK(t2.hostsConnected());
  const auto t4 = buildFatTree(4, 10e9, 10e9);
  CHECK(t4.hosts().size() == 16);
  const auto sw = t4.switches();
  CHECK(std::count_if(sw.begin(), sw.end(), [&](NodeId s) { return t4.node(s).name.rfind("core", 0) == 0; }) == 4);
  CHECK(t4.find("h15").has_value());
  CHECK_THROWS(buildFatTree(3, 10e9, 10e9));
}

TEST_CASE("two router wan") {
  WanSpec spec;
  spec.routers = {"A", "B"};
  spec.edges = {{"A", "B", std::nullopt}};
  const auto t = buildWan(spec);
  CHECK(t.nodeCount() == 4);
  CHECK(t.linkCount() == 6);
  int gateways = 0;
  for (const auto& l : t.links()) {
    if (t.isHost(l.from)) {
      ++gateways;
      CHECK(l.capacity == spec.gatewayBw);
    }
  }
  CHECK(gateways == 2);
  CHECK(t.find("A-h0").has_value());
}

TEST_CASE("aarnet router links") {
  const auto spec = aarnetSpec();
  CHECK(spec.routers.size() == 19);
  const auto t = buildWan(spec);
  CHECK(t.hostsConnected());
  int routerLinks = 0;
  for (const auto& l : t.links()) {
    if (t.node(l.from).kind == NodeKind::Router && t.node(l.to).kind == NodeKind::Router) {
      ++routerLinks;
      CHECK(l.capacity == 10e9);
    }
  }
  CHECK(routerLinks == 2 * static_cast<int>(spec.edges.size()));
}

TEST_CASE("paths inside one edge switch") {
  const auto t = buildFatTree(4, 10e9, 10e9);
  const auto ps = kPaths(t, t.require("h0"), t.require("h1"), 3);
  REQUIRE(ps.paths.size() == 1);
  CHECK(ps.paths[0].hops() == 2);
}

TEST_CASE("paths across pods") {
  const auto t = buildFatTree(4, 10e9, 10e9);
  const auto ps = kPaths(t, t.require("h0"), t.require("h4"), 4);
  REQUIRE(ps.paths.size() == 4);
  std::set<NodeId> cores;
  for (const auto& p : ps.paths) {
    CHECK(p.hops() == 6);
    cores.insert(p.nodes[3]);
  }
  CHECK(cores.size() == 4);
  // shortest first, deterministic
  CHECK(kPaths(t, t.require("h0"), t.require("h4"), 4).paths == ps.paths);
}

TEST_CASE("wan triangle paths") {
  WanSpec spec;
  spec.routers = {"A", "B", "C"};
  spec.edges = {{"A", "B", std::nullopt}, {"B", "C", std::nullopt}, {"C", "A", std::nullopt}};
  const auto t = buildWan(spec);
  const auto ps = kPaths(t, t.require("A-h0"), t.require("B-h0"), 2);
  REQUIRE(ps.paths.size() == 2);
  CHECK(ps.paths[0].hops() == 3);
  CHECK(ps.paths[1].hops() == 4);
  auto routerLinks = [&](const Path& p) {
    std::set<LinkId> out;
    for (LinkId l : p.links) {
      if (t.node(t.link(l).from).kind == NodeKind::Router && t.node(t.link(l).to).kind == NodeKind::Router) out.insert(l);
    }
    return out;
  };
  const auto a = routerLinks(ps.paths[0]);
  const auto b = routerLinks(ps.paths[1]);
  CHECK(std::none_of(a.begin(), a.end(), [&](LinkId l) { return b.count(l) > 0; }));
  // only two simple paths exist between two routers of a triangle
  CHECK(kPaths(t, t.require("A-h0"), t.require("B-h0"), 3).paths.size() == 2);
}

TEST_CASE("path resources") {
  const auto t = buildFatTree(4, 10e9, 10e9);
  const auto p = kPaths(t, t.require("h0"), t.require("h1"), 1).paths.at(0);
  const auto res = pathResources(t, p);
  CHECK(res.size() == 4);
  CHECK(std::is_sorted(res.begin(), res.end()));
  CHECK(std::count(res.begin(), res.end(), t.outIface(t.require("h0"))) == 1);
  CHECK(std::count(res.begin(), res.end(), t.inIface(t.require("h1"))) == 1);
}

TEST_CASE("ratio sharing") {
  const std::vector<LinkDemand> d = {{0, 2e9, false}, {1, 2e9, false}, {2, 0.0, true}};
  const auto r = shareBandwidth(SharingPolicy::Ratio, 10e9, d);
  CHECK(r[0] == doctest::Approx(10e9 * 2 / 14));
  CHECK(r[1] == doctest::Approx(1.43e9).epsilon(0.01));
  CHECK(r[2] == doctest::Approx(7.14e9).epsilon(0.01));
}

TEST_CASE("reserved sharing") {
  const std::vector<LinkDemand> d = {{0, 2e9, false}, {1, 4e9, false}, {2, 0.0, true}};
  const auto r = shareBandwidth(SharingPolicy::Reserved, 10e9, d);
  CHECK(r[2] == doctest::Approx(4e9));
}

TEST_CASE("undersubscribed ratio") {
  const std::vector<LinkDemand> d = {{0, 2e9, false}, {1, 3e9, false}};
  const auto r = shareBandwidth(SharingPolicy::Ratio, 10e9, d);
  CHECK(r[0] == doctest::Approx(2e9));
  CHECK(r[1] == doctest::Approx(3e9));
}

TEST_CASE("free sharing") {
  const std::vector<LinkDemand> d = {{0, 2e9, false, true}, {1, 4e9, false, false}, {2, 0.0, true}, {3, 0.0, true}};
  const auto r = shareBandwidth(SharingPolicy::Free, 10e9, d);
  CHECK(r[2] == doctest::Approx(4e9));
  CHECK(r[3] == doctest::Approx(4e9));
}

TEST_CASE("consolidation makes a link intra host") {
  auto topo = std::make_shared<PhysicalTopology>();
  const auto h1 = topo->addHost("H1", {}, 10e9);
  const auto h2 = topo->addHost("H2", {}, 10e9);
  const auto s = topo->addSwitch("S1");
  topo->connect(h1, s, 10e9);
  topo->connect(h2, s, 10e9);
  Datacenter dc(topo, SharingPolicy::Ratio);
  const int g = dc.addTopology("g", TopologyKind::Single, std::nullopt);
  const auto flavors = standardFlavors();
  const auto a = dc.addInstance(g, "a", flavors.at("small"), h1, 1e8);
  const auto b = dc.addInstance(g, "b", flavors.at("small"), h2, 1e8);
  const auto l = dc.addVirtualLink(a, b, 1e9);
  CHECK(dc.vlinkRoute(l).size() == 4);
  dc.commitPlacement(a, h2);
  CHECK(dc.vlinkRoute(l).empty());
  for (const auto& load : dc.loads()) CHECK(load.reserved == 0.0);
  CHECK_FALSE(dc.hostPoweredOn(h1));
  CHECK(dc.hostUsage(h2).instances == 2);
}

TEST_CASE("placement beyond capacity") {
  auto topo = std::make_shared<PhysicalTopology>();
  HostResources res;
  res.cores = 4;
  const auto h1 = topo->addHost("H1", res, 10e9);
  Datacenter dc(topo, SharingPolicy::Ratio);
  const int g = dc.addTopology("g", TopologyKind::Single, std::nullopt);
  CHECK_THROWS_AS(dc.addInstance(g, "x", standardFlavors().at("xlarge"), h1, 0.0), CapacityError);
}
