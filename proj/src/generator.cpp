#include "livemig/generator.hpp"

#include <algorithm>
#include <random>

namespace livemig {

SimulationInput randomScenario(std::uint64_t seed, const GeneratorOptions& o) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };

  auto topo = std::make_shared<const PhysicalTopology>(buildFatTree(o.pods, o.linkBw, o.linkBw, HostResources{}));
  SimulationInput in{Datacenter(topo, o.policy), {}, {}, {}, {}, {}, o.horizon, seed, {}, false};
  auto& dc = in.dc;
  const auto& allHosts = topo->hosts();
  const std::size_t pool =
      o.hostPool > 0 ? std::min<std::size_t>(static_cast<std::size_t>(o.hostPool), allHosts.size()) : allHosts.size();

  const auto flavors = standardFlavors();
  const std::vector<std::string> names{"tiny", "small", "medium", "large"};
  for (int i = 0; i < o.tasks; ++i) {
    const Flavor& f = flavors.at(names[pick(names.size())]);
    NodeId src = allHosts[pick(pool)];
    for (int tries = 0; tries < 64 && !dc.canHost(src, f); ++tries) src = allHosts[pick(pool)];
    NodeId dst = allHosts[pick(pool)];
    for (int tries = 0; tries < 64 && (dst == src || !dc.canHost(dst, f)); ++tries) dst = allHosts[pick(pool)];
    if (dst == src || !dc.canHost(src, f) || !dc.canHost(dst, f)) continue;

    const int t = dc.addTopology("vt" + std::to_string(i), TopologyKind::Single, std::nullopt);
    const auto inst = dc.addInstance(t, "vm" + std::to_string(i), f, src, uniform(0.0, o.maxDirtyRate), std::nullopt);
    if (uniform(0.0, 1.0) < o.vlinkProbability) {
      NodeId peerHost = allHosts[pick(allHosts.size())];
      const Flavor& tiny = flavors.at("tiny");
      if (dc.canHost(peerHost, tiny)) {
        const auto peer = dc.addInstance(t, "peer" + std::to_string(i), tiny, peerHost, 0.0, std::nullopt);
        dc.addVirtualLink(inst, peer, uniform(50e6, 1e9));
      }
    }
    MigrationRequest r;
    r.id = static_cast<TaskId>(in.requests.size());
    r.instance = inst;
    r.destination = dst;
    if (uniform(0.0, 1.0) < o.deadlineProbability) r.deadline = uniform(10.0, 120.0);
    in.requests.push_back(r);
  }
  return in;
}

}  // namespace livemig
