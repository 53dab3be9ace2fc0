#include "livemig/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace livemig {

using nlohmann::json;

namespace {

constexpr double kMbps = 1e6;
constexpr double kGB = 1e9;

std::string at(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const json* find(const json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) throw ScenarioError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

double number(const json& obj, const std::string& path, const char* key, std::optional<double> def,
              bool allowNegative = false) {
  const json* v = find(obj, path, key);
  if (!v) {
    if (!def) throw ScenarioError(at(path, key), "required field missing");
    return *def;
  }
  if (!v->is_number()) throw ScenarioError(at(path, key), "expected a number");
  const double d = v->get<double>();
  if (!allowNegative && d < 0.0) throw ScenarioError(at(path, key), "must not be negative");
  return d;
}

std::optional<double> optNumber(const json& obj, const std::string& path, const char* key) {
  if (!find(obj, path, key)) return std::nullopt;
  return number(obj, path, key, std::nullopt);
}

int integer(const json& obj, const std::string& path, const char* key, int def) {
  const json* v = find(obj, path, key);
  if (!v) return def;
  if (!v->is_number_integer()) throw ScenarioError(at(path, key), "expected an integer");
  return v->get<int>();
}

std::string text(const json& obj, const std::string& path, const char* key, std::optional<std::string> def) {
  const json* v = find(obj, path, key);
  if (!v) {
    if (!def) throw ScenarioError(at(path, key), "required field missing");
    return *def;
  }
  if (!v->is_string()) throw ScenarioError(at(path, key), "expected a string");
  return v->get<std::string>();
}

bool flag(const json& obj, const std::string& path, const char* key, bool def) {
  const json* v = find(obj, path, key);
  if (!v) return def;
  if (!v->is_boolean()) throw ScenarioError(at(path, key), "expected true or false");
  return v->get<bool>();
}

const json& array(const json& obj, const std::string& path, const char* key) {
  static const json empty = json::array();
  const json* v = find(obj, path, key);
  if (!v) return empty;
  if (!v->is_array()) throw ScenarioError(at(path, key), "expected a list");
  return *v;
}

HostResources hostResources(const json& obj, const std::string& path, HostResources def) {
  HostResources r = def;
  r.cores = integer(obj, path, "cores", def.cores);
  r.mipsPerCore = number(obj, path, "mipsPerCore", def.mipsPerCore);
  r.ramBytes = number(obj, path, "ramGB", def.ramBytes / kGB) * kGB;
  r.storageBytes = number(obj, path, "storageGB", def.storageBytes / kGB) * kGB;
  if (r.cores <= 0 || !(r.mipsPerCore > 0) || !(r.ramBytes > 0) || !(r.storageBytes > 0)) {
    throw ScenarioError(path, "host resources must be positive");
  }
  return r;
}

json hostJson(const HostResources& r) {
  return {{"cores", r.cores}, {"mipsPerCore", r.mipsPerCore}, {"ramGB", r.ramBytes / kGB},
          {"storageGB", r.storageBytes / kGB}};
}

double positiveBw(const json& obj, const std::string& path, const char* key, double defBits) {
  const double v = number(obj, path, key, defBits / kMbps);
  if (!(v > 0.0)) throw ScenarioError(at(path, key), "capacity must be positive");
  return v * kMbps;
}

TopologySpec parseTopology(const json& t, const std::string& path) {
  TopologySpec s;
  s.type = text(t, path, "type", std::nullopt);
  if (const json* h = find(t, path, "host")) s.host = hostResources(*h, at(path, "host"), s.host);
  if (s.type == "fattree") {
    s.pods = integer(t, path, "pods", 8);
    if (s.pods < 2 || s.pods % 2 != 0) throw ScenarioError(at(path, "pods"), "must be even and at least 2");
    s.hostIfaceBw = positiveBw(t, path, "hostIfaceMbps", s.hostIfaceBw);
    s.linkBw = positiveBw(t, path, "linkMbps", s.linkBw);
  } else if (s.type == "wan") {
    s.aarnet = flag(t, path, "aarnet", false);
    if (s.aarnet) s.wan = aarnetSpec();
    const auto& routers = array(t, path, "routers");
    if (!routers.empty()) {
      s.wan.routers.clear();
      for (std::size_t i = 0; i < routers.size(); ++i) {
        if (!routers[i].is_string()) throw ScenarioError(at(at(path, "routers"), i), "expected a router name");
        s.wan.routers.push_back(routers[i].get<std::string>());
      }
    }
    const auto& edges = array(t, path, "edges");
    if (!edges.empty()) s.wan.edges.clear();
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const auto p = at(at(path, "edges"), i);
      WanSpec::Edge e{text(edges[i], p, "a", std::nullopt), text(edges[i], p, "b", std::nullopt), std::nullopt};
      if (find(edges[i], p, "mbps")) e.capacity = positiveBw(edges[i], p, "mbps", 0.0);
      s.wan.edges.push_back(e);
    }
    s.wan.routerLinkBw = positiveBw(t, path, "routerLinkMbps", s.wan.routerLinkBw);
    s.wan.gatewayBw = positiveBw(t, path, "gatewayMbps", s.wan.gatewayBw);
    s.wan.hostIfaceBw = positiveBw(t, path, "hostIfaceMbps", s.wan.hostIfaceBw);
    s.wan.hostsPerRouter = integer(t, path, "hostsPerRouter", 1);
    if (s.wan.hostsPerRouter < 1) throw ScenarioError(at(path, "hostsPerRouter"), "must be at least 1");
    s.wan.hostRes = s.host;
    std::set<std::string> names(s.wan.routers.begin(), s.wan.routers.end());
    if (names.empty()) throw ScenarioError(at(path, "routers"), "no routers declared");
    for (std::size_t i = 0; i < s.wan.edges.size(); ++i) {
      for (const auto* end : {&s.wan.edges[i].a, &s.wan.edges[i].b}) {
        if (!names.count(*end)) throw ScenarioError(at(at(path, "edges"), i), "unknown router " + *end);
      }
    }
  } else if (s.type == "custom") {
    const auto& hosts = array(t, path, "hosts");
    for (std::size_t i = 0; i < hosts.size(); ++i) {
      const auto p = at(at(path, "hosts"), i);
      CustomHost h;
      h.name = text(hosts[i], p, "name", std::nullopt);
      h.ifaceBw = positiveBw(hosts[i], p, "ifaceMbps", 10e9);
      h.res = hostResources(hosts[i], p, s.host);
      s.hosts.push_back(h);
    }
    const auto& sws = array(t, path, "switches");
    for (std::size_t i = 0; i < sws.size(); ++i) {
      if (!sws[i].is_string()) throw ScenarioError(at(at(path, "switches"), i), "expected a switch name");
      s.switches.push_back(sws[i].get<std::string>());
    }
    std::set<std::string> names;
    for (const auto& h : s.hosts) names.insert(h.name);
    for (const auto& w : s.switches) names.insert(w);
    const auto& links = array(t, path, "links");
    for (std::size_t i = 0; i < links.size(); ++i) {
      const auto p = at(at(path, "links"), i);
      CustomLink l{text(links[i], p, "a", std::nullopt), text(links[i], p, "b", std::nullopt),
                   positiveBw(links[i], p, "mbps", std::numeric_limits<double>::quiet_NaN())};
      if (!names.count(l.a)) throw ScenarioError(at(p, "a"), "unknown node " + l.a);
      if (!names.count(l.b)) throw ScenarioError(at(p, "b"), "unknown node " + l.b);
      s.links.push_back(l);
    }
    if (s.hosts.empty()) throw ScenarioError(at(path, "hosts"), "no hosts declared");
  } else {
    throw ScenarioError(at(path, "type"), "expected fattree, wan or custom");
  }
  return s;
}

json topologyJson(const TopologySpec& s) {
  json t = {{"type", s.type}, {"host", hostJson(s.host)}};
  if (s.type == "fattree") {
    t["pods"] = s.pods;
    t["hostIfaceMbps"] = s.hostIfaceBw / kMbps;
    t["linkMbps"] = s.linkBw / kMbps;
  } else if (s.type == "wan") {
    t["aarnet"] = s.aarnet;
    t["routers"] = s.wan.routers;
    json edges = json::array();
    for (const auto& e : s.wan.edges) {
      json j = {{"a", e.a}, {"b", e.b}};
      if (e.capacity) j["mbps"] = *e.capacity / kMbps;
      edges.push_back(j);
    }
    t["edges"] = edges;
    t["routerLinkMbps"] = s.wan.routerLinkBw / kMbps;
    t["gatewayMbps"] = s.wan.gatewayBw / kMbps;
    t["hostIfaceMbps"] = s.wan.hostIfaceBw / kMbps;
    t["hostsPerRouter"] = s.wan.hostsPerRouter;
  } else {
    json hosts = json::array();
    for (const auto& h : s.hosts) {
      json j = hostJson(h.res);
      j["name"] = h.name;
      j["ifaceMbps"] = h.ifaceBw / kMbps;
      hosts.push_back(j);
    }
    t["hosts"] = hosts;
    t["switches"] = s.switches;
    json links = json::array();
    for (const auto& l : s.links) links.push_back({{"a", l.a}, {"b", l.b}, {"mbps", l.capacity / kMbps}});
    t["links"] = links;
  }
  return t;
}

json fromYaml(const YAML::Node& n) {
  switch (n.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
      return nullptr;
    case YAML::NodeType::Sequence: {
      json a = json::array();
      for (const auto& e : n) a.push_back(fromYaml(e));
      return a;
    }
    case YAML::NodeType::Map: {
      json o = json::object();
      for (const auto& kv : n) o[kv.first.as<std::string>()] = fromYaml(kv.second);
      return o;
    }
    case YAML::NodeType::Scalar: {
      const std::string s = n.Scalar();
      if (n.Tag() == "!") return s;  // quoted
      if (s == "true" || s == "True") return true;
      if (s == "false" || s == "False") return false;
      if (s == "~" || s == "null") return nullptr;
      try {
        std::size_t used = 0;
        const long long i = std::stoll(s, &used);
        if (used == s.size()) return i;
      } catch (...) {
      }
      try {
        std::size_t used = 0;
        const double d = std::stod(s, &used);
        if (used == s.size()) return d;
      } catch (...) {
      }
      return s;
    }
  }
  return nullptr;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string opt(const std::optional<double>& v) { return v ? num(*v) : ""; }

}  // namespace

Scenario scenarioFromJson(const json& doc) {
  if (!doc.is_object()) throw ScenarioError("(root)", "expected an object");
  Scenario s;
  s.name = text(doc, "", "name", "scenario");
  s.seed = static_cast<std::uint64_t>(integer(doc, "", "seed", 1));
  s.horizon = number(doc, "", "horizon", 600.0);
  if (!(s.horizon > 0.0)) throw ScenarioError("horizon", "must be positive");
  try {
    s.policy = parsePolicy(text(doc, "", "policy", "ratio"));
  } catch (const std::invalid_argument& e) {
    throw ScenarioError("policy", e.what());
  }
  const json* topo = find(doc, "", "topology");
  if (!topo) throw ScenarioError("topology", "required field missing");
  s.topology = parseTopology(*topo, "topology");
  if (find(doc, "", "paths")) {
    s.paths = integer(doc, "", "paths", 1);
    if (*s.paths < 1) throw ScenarioError("paths", "must be at least 1");
  }

  s.flavors = standardFlavors();
  if (const json* fl = find(doc, "", "flavors")) {
    if (!fl->is_object()) throw ScenarioError("flavors", "expected an object keyed by flavor name");
    for (const auto& [name, f] : fl->items()) {
      const auto p = at("flavors", name);
      Flavor flv{name, number(f, p, "memoryGB", std::nullopt) * kGB, integer(f, p, "cores", 1),
                 number(f, p, "diskGB", 0.0) * kGB};
      if (!(flv.memoryBytes > 0.0)) throw ScenarioError(at(p, "memoryGB"), "must be positive");
      if (flv.cores < 1) throw ScenarioError(at(p, "cores"), "must be at least 1");
      s.flavors[name] = flv;
    }
  }

  s.model.resumeTime = 0.25 * s.model.postTime;
  if (const json* m = find(doc, "", "model")) {
    s.model.compression = number(*m, "model", "compression", s.model.compression);
    s.model.downtimeThreshold = number(*m, "model", "downtimeThreshold", s.model.downtimeThreshold);
    s.model.maxRounds = integer(*m, "model", "maxRounds", s.model.maxRounds);
    s.model.preTime = number(*m, "model", "preTime", s.model.preTime);
    s.model.postTime = number(*m, "model", "postTime", s.model.postTime);
    s.model.resumeTime = number(*m, "model", "resumeTime", 0.25 * s.model.postTime);
  }
  s.model.memoryBits = 1.0;  // placeholder so validate() checks the remaining fields
  try {
    s.model.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError("model", e.what());
  }
  s.model.memoryBits = 0.0;

  if (const json* w = find(doc, "", "weights")) {
    s.weights.alpha = number(*w, "weights", "alpha", s.weights.alpha);
    s.weights.beta = number(*w, "weights", "beta", s.weights.beta);
    s.weights.gamma = number(*w, "weights", "gamma", s.weights.gamma);
    s.weights.a = number(*w, "weights", "a", s.weights.a);
    s.weights.b = number(*w, "weights", "b", 1.0 - s.weights.a);
    const auto slack = text(*w, "weights", "slack", "urgent");
    if (slack != "urgent" && slack != "literal") throw ScenarioError("weights.slack", "expected urgent or literal");
    s.weights.literalSlack = slack == "literal";
  }
  try {
    s.weights.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError("weights", e.what());
  }

  s.planner.horizon = s.horizon;
  if (const json* p = find(doc, "", "planner")) {
    s.planner.mergeEnabled = flag(*p, "planner", "merge", true);
    s.planner.mergeMaxMemoryBits = number(*p, "planner", "mergeMaxMemoryGB", 4.0) * kGB * 8.0;
    s.planner.mergeMaxSigma = number(*p, "planner", "mergeMaxSigma", 0.1);
    if (find(*p, "planner", "parallelCap")) {
      s.planner.parallelCap = integer(*p, "planner", "parallelCap", 1);
      if (*s.planner.parallelCap < 1) throw ScenarioError("planner.parallelCap", "must be at least 1");
    }
  }
  s.planner.pathsPerTask = s.pathCount();

  if (const json* p = find(doc, "", "power")) {
    s.power.hostIdle = number(*p, "power", "hostIdle", s.power.hostIdle);
    s.power.hostPeak = number(*p, "power", "hostPeak", s.power.hostPeak);
    s.power.switchStatic = number(*p, "power", "switchStatic", s.power.switchStatic);
    s.power.switchPort = number(*p, "power", "switchPort", s.power.switchPort);
    if (s.power.hostPeak < s.power.hostIdle) throw ScenarioError("power.hostPeak", "must be at least hostIdle");
  }

  const auto& vts = array(doc, "", "virtualTopologies");
  for (std::size_t i = 0; i < vts.size(); ++i) {
    const auto p = at("virtualTopologies", i);
    VTopologyEntry v;
    v.name = text(vts[i], p, "name", "vt" + std::to_string(i));
    try {
      v.kind = parseTopologyKind(text(vts[i], p, "kind", "single"));
    } catch (const std::invalid_argument& e) {
      throw ScenarioError(at(p, "kind"), e.what());
    }
    v.groupDeadline = optNumber(vts[i], p, "groupDeadline");
    const auto& insts = array(vts[i], p, "instances");
    for (std::size_t k = 0; k < insts.size(); ++k) {
      const auto q = at(at(p, "instances"), k);
      InstanceEntry e;
      e.name = text(insts[k], q, "name", std::nullopt);
      e.flavor = text(insts[k], q, "flavor", std::nullopt);
      if (!s.flavors.count(e.flavor)) throw ScenarioError(at(q, "flavor"), "unknown flavor " + e.flavor);
      e.host = text(insts[k], q, "host", std::nullopt);
      e.dirtyRate = number(insts[k], q, "dirtyRateMbps", 0.0) * kMbps;
      e.mipo = optNumber(insts[k], q, "mipo");
      v.instances.push_back(e);
    }
    const auto& links = array(vts[i], p, "links");
    for (std::size_t k = 0; k < links.size(); ++k) {
      const auto q = at(at(p, "links"), k);
      VLinkEntry l{text(links[k], q, "src", std::nullopt), text(links[k], q, "dst", std::nullopt),
                   number(links[k], q, "mbps", std::nullopt) * kMbps};
      if (!(l.reserved > 0.0)) throw ScenarioError(at(q, "mbps"), "reservation must be positive");
      v.links.push_back(l);
    }
    s.virtualTopologies.push_back(v);
  }

  std::set<TaskId> ids;
  const auto& migs = array(doc, "", "migrations");
  for (std::size_t i = 0; i < migs.size(); ++i) {
    const auto p = at("migrations", i);
    MigrationEntry m;
    m.id = integer(migs[i], p, "id", static_cast<int>(i));
    if (!ids.insert(m.id).second) throw ScenarioError(at(p, "id"), "duplicate migration id");
    m.instance = text(migs[i], p, "instance", std::nullopt);
    m.destination = text(migs[i], p, "destination", std::nullopt);
    m.deadline = optNumber(migs[i], p, "deadline");
    m.arrival = number(migs[i], p, "arrival", 0.0);
    if (const json* slo = find(migs[i], p, "slo")) {
      const auto q = at(p, "slo");
      m.slo = SloTracker{number(*slo, q, "threshold", std::nullopt), number(*slo, q, "violations", 0.0),
                         number(*slo, q, "rate", std::nullopt, true)};
    }
    if (find(migs[i], p, "actualDirtyRateMbps")) {
      m.actualDirtyRate = number(migs[i], p, "actualDirtyRateMbps", std::nullopt) * kMbps;
    }
    s.migrations.push_back(m);
  }

  const auto& wls = array(doc, "", "workloads");
  for (std::size_t i = 0; i < wls.size(); ++i) {
    const auto p = at("workloads", i);
    WorkloadEntry w;
    const auto& chain = array(wls[i], p, "chain");
    for (std::size_t k = 0; k < chain.size(); ++k) {
      if (!chain[k].is_string()) throw ScenarioError(at(at(p, "chain"), k), "expected an instance name");
      w.chain.push_back(chain[k].get<std::string>());
    }
    if (w.chain.size() < 2) throw ScenarioError(at(p, "chain"), "needs at least two instances");
    w.rate = number(wls[i], p, "rate", 20.0);
    if (!(w.rate > 0.0)) throw ScenarioError(at(p, "rate"), "must be positive");
    w.packetBits = number(wls[i], p, "packetMbits", 5.0) * kMbps;
    if (!(w.packetBits > 0.0)) throw ScenarioError(at(p, "packetMbits"), "must be positive");
    w.senderLoad = number(wls[i], p, "senderLoad", 200.0);
    w.receiverLoad = number(wls[i], p, "receiverLoad", 200.0);
    w.start = number(wls[i], p, "start", 0.0);
    w.end = optNumber(wls[i], p, "end");
    s.workloads.push_back(w);
  }

  const auto& order = array(doc, "", "order");
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto p = at("order", i);
    if (!order[i].is_array()) throw ScenarioError(p, "expected a list of migration ids");
    std::vector<TaskId> g;
    for (std::size_t k = 0; k < order[i].size(); ++k) {
      if (!order[i][k].is_number_integer()) throw ScenarioError(at(p, k), "expected a migration id");
      const auto id = order[i][k].get<TaskId>();
      if (!ids.count(id)) throw ScenarioError(at(p, k), "unknown migration id " + std::to_string(id));
      g.push_back(id);
    }
    s.order.push_back(g);
  }

  // Cross references are resolved by building once.
  buildInput(s);
  return s;
}

json scenarioToJson(const Scenario& s) {
  json doc;
  doc["name"] = s.name;
  doc["seed"] = s.seed;
  doc["horizon"] = s.horizon;
  doc["policy"] = toString(s.policy);
  doc["topology"] = topologyJson(s.topology);
  doc["paths"] = s.pathCount();
  json flavors = json::object();
  for (const auto& [name, f] : s.flavors) {
    flavors[name] = {{"memoryGB", f.memoryBytes / kGB}, {"cores", f.cores}, {"diskGB", f.diskBytes / kGB}};
  }
  doc["flavors"] = flavors;
  doc["model"] = {{"compression", s.model.compression}, {"downtimeThreshold", s.model.downtimeThreshold},
                  {"maxRounds", s.model.maxRounds},     {"preTime", s.model.preTime},
                  {"postTime", s.model.postTime},       {"resumeTime", s.model.resumeTime}};
  doc["weights"] = {{"alpha", s.weights.alpha}, {"beta", s.weights.beta}, {"gamma", s.weights.gamma},
                    {"a", s.weights.a},         {"b", s.weights.b},       {"slack", s.weights.literalSlack ? "literal" : "urgent"}};
  json planner = {{"merge", s.planner.mergeEnabled},
                  {"mergeMaxMemoryGB", s.planner.mergeMaxMemoryBits / kGB / 8.0},
                  {"mergeMaxSigma", s.planner.mergeMaxSigma}};
  if (s.planner.parallelCap) planner["parallelCap"] = *s.planner.parallelCap;
  doc["planner"] = planner;
  doc["power"] = {{"hostIdle", s.power.hostIdle}, {"hostPeak", s.power.hostPeak},
                  {"switchStatic", s.power.switchStatic}, {"switchPort", s.power.switchPort}};
  json vts = json::array();
  for (const auto& v : s.virtualTopologies) {
    json j = {{"name", v.name}, {"kind", toString(v.kind)}};
    if (v.groupDeadline) j["groupDeadline"] = *v.groupDeadline;
    json insts = json::array();
    for (const auto& e : v.instances) {
      json i = {{"name", e.name}, {"flavor", e.flavor}, {"host", e.host}, {"dirtyRateMbps", e.dirtyRate / kMbps}};
      if (e.mipo) i["mipo"] = *e.mipo;
      insts.push_back(i);
    }
    j["instances"] = insts;
    json links = json::array();
    for (const auto& l : v.links) links.push_back({{"src", l.src}, {"dst", l.dst}, {"mbps", l.reserved / kMbps}});
    j["links"] = links;
    vts.push_back(j);
  }
  doc["virtualTopologies"] = vts;
  json migs = json::array();
  for (const auto& m : s.migrations) {
    json j = {{"id", m.id}, {"instance", m.instance}, {"destination", m.destination}, {"arrival", m.arrival}};
    if (m.deadline) j["deadline"] = *m.deadline;
    if (m.slo) j["slo"] = {{"threshold", m.slo->threshold}, {"violations", m.slo->violations}, {"rate", m.slo->rate}};
    if (m.actualDirtyRate) j["actualDirtyRateMbps"] = *m.actualDirtyRate / kMbps;
    migs.push_back(j);
  }
  doc["migrations"] = migs;
  json wls = json::array();
  for (const auto& w : s.workloads) {
    json j = {{"chain", w.chain},           {"rate", w.rate},         {"packetMbits", w.packetBits / kMbps},
              {"senderLoad", w.senderLoad}, {"receiverLoad", w.receiverLoad}, {"start", w.start}};
    if (w.end) j["end"] = *w.end;
    wls.push_back(j);
  }
  doc["workloads"] = wls;
  doc["order"] = s.order;
  return doc;
}

json loadDocument(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ScenarioError(file.string(), "cannot open file");
  const auto ext = file.extension().string();
  if (ext == ".yaml" || ext == ".yml") {
    try {
      return fromYaml(YAML::Load(in));
    } catch (const YAML::Exception& e) {
      throw ScenarioError(file.string(), std::string("malformed YAML: ") + e.what());
    }
  }
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ScenarioError(file.string(), std::string("malformed JSON: ") + e.what());
  }
}

Scenario parseScenario(const std::filesystem::path& file) { return scenarioFromJson(loadDocument(file)); }

PhysicalTopology buildTopology(const TopologySpec& spec) {
  if (spec.type == "fattree") return buildFatTree(spec.pods, spec.hostIfaceBw, spec.linkBw, spec.host);
  if (spec.type == "wan") {
    auto wan = spec.wan;
    wan.hostRes = spec.host;
    return buildWan(wan);
  }
  PhysicalTopology t;
  for (const auto& h : spec.hosts) {
    if (t.find(h.name)) throw ScenarioError("topology.hosts", "duplicate node " + h.name);
    t.addHost(h.name, h.res, h.ifaceBw);
  }
  for (const auto& s : spec.switches) {
    if (t.find(s)) throw ScenarioError("topology.switches", "duplicate node " + s);
    t.addSwitch(s);
  }
  for (const auto& l : spec.links) t.connect(t.require(l.a), t.require(l.b), l.capacity);
  if (!t.hostsConnected()) throw ScenarioError("topology.links", "hosts are not all connected");
  return t;
}

SimulationInput buildInput(const Scenario& s) {
  auto topo = std::make_shared<const PhysicalTopology>(buildTopology(s.topology));
  SimulationInput in{Datacenter(topo, s.policy), {}, {}, {}, {}, {}, 3600.0, 1, {}, false};
  auto& dc = in.dc;
  auto hostOf = [&](const std::string& name, const std::string& path) {
    auto id = topo->find(name);
    if (!id || !topo->isHost(*id)) throw ScenarioError(path, "unknown host " + name);
    return *id;
  };
  auto instOf = [&](const std::string& name, const std::string& path) {
    auto id = dc.findInstance(name);
    if (!id) throw ScenarioError(path, "unknown instance " + name);
    return *id;
  };
  for (std::size_t i = 0; i < s.virtualTopologies.size(); ++i) {
    const auto& v = s.virtualTopologies[i];
    const auto p = at("virtualTopologies", i);
    const int t = dc.addTopology(v.name, v.kind, v.groupDeadline);
    for (std::size_t k = 0; k < v.instances.size(); ++k) {
      const auto& e = v.instances[k];
      const auto q = at(at(p, "instances"), k);
      try {
        dc.addInstance(t, e.name, s.flavors.at(e.flavor), hostOf(e.host, at(q, "host")), e.dirtyRate, e.mipo);
      } catch (const CapacityError& err) {
        throw ScenarioError(at(q, "host"), err.what());
      } catch (const std::invalid_argument& err) {
        throw ScenarioError(q, err.what());
      }
    }
    for (std::size_t k = 0; k < v.links.size(); ++k) {
      const auto& l = v.links[k];
      const auto q = at(at(p, "links"), k);
      try {
        dc.addVirtualLink(instOf(l.src, at(q, "src")), instOf(l.dst, at(q, "dst")), l.reserved);
      } catch (const std::invalid_argument& err) {
        throw ScenarioError(q, err.what());
      }
    }
  }
  std::set<InstanceId> moving;
  for (std::size_t i = 0; i < s.migrations.size(); ++i) {
    const auto& m = s.migrations[i];
    const auto p = at("migrations", i);
    MigrationRequest r;
    r.id = m.id;
    r.instance = instOf(m.instance, at(p, "instance"));
    r.destination = hostOf(m.destination, at(p, "destination"));
    if (!moving.insert(r.instance).second) throw ScenarioError(at(p, "instance"), "instance migrated twice");
    if (dc.instance(r.instance).host == r.destination) {
      throw ScenarioError(at(p, "destination"), "instance already on " + m.destination);
    }
    r.deadline = m.deadline;
    r.slo = m.slo;
    r.arrival = m.arrival;
    r.actualDirtyRate = m.actualDirtyRate;
    in.requests.push_back(r);
  }
  for (std::size_t i = 0; i < s.workloads.size(); ++i) {
    const auto& w = s.workloads[i];
    const auto p = at("workloads", i);
    WorkloadStream ws;
    for (std::size_t k = 0; k < w.chain.size(); ++k) ws.chain.push_back(instOf(w.chain[k], at(at(p, "chain"), k)));
    for (std::size_t k = 0; k + 1 < ws.chain.size(); ++k) {
      try {
        chainLink(dc, ws.chain[k], ws.chain[k + 1]);
      } catch (const std::invalid_argument& err) {
        throw ScenarioError(at(p, "chain"), err.what());
      }
    }
    ws.rate = w.rate;
    ws.packetBits = w.packetBits;
    ws.senderLoad = w.senderLoad;
    ws.receiverLoad = w.receiverLoad;
    ws.start = w.start;
    ws.end = w.end.value_or(s.horizon);
    if (!(ws.end > ws.start)) throw ScenarioError(at(p, "end"), "must be after start");
    in.workloads.push_back(ws);
  }
  in.defaults = s.model;
  in.weights = s.weights;
  in.planner = s.planner;
  in.planner.horizon = s.horizon;
  in.planner.pathsPerTask = s.pathCount();
  in.horizon = s.horizon;
  in.seed = s.seed;
  in.imposedOrder = s.order;
  return in;
}

json summaryJson(const Scenario& scenario, const MetricsReport& r, bool timing) {
  json j;
  j["scenario"] = scenario.name;
  j["seed"] = scenario.seed;
  j["algorithm"] = r.algorithm;
  j["policy"] = r.policy;
  j["tasks"] = r.tasks;
  j["completed"] = r.completed;
  j["failed"] = r.failed;
  j["totalMigrationTime"] = r.totalMigrationTime;
  j["avgExecutionTime"] = r.avgExecutionTime;
  j["maxExecutionTime"] = r.maxExecutionTime;
  j["avgDowntime"] = r.avgDowntime;
  j["maxDowntime"] = r.maxDowntime;
  j["totalDowntime"] = r.totalDowntime;
  j["totalTransferredGB"] = r.totalTransferredBits / 8.0 / kGB;
  j["avgTransferredGB"] = r.avgTransferredBits / 8.0 / kGB;
  j["deadlineTasks"] = r.deadlineTasks;
  j["deadlineMisses"] = r.deadlineMisses;
  j["avgRemainingWindow"] = r.avgRemainingWindow ? json(*r.avgRemainingWindow) : json(nullptr);
  j["requests"] = r.requests;
  j["avgTransmissionTime"] = r.avgTransmissionTime ? json(*r.avgTransmissionTime) : json(nullptr);
  j["hostEnergyWh"] = r.hostEnergyWh;
  j["switchEnergyWh"] = r.switchEnergyWh;
  j["maxConcurrentMigrations"] = r.maxConcurrent;
  if (timing) j["plannerRuntime"] = r.plannerRuntime;
  return j;
}

std::string tasksCsv(const SimulationResult& result) {
  std::ostringstream out;
  out << "id,instance,source,destination,status,reason,unit,group,arrival,start,end,execution_time,downtime,"
         "transferred_gb,rounds,converged,deadline,remaining_window\n";
  for (const auto& t : result.tasks) {
    std::optional<double> window;
    if (t.deadline) window = *t.deadline - (t.status == TaskStatus::Completed ? t.end : result.horizonEnd);
    out << t.id << ',' << t.instance << ',' << t.source << ',' << t.destination << ',' << toString(t.status) << ','
        << t.reason << ',' << t.unit << ',' << t.group << ',' << num(t.arrival) << ',' << num(t.start) << ','
        << num(t.end) << ',' << num(t.executionTime()) << ',' << num(t.downtime) << ','
        << num(t.transferred / 8.0 / kGB) << ',' << t.rounds << ',' << (t.converged ? "true" : "false") << ','
        << opt(t.deadline) << ',' << opt(window) << '\n';
  }
  return out.str();
}

std::string traceJsonl(const SimulationResult& result) {
  std::ostringstream out;
  for (const auto& e : result.trace) {
    json j = {{"t", e.time}, {"kind", toString(e.kind)}, {"task", e.task}, {"detail", e.detail}};
    out << j.dump() << '\n';
  }
  return out.str();
}

std::string comparisonCsv(const std::vector<MetricsReport>& reports) {
  std::ostringstream out;
  out << "algorithm,policy,tasks,completed,failed,total_migration_time,avg_execution_time,avg_downtime,"
         "max_downtime,total_transferred_gb,deadline_misses,avg_remaining_window,avg_transmission_time,"
         "host_energy_wh,switch_energy_wh\n";
  for (const auto& r : reports) {
    out << r.algorithm << ',' << r.policy << ',' << r.tasks << ',' << r.completed << ',' << r.failed << ','
        << num(r.totalMigrationTime) << ',' << num(r.avgExecutionTime) << ',' << num(r.avgDowntime) << ','
        << num(r.maxDowntime) << ',' << num(r.totalTransferredBits / 8.0 / kGB) << ',' << r.deadlineMisses << ','
        << opt(r.avgRemainingWindow) << ',' << opt(r.avgTransmissionTime) << ',' << num(r.hostEnergyWh) << ','
        << num(r.switchEnergyWh) << '\n';
  }
  return out.str();
}

void emitReport(const std::filesystem::path& dir, const Scenario& scenario, const MetricsReport& report,
                const SimulationResult& result, bool trace, bool timing) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  auto write = [&](const char* name, const std::string& content) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << content;
  };
  write("summary.json", summaryJson(scenario, report, timing).dump(2) + "\n");
  write("tasks.csv", tasksCsv(result));
  if (trace) write("trace.jsonl", traceJsonl(result));
}

}  // namespace livemig
