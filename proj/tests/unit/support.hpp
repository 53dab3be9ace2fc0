#pragma once

#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "livemig/scenario.hpp"

namespace support {

using nlohmann::json;

// Custom topology: hosts H1..Hn on one switch S1, all links `mbps`.
inline json star(int hosts, double mbps = 10000) {
  json t = {{"type", "custom"}, {"switches", {"S1"}}, {"hosts", json::array()}, {"links", json::array()}};
  for (int i = 1; i <= hosts; ++i) {
    const std::string h = "H" + std::to_string(i);
    t["hosts"].push_back({{"name", h}, {"ifaceMbps", mbps}});
    t["links"].push_back({{"a", h}, {"b", "S1"}, {"mbps", mbps}});
  }
  return t;
}

// Hosts H1..H<left> on S1, the next <right> on S2, one S1-S2 link.
inline json twoTier(int left, int right, double coreMbps = 10000) {
  json t = {{"type", "custom"}, {"switches", {"S1", "S2"}}, {"hosts", json::array()}, {"links", json::array()}};
  for (int i = 1; i <= left + right; ++i) {
    const std::string h = "H" + std::to_string(i);
    t["hosts"].push_back({{"name", h}});
    t["links"].push_back({{"a", h}, {"b", i <= left ? "S1" : "S2"}, {"mbps", 10000}});
  }
  t["links"].push_back({{"a", "S1"}, {"b", "S2"}, {"mbps", coreMbps}});
  return t;
}

inline json instance(const std::string& name, const std::string& flavor, const std::string& host, double mbps) {
  return {{"name", name}, {"flavor", flavor}, {"host", host}, {"dirtyRateMbps", mbps}};
}

inline json migration(int id, const std::string& inst, const std::string& dst) {
  return {{"id", id}, {"instance", inst}, {"destination", dst}};
}

// One virtual topology per instance, no links.
inline json singles(const std::vector<json>& instances) {
  json vts = json::array();
  for (const auto& i : instances) vts.push_back({{"name", i["name"]}, {"instances", {i}}});
  return vts;
}

inline livemig::Scenario scenario(json doc) {
  if (!doc.contains("name")) doc["name"] = "unit";
  return livemig::scenarioFromJson(doc);
}

inline livemig::SimulationInput input(const json& doc) { return livemig::buildInput(scenario(doc)); }

inline std::string fixture(const std::string& name) { return std::string(LIVEMIG_FIXTURES) + "/" + name; }

inline const livemig::TaskRecord& task(const livemig::SimulationResult& r, livemig::TaskId id) {
  for (const auto& t : r.tasks) {
    if (t.id == id) return t;
  }
  FAIL("no task " << id);
  return r.tasks.front();
}

}  // namespace support
