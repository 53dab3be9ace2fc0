#include <cmath>

#include <doctest.h>

#include "livemig/workload.hpp"
#include "support.hpp"

using namespace livemig;
using support::json;

TEST_CASE("poisson arrivals and packet sizes") {
  WorkloadStream s;
  s.rate = 20.0;
  s.packetBits = 5e6;
  s.start = 0.0;
  s.end = 5000.0;
  const auto reqs = generateRequests(s, 0, 17);
  const double expected = s.rate * (s.end - s.start);
  CHECK(std::abs(static_cast<double>(reqs.size()) - expected) <= 3.0 * std::sqrt(expected));
  REQUIRE(reqs.size() > 90000);
  double gaps = 0.0;
  double bits = 0.0;
  for (std::size_t i = 0; i < reqs.size(); ++i) {
    gaps += reqs[i].arrival - (i ? reqs[i - 1].arrival : 0.0);
    bits += reqs[i].packetBits;
    CHECK(reqs[i].packetBits > 0.0);
    CHECK(reqs[i].senderLoad > 0.0);
  }
  CHECK(gaps / static_cast<double>(reqs.size()) == doctest::Approx(0.05).epsilon(0.05));
  CHECK(bits / static_cast<double>(reqs.size()) == doctest::Approx(5e6).epsilon(0.01));
  CHECK(generateRequests(s, 0, 17).size() == reqs.size());
}

TEST_CASE("arrival counts for several rates") {
  for (double rate : {1.0, 5.0, 50.0}) {
    WorkloadStream s;
    s.rate = rate;
    s.start = 10.0;
    s.end = 410.0;
    const auto reqs = generateRequests(s, 0, 3);
    const double expected = rate * 400.0;
    CHECK(std::abs(static_cast<double>(reqs.size()) - expected) <= 3.0 * std::sqrt(expected));
    for (const auto& r : reqs) {
      CHECK(r.arrival >= s.start);
      CHECK(r.arrival < s.end);
    }
  }
}

namespace {

SimulationResult pairTraffic(const std::string& hostB) {
  json vt = {{"name", "pair"},
             {"instances", {support::instance("a", "small", "H1", 0), support::instance("b", "small", hostB, 0)}},
             {"links", {{{"src", "a"}, {"dst", "b"}, {"mbps", 1000}}}}};
  json doc = {{"topology", support::star(2, 1000)},
              {"horizon", 40},
              {"virtualTopologies", {vt}},
              {"migrations", json::array()},
              {"workloads", {{{"chain", {"a", "b"}}, {"rate", 1}, {"start", 0}, {"end", 20}}}}};
  return runSimulation(support::input(doc), Algorithm::Slamig);
}

}  // namespace

TEST_CASE("dedicated gigabit path") {
  const auto r = pairTraffic("H2");
  REQUIRE_FALSE(r.requests.empty());
  for (const auto& req : r.requests) {
    REQUIRE(req.hops.size() == 1);
    CHECK(req.transmissionTime() == doctest::Approx(req.packetBits / 1e9));
  }
  CHECK(5e6 / 1e9 == doctest::Approx(0.005));
}

TEST_CASE("co-located pair") {
  const auto r = pairTraffic("H1");
  REQUIRE_FALSE(r.requests.empty());
  for (const auto& req : r.requests) CHECK(req.transmissionTime() <= 1e-9);
}

TEST_CASE("chain links") {
  json vt = {{"name", "pair"},
             {"instances", {support::instance("a", "small", "H1", 0), support::instance("b", "small", "H2", 0),
                            support::instance("c", "small", "H2", 0)}},
             {"links", {{{"src", "a"}, {"dst", "b"}, {"mbps", 100}}}}};
  json doc = {{"topology", support::star(2)}, {"virtualTopologies", {vt}}, {"migrations", json::array()}};
  const auto in = support::input(doc);
  CHECK(chainLink(in.dc, 0, 1) == 0);
  CHECK(chainLink(in.dc, 1, 0) == 0);
  CHECK_THROWS_AS(chainLink(in.dc, 0, 2), std::invalid_argument);
}

TEST_CASE("mean transmission") {
  CHECK_FALSE(measureTransmission({}).has_value());
  RequestRecord a;
  a.completion = 2.0;
  a.hops = {{0, 0.0, 0.5}, {1, 1.0, 1.25}};
  RequestRecord b;
  b.hops = {{0, 0.0, 9.0}};
  const auto m = measureTransmission({a, b});
  REQUIRE(m.has_value());
  CHECK(*m == doctest::Approx(0.75));
}
