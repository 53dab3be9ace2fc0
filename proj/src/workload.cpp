#include "livemig/workload.hpp"

#include <random>
#include <stdexcept>

namespace livemig {

namespace {

double positiveNormal(std::mt19937_64& rng, double mean, double sd) {
  std::normal_distribution<double> dist(mean, sd);
  for (;;) {
    const double v = dist(rng);
    if (v > 0.0) return v;
  }
}

}  // namespace

std::vector<Request> generateRequests(const WorkloadStream& stream, int streamIndex, std::uint64_t seed) {
  if (!(stream.rate > 0.0)) throw std::invalid_argument("workload rate must be positive");
  if (!(stream.end > stream.start)) throw std::invalid_argument("workload window must be non-empty");
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(streamIndex)};
  std::mt19937_64 rng(seq);
  std::exponential_distribution<double> gap(stream.rate);
  std::vector<Request> out;
  double t = stream.start;
  for (;;) {
    t += gap(rng);
    if (t >= stream.end) break;
    Request r;
    r.stream = streamIndex;
    r.arrival = t;
    r.senderLoad = positiveNormal(rng, stream.senderLoad, 0.2 * stream.senderLoad);
    r.packetBits = positiveNormal(rng, stream.packetBits, 0.1 * stream.packetBits);
    r.receiverLoad = positiveNormal(rng, stream.receiverLoad, 0.2 * stream.receiverLoad);
    out.push_back(r);
  }
  return out;
}

VLinkId chainLink(const Datacenter& dc, InstanceId a, InstanceId b) {
  for (VLinkId l : dc.incidentLinks(a)) {
    const auto& v = dc.virtualLinks()[static_cast<std::size_t>(l)];
    if ((v.src == a && v.dst == b) || (v.src == b && v.dst == a)) return l;
  }
  throw std::invalid_argument("no virtual link between " + dc.instance(a).name + " and " + dc.instance(b).name);
}

double RequestRecord::transmissionTime() const {
  double t = 0.0;
  for (const auto& h : hops) t += h.end - h.start;
  return t;
}

std::optional<double> measureTransmission(const std::vector<RequestRecord>& records) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : records) {
    if (r.completion < 0.0) continue;
    sum += r.transmissionTime();
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

}  // namespace livemig
