// Synthetic application traffic.  A request is computed at the first
// instance of a chain, carried over each virtual link of the chain (with a
// VNF service stage at every intermediate instance) and computed again at
// the last instance.

#pragma once

#include <cstdint>
#include <vector>

#include "livemig/datacenter.hpp"

namespace livemig {

struct WorkloadStream {
  std::vector<InstanceId> chain;  // at least two instances, consecutive pairs joined by virtual links
  double rate = 20.0;             // requests/s
  double packetBits = 5e6;
  double senderLoad = 200.0;      // million instructions
  double receiverLoad = 200.0;
  double start = 0.0;
  double end = 0.0;               // arrivals are generated in [start, end)
};

struct Request {
  int stream = 0;
  double arrival = 0.0;
  double senderLoad = 0.0;
  double packetBits = 0.0;
  double receiverLoad = 0.0;
};

// Poisson arrivals; packet sizes ~ N(p, (0.1p)^2) and loads ~ N(l, (0.2l)^2),
// non-positive draws redrawn.  Deterministic for a given seed.
std::vector<Request> generateRequests(const WorkloadStream& stream, int streamIndex, std::uint64_t seed);

// Resolves the virtual link joining a -> b (either direction).  Throws
// std::invalid_argument if none exists.
VLinkId chainLink(const Datacenter& dc, InstanceId a, InstanceId b);

struct HopRecord {
  VLinkId vlink = -1;
  double start = 0.0;
  double end = 0.0;
};

struct RequestRecord {
  int stream = 0;
  double arrival = 0.0;
  double completion = -1.0;  // negative while unfinished
  double packetBits = 0.0;
  std::vector<HopRecord> hops;
  // Sum of hop durations; compute stages excluded.
  double transmissionTime() const;
};

// Mean transmission time over completed requests; empty when there are none.
std::optional<double> measureTransmission(const std::vector<RequestRecord>& records);

}  // namespace livemig
