// Seeded random scenarios for property tests and scaling runs.

#pragma once

#include <cstdint>

#include "livemig/simulator.hpp"

namespace livemig {

struct GeneratorOptions {
  int pods = 4;
  int tasks = 10;
  int hostPool = 0;  // draw sources and destinations from the first hostPool hosts; 0 = all
  double linkBw = 10e9;
  double maxDirtyRate = 1.5e9;      // bits/s
  double vlinkProbability = 0.3;    // chance each migrating instance gets a service peer link
  double deadlineProbability = 0.0;
  SharingPolicy policy = SharingPolicy::Ratio;
  double horizon = 3600.0;
};

SimulationInput randomScenario(std::uint64_t seed, const GeneratorOptions& options);

}  // namespace livemig
