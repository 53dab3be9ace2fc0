#include "livemig/migration_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace livemig {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("MigrationSpec: ") + what);
}

MigrationEstimate finish(const MigrationSpec& spec, MigrationEstimate est) {
  est.downtime = est.stopCopyTime + spec.resumeTime;
  est.totalTime = spec.preTime + est.memCopyTime + spec.postTime;
  return est;
}

// Round loop shared by the sigma >= 1 branch and simulateRounds.
MigrationEstimate iterate(const MigrationSpec& spec, const BandwidthProfile& profile) {
  MigrationEstimate est;
  double t = 0.0;
  double volume = spec.compression * spec.memoryBits;

  if (spec.dirtyRate == 0.0) {
    // Nothing is dirtied: the full copy runs live and the stop-and-copy is empty.
    t = profile.transferDuration(0.0, volume);
    est.rounds = 0;
    est.memCopyTime = t;
    est.transferredData = volume;
    est.converged = true;
    return finish(spec, est);
  }

  for (int round = 0;; ++round) {
    const bool capped = round >= spec.maxRounds;
    const bool belowThreshold = volume <= spec.downtimeThreshold * profile.rateAt(t);
    const double duration = profile.transferDuration(t, volume);
    est.transferredData += volume;
    if (capped || belowThreshold) {
      est.rounds = round;
      est.stopCopyVolume = volume;
      est.stopCopyTime = duration;
      est.memCopyTime = t + duration;
      est.converged = belowThreshold;
      return finish(spec, est);
    }
    t += duration;
    volume = roundVolume(spec, round + 1, duration);
  }
}

}  // namespace

void MigrationSpec::validate() const {
  require(memoryBits > 0.0, "memoryBits must be positive");
  require(dirtyRate >= 0.0, "dirtyRate must be non-negative");
  require(compression > 0.0 && compression <= 1.0, "compression must lie in (0, 1]");
  require(maxRounds >= 1, "maxRounds must be at least 1");
  require(downtimeThreshold >= 0.0, "downtimeThreshold must be non-negative");
  require(preTime >= 0.0 && postTime >= 0.0 && resumeTime >= 0.0, "times must be non-negative");
  require(resumeTime <= postTime, "resumeTime must not exceed postTime");
}

BandwidthProfile BandwidthProfile::constant(double rate) { return BandwidthProfile({{0.0, rate}}); }

BandwidthProfile::BandwidthProfile(std::vector<Step> steps) : steps_(std::move(steps)) {
  if (steps_.empty()) throw std::invalid_argument("BandwidthProfile: no steps");
  std::sort(steps_.begin(), steps_.end(), [](const Step& a, const Step& b) { return a.start < b.start; });
  steps_.front().start = 0.0;
  for (const auto& s : steps_) {
    if (!(s.rate >= 0.0)) throw std::invalid_argument("BandwidthProfile: negative rate");
  }
}

double BandwidthProfile::rateAt(double t) const {
  auto it = std::upper_bound(steps_.begin(), steps_.end(), t,
                             [](double v, const Step& s) { return v < s.start; });
  return std::prev(it)->rate;
}

double BandwidthProfile::transferDuration(double t, double bits) const {
  if (bits <= 0.0) return 0.0;
  auto it = std::prev(std::upper_bound(steps_.begin(), steps_.end(), t,
                                       [](double v, const Step& s) { return v < s.start; }));
  double now = t;
  double remaining = bits;
  for (;; ++it) {
    const auto next = std::next(it);
    const double rate = it->rate;
    if (next == steps_.end()) {
      if (rate <= 0.0) throw std::domain_error("BandwidthProfile: transfer never completes");
      return now + remaining / rate - t;
    }
    const double span = next->start - now;
    if (rate * span >= remaining && rate > 0.0) return now + remaining / rate - t;
    remaining -= rate * span;
    now = next->start;
  }
}

double roundVolume(const MigrationSpec& spec, int roundIndex, double prevRoundDuration) {
  if (roundIndex == 0) return spec.compression * spec.memoryBits;
  return spec.compression * prevRoundDuration * spec.dirtyRate;
}

bool isConvergent(const MigrationSpec& spec, double bandwidth) {
  return spec.compression * spec.dirtyRate < bandwidth;
}

MigrationEstimate estimateConstantRate(const MigrationSpec& spec, double bandwidth) {
  spec.validate();
  if (!(bandwidth > 0.0)) throw std::invalid_argument("estimateConstantRate: bandwidth must be positive");

  const double sigma = spec.compression * spec.dirtyRate / bandwidth;
  if (spec.dirtyRate == 0.0 || sigma >= 1.0) return iterate(spec, BandwidthProfile::constant(bandwidth));

  const double first = spec.compression * spec.memoryBits;
  const double threshold = spec.downtimeThreshold * bandwidth;

  // First round index whose volume first * sigma^i fits under the threshold.
  int rounds = 0;
  if (first > threshold) {
    const double guess = threshold > 0.0 ? std::ceil(std::log(threshold / first) / std::log(sigma))
                                         : static_cast<double>(spec.maxRounds);
    rounds = static_cast<int>(std::clamp(guess, 0.0, static_cast<double>(spec.maxRounds)));
    // log/ceil can land one off at exact boundaries
    while (rounds > 0 && first * std::pow(sigma, rounds - 1) <= threshold) --rounds;
    while (rounds < spec.maxRounds && first * std::pow(sigma, rounds) > threshold) ++rounds;
  }

  MigrationEstimate est;
  est.rounds = rounds;
  const double series = (1.0 - std::pow(sigma, rounds + 1)) / (1.0 - sigma);
  est.transferredData = first * series;
  est.memCopyTime = first / bandwidth * series;
  est.stopCopyVolume = first * std::pow(sigma, rounds);
  est.stopCopyTime = est.stopCopyVolume / bandwidth;
  est.converged = est.stopCopyVolume <= threshold;
  return finish(spec, est);
}

MigrationEstimate simulateRounds(const MigrationSpec& spec, const BandwidthProfile& profile) {
  spec.validate();
  return iterate(spec, profile);
}

}  // namespace livemig
