// Pre-copy live migration model.
//
// Units: memory and volumes in bits, rates in bits/s, times in seconds.
// Round i transfers V_i bits; V_0 is the (compressed) memory image and every
// later round re-sends what was dirtied while the previous round was on the
// wire.  Round n is the stop-and-copy round: the instance is paused while V_n
// is transferred.

#pragma once

#include <vector>

namespace livemig {

struct MigrationSpec {
  double memoryBits = 0.0;
  double dirtyRate = 0.0;           // bits/s
  double compression = 1.0;         // rho, (0, 1]
  double downtimeThreshold = 0.5;   // seconds
  int maxRounds = 30;               // Theta
  double preTime = 0.8;             // seconds
  double postTime = 1.2;            // seconds
  double resumeTime = 0.3;          // T'_post, part of postTime spent paused

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct MigrationEstimate {
  int rounds = 0;                // index of the stop-and-copy round
  double memCopyTime = 0.0;      // all rounds, stop-and-copy included
  double stopCopyVolume = 0.0;   // bits sent while paused
  double stopCopyTime = 0.0;
  double downtime = 0.0;         // stopCopyTime + resumeTime
  double transferredData = 0.0;  // sum of all round volumes
  double totalTime = 0.0;        // preTime + memCopyTime + postTime
  bool converged = false;        // stop-and-copy triggered by the threshold
};

// Piecewise-constant bandwidth over time, measured from the start of round 0.
// The last step extends forever.
class BandwidthProfile {
 public:
  struct Step {
    double start;
    double rate;
  };

  static BandwidthProfile constant(double rate);
  explicit BandwidthProfile(std::vector<Step> steps);

  double rateAt(double t) const;
  // Seconds needed to move `bits` starting at time t.
  double transferDuration(double t, double bits) const;
  const std::vector<Step>& steps() const { return steps_; }

 private:
  std::vector<Step> steps_;
};

// rho*M for round 0, rho*prevRoundDuration*R afterwards.
double roundVolume(const MigrationSpec& spec, int roundIndex, double prevRoundDuration);

// rho*R < L
bool isConvergent(const MigrationSpec& spec, double bandwidth);

// Closed-form estimate under constant bandwidth.  sigma >= 1 is evaluated
// round by round since the geometric series does not apply.
MigrationEstimate estimateConstantRate(const MigrationSpec& spec, double bandwidth);

// Round-by-round estimate against a time-varying bandwidth.  The
// stop-and-copy decision for round i compares V_i with the threshold times
// the bandwidth available when round i begins.
MigrationEstimate simulateRounds(const MigrationSpec& spec, const BandwidthProfile& profile);

}  // namespace livemig
