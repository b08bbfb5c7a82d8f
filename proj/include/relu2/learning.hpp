#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include "relu2/trainer.hpp"
#include "relu2/types.hpp"

namespace relu2 {

struct LearnParams {
  int k = 1;
  double epsilon = 1.0;  // additive loss accuracy, in (0, 1]
  double delta = 1.0;    // failure probability, in (0, 1]
  double c_smooth = 1.0; // absolute constant of the realizable bound

  void validate() const {
    if (k < 1) throw ValidationError("unit count must be positive");
    if (!(epsilon > 0.0) || epsilon > 1.0) throw ValidationError("epsilon must be in (0, 1]");
    if (!(delta > 0.0) || delta > 1.0) throw ValidationError("delta must be in (0, 1]");
    if (!(c_smooth >= 1.0)) throw ValidationError("the smoothness constant must be at least 1");
  }
};

/// ceil(1024 k^4 (1 + ln(1/delta)) / eps^2)
std::int64_t sample_complexity_agnostic(const LearnParams& p);

/// ceil(1e6 C k^2 ln^3(10 C k / eps) / eps + 8 k^2 ln(1/delta) / eps)
std::int64_t sample_complexity_realizable(const LearnParams& p);

/// 2k / sqrt(m)
double rademacher_bound(int k, std::int64_t m);

/// 4 L R_m + 2 b sqrt(ln(1/delta)/m) with L = 2k and b = 4k^2:
/// 16 k^2 / sqrt(m) + 8 k^2 sqrt(ln(1/delta)/m)
double generalization_gap_bound(int k, std::int64_t m, double delta);

/// Produces one labelled draw; every draw must satisfy ||x|| <= 1, |y| <= k.
using SampleSource =
    std::function<std::pair<std::vector<double>, double>(std::mt19937_64& rng)>;

struct LearnOutcome {
  ReluNetwork network;
  TrainResult train;
  std::int64_t m_requested = 0;  // from the complexity formula
  std::int64_t m_used = 0;       // after capping at the trainer budget
  bool capped = false;           // guarantees degrade when capped
};

/// Draws m samples per the appropriate complexity formula (capped at the
/// trainer's enumeration budget with an explicit flag) and trains exactly.
/// Proper: the output is itself a k-ReLU network.
LearnOutcome learn(const SampleSource& source, const LearnParams& p, bool realizable,
                   const TrainOptions& topts, std::uint64_t seed);

}  // namespace relu2
