#include "relu2/learning.hpp"

#include <cmath>

#include "relu2/eval.hpp"

namespace relu2 {

std::int64_t sample_complexity_agnostic(const LearnParams& p) {
  p.validate();
  const double k = p.k;
  const double v =
      1024.0 * k * k * k * k * (1.0 + std::log(1.0 / p.delta)) / (p.epsilon * p.epsilon);
  return static_cast<std::int64_t>(std::ceil(v));
}

std::int64_t sample_complexity_realizable(const LearnParams& p) {
  p.validate();
  const double k = p.k;
  const double lg = std::log(10.0 * p.c_smooth * k / p.epsilon);
  const double v = 1e6 * p.c_smooth * k * k * lg * lg * lg / p.epsilon +
                   8.0 * k * k * std::log(1.0 / p.delta) / p.epsilon;
  return static_cast<std::int64_t>(std::ceil(v));
}

double rademacher_bound(int k, std::int64_t m) {
  if (k < 1 || m < 1) throw ValidationError("unit and sample counts must be positive");
  return 2.0 * k / std::sqrt(static_cast<double>(m));
}

double generalization_gap_bound(int k, std::int64_t m, double delta) {
  if (k < 1 || m < 1) throw ValidationError("unit and sample counts must be positive");
  if (!(delta > 0.0) || delta > 1.0) throw ValidationError("delta must be in (0, 1]");
  const double lipschitz = 2.0 * k;      // of the squared loss on [-k, k]
  const double bound = 4.0 * k * k;      // of the squared loss on [-k, k]
  return 4.0 * lipschitz * rademacher_bound(k, m) +
         2.0 * bound * std::sqrt(std::log(1.0 / delta) / static_cast<double>(m));
}

LearnOutcome learn(const SampleSource& source, const LearnParams& p, bool realizable,
                   const TrainOptions& topts, std::uint64_t seed) {
  p.validate();
  topts.validate(p.k);

  LearnOutcome out;
  out.m_requested =
      realizable ? sample_complexity_realizable(p) : sample_complexity_agnostic(p);
  // the formula's m is astronomically larger than any desk-scale enumeration;
  // cap it at the trainer budget and flag the degraded guarantee
  const std::int64_t m_cap = std::max<std::int64_t>(1, topts.enumeration_cap_bits / p.k);
  out.m_used = std::min(out.m_requested, m_cap);
  out.capped = out.m_used < out.m_requested;

  std::mt19937_64 rng(seed);
  std::vector<WeightedSample> samples;
  samples.reserve(static_cast<std::size_t>(out.m_used));
  for (std::int64_t i = 0; i < out.m_used; ++i) {
    auto [x, y] = source(rng);
    if (squared_norm(x) > 1.0 + 1e-12)
      throw ValidationError("sample source produced a feature vector outside the unit ball");
    if (std::abs(y) > static_cast<double>(p.k) + 1e-12)
      throw ValidationError("sample source produced a label outside [-k, k]");
    samples.push_back({std::move(x), y, 1.0});
  }

  TrainOptions bounded_opts = topts;
  bounded_opts.bounded = true;  // the learning setting is the bounded problem
  const int dim = static_cast<int>(samples[0].x.size());
  Dataset data(dim, true, std::move(samples));
  out.train = train_exact(data, p.k, bounded_opts);
  out.network = out.train.network;
  validate_network(out.network, /*bounded=*/true);
  return out;
}

}  // namespace relu2
