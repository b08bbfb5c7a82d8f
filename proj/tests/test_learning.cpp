#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "relu2/eval.hpp"
#include "relu2/learning.hpp"

using namespace relu2;

namespace {

// independent direct evaluations of the complexity formulas, kept separate
// from the implementation path they check
std::int64_t agnostic_direct(int k, double eps, double delta) {
  return static_cast<std::int64_t>(
      std::ceil(1024.0 * std::pow(k, 4) * (1.0 + std::log(1.0 / delta)) / (eps * eps)));
}

std::int64_t realizable_direct(int k, double eps, double delta, double c) {
  const double lg = std::log(10.0 * c * k / eps);
  return static_cast<std::int64_t>(std::ceil(
      1e6 * c * k * k * lg * lg * lg / eps + 8.0 * k * k * std::log(1.0 / delta) / eps));
}

}  // namespace

TEST_CASE("agnostic sample complexity") {
  CHECK(sample_complexity_agnostic({1, 1.0, 1.0, 1.0}) == 1024);

  // frozen from the direct evaluation
  CHECK(sample_complexity_agnostic({1, 0.1, 0.5, 1.0}) == agnostic_direct(1, 0.1, 0.5));
  CHECK(sample_complexity_agnostic({3, 0.25, 0.1, 1.0}) == agnostic_direct(3, 0.25, 0.1));

  // monotone: larger eps or delta never needs more samples
  CHECK(sample_complexity_agnostic({2, 0.5, 0.5, 1.0}) >=
        sample_complexity_agnostic({2, 1.0, 0.5, 1.0}));
  CHECK(sample_complexity_agnostic({2, 0.5, 0.1, 1.0}) >=
        sample_complexity_agnostic({2, 0.5, 0.5, 1.0}));
}

TEST_CASE("realizable sample complexity") {
  // delta = 1 kills the second term
  LearnParams p{2, 0.5, 1.0, 1.0};
  const double lg = std::log(10.0 * 2 / 0.5);
  CHECK(sample_complexity_realizable(p) ==
        static_cast<std::int64_t>(std::ceil(1e6 * 4.0 * lg * lg * lg / 0.5)));

  CHECK(sample_complexity_realizable({2, 0.5, 0.5, 1.0}) == realizable_direct(2, 0.5, 0.5, 1.0));
  CHECK(sample_complexity_realizable({1, 0.01, 0.25, 2.0}) ==
        realizable_direct(1, 0.01, 0.25, 2.0));
}

TEST_CASE("realizable growth is near-linear in 1/eps, agnostic is quadratic") {
  for (int k : {1, 2}) {
    double prev_agn = 0, prev_real = 0;
    for (double eps : {0.1, 0.01, 0.001}) {
      const double agn = static_cast<double>(sample_complexity_agnostic({k, eps, 1.0, 1.0}));
      const double real = static_cast<double>(sample_complexity_realizable({k, eps, 1.0, 1.0}));
      if (prev_agn > 0) {
        CHECK(agn / prev_agn >= 99.0);      // quadratic: x100 per decade
        CHECK(real / prev_real <= 50.0);    // near-linear: x10 polylog per decade
        CHECK(real / prev_real < agn / prev_agn);
      }
      prev_agn = agn;
      prev_real = real;
    }
  }
}

TEST_CASE("rademacher bound") {
  CHECK(rademacher_bound(1, 1) == doctest::Approx(2.0));
  CHECK(rademacher_bound(3, 36) == doctest::Approx(1.0));
  CHECK(rademacher_bound(2, 400) == doctest::Approx(2.0 * rademacher_bound(2, 1600)));
}

TEST_CASE("generalization gap bound") {
  // delta = 1 removes the deviation term: 16 k^2 / sqrt(m)
  CHECK(generalization_gap_bound(2, 64, 1.0) == doctest::Approx(16.0 * 4.0 / 8.0));

  // monotone decreasing in m
  CHECK(generalization_gap_bound(1, 100, 0.5) > generalization_gap_bound(1, 1000, 0.5));
}

TEST_CASE("gap bound at the agnostic sample size against eps/2") {
  // At delta = 1 the bound meets eps/2 exactly; at delta = 0.1 it is below.
  // At delta = 0.5 the two formulas genuinely cross: the bound exceeds eps/2
  // by a factor of about 1.088 for every k and eps, because
  // (2 + sqrt(L)) / (4 sqrt(1 + L)) > 1/2 near L = ln 2. The checks record
  // the actual behavior per delta.
  for (int k : {1, 2, 3, 4}) {
    for (double eps : {1.0, 0.5, 0.1}) {
      const double at1 =
          generalization_gap_bound(k, sample_complexity_agnostic({k, eps, 1.0, 1.0}), 1.0);
      CHECK(at1 <= eps / 2.0 + 1e-12);

      const double at01 =
          generalization_gap_bound(k, sample_complexity_agnostic({k, eps, 0.1, 1.0}), 0.1);
      CHECK(at01 <= eps / 2.0);

      const double at05 =
          generalization_gap_bound(k, sample_complexity_agnostic({k, eps, 0.5, 1.0}), 0.5);
      CHECK(at05 / (eps / 2.0) == doctest::Approx(1.0883).epsilon(1e-3));
    }
  }
}

TEST_CASE("learn draws, caps, and trains properly") {
  // point mass at a realizable sample: population loss equals training loss
  SampleSource point_mass = [](std::mt19937_64&) {
    return std::make_pair(std::vector<double>{1.0, 0.0}, 0.5);
  };
  LearnParams p{1, 1.0, 1.0, 1.0};
  TrainOptions topts;
  LearnOutcome out = learn(point_mass, p, /*realizable=*/true, topts, 3);
  CHECK(out.capped);                      // formula m is far beyond the budget
  CHECK(out.m_used <= topts.enumeration_cap_bits);
  validate_network(out.network, /*bounded=*/true);
  Dataset pop(2, true, {{{1.0, 0.0}, 0.5, 1.0}});
  CHECK(eval_loss(out.network, pop) <= 1e-6);

  // two-point source: learned loss lands near one half
  SampleSource two_point = [](std::mt19937_64& rng) {
    const double sign = (rng() & 1u) ? 1.0 : -1.0;
    return std::make_pair(std::vector<double>{sign}, 1.0);
  };
  LearnParams p2{1, 1.0, 1.0, 1.0};
  LearnOutcome out2 = learn(two_point, p2, false, topts, 5);
  Dataset pop2(1, false, {{{1.0}, 1.0, 1.0}, {{-1.0}, 1.0, 1.0}});
  CHECK(eval_loss(out2.network, pop2) == doctest::Approx(0.5).epsilon(0.26));

  // unbounded draws are rejected per sample
  SampleSource bad = [](std::mt19937_64&) {
    return std::make_pair(std::vector<double>{2.0}, 0.0);
  };
  CHECK_THROWS_AS(learn(bad, p, false, topts, 0), ValidationError);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(sample_complexity_agnostic({0, 1.0, 1.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(sample_complexity_agnostic({1, 0.0, 1.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(sample_complexity_agnostic({1, 1.0, 1.5, 1.0}), ValidationError);
  CHECK_THROWS_AS(generalization_gap_bound(1, 0, 1.0), ValidationError);
}
