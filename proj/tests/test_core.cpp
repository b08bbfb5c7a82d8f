#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "relu2/eval.hpp"
#include "relu2/json_io.hpp"
#include "relu2/rng.hpp"

using namespace relu2;

namespace {

ReluNetwork unit_network(std::vector<double> w, int coeff = 1) {
  ReluNetwork net;
  net.k = 1;
  net.coeffs = {coeff};
  net.unit_weights = {std::move(w)};
  return net;
}

Dataset two_point_line() {
  return Dataset(1, false, {{{1.0}, 1.0, 1.0}, {{-1.0}, 1.0, 1.0}});
}

}  // namespace

TEST_CASE("eval_network basics") {
  ReluNetwork net = unit_network({1.0, 0.0});
  CHECK(eval_network(net, std::vector<double>{0.5, 0.3}) == doctest::Approx(0.5));

  ReluNetwork pair;  // [t]+ - [-t]+ composes to the identity in coordinate 0
  pair.k = 2;
  pair.coeffs = {1, -1};
  pair.unit_weights = {{1.0, 0.0}, {-1.0, 0.0}};
  for (double t : {-2.0, -0.5, 0.0, 0.25, 3.0})
    CHECK(eval_network(pair, std::vector<double>{t, 0.0}) == doctest::Approx(t));

  pair.coeffs = {1, 1};
  CHECK(eval_network(pair, std::vector<double>{-1.0, 0.0}) == doctest::Approx(1.0));

  CHECK_THROWS_AS(eval_network(net, std::vector<double>{1.0}), ValidationError);
}

TEST_CASE("eval_loss basics and weight-scaling invariance") {
  ReluNetwork net = unit_network({1.0});
  Dataset data = two_point_line();
  CHECK(eval_loss(net, data) == doctest::Approx(0.5));

  // self-consistent labels give zero loss
  ReluNetwork other = unit_network({0.7, -0.2});
  std::vector<double> x{0.4, 0.9};
  Dataset self(2, false, {{x, eval_network(other, x), 1.0}});
  CHECK(eval_loss(other, self) == doctest::Approx(0.0));

  // scaling all weights by c > 0 leaves the value unchanged
  std::mt19937_64 rng(3);
  for (double c : {0.25, 3.0, 1e6}) {
    std::vector<WeightedSample> scaled;
    for (const WeightedSample& s : data.samples())
      scaled.push_back({s.x, s.y, s.weight * c});
    Dataset sd(1, false, scaled);
    CHECK(eval_loss(net, sd) ==
          doctest::Approx(eval_loss(net, data)).epsilon(1e-12));
  }
  (void)rng;
}

TEST_CASE("normalize_coefficients absorbs magnitudes") {
  ReluNetwork net = normalize_coefficients({2.0, -0.5}, {{1.0, 0.0}, {0.0, 1.0}});
  CHECK(net.coeffs == std::vector<int>{1, -1});
  CHECK(net.unit_weights[0][0] == doctest::Approx(2.0));
  CHECK(net.unit_weights[1][1] == doctest::Approx(0.5));

  ReluNetwork same = normalize_coefficients({1.0, 1.0}, {{1.0, 0.0}, {0.0, 1.0}});
  CHECK(same.coeffs == std::vector<int>{1, 1});
  CHECK(same.unit_weights[0][0] == doctest::Approx(1.0));

  CHECK_THROWS_AS(normalize_coefficients({0.0}, {{1.0}}), ValidationError);
}

TEST_CASE("normalize_coefficients is pointwise exact on random inputs") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 1 + static_cast<int>(rng() % 3);
    const int n = 1 + static_cast<int>(rng() % 4);
    std::vector<double> coeffs(k);
    std::vector<std::vector<double>> weights(k, std::vector<double>(n));
    for (int j = 0; j < k; ++j) {
      do {
        coeffs[j] = uniform_range(rng, -3.0, 3.0);
      } while (coeffs[j] == 0.0);
      for (int t = 0; t < n; ++t) weights[j][t] = uniform_range(rng, -2.0, 2.0);
    }
    ReluNetwork normalized = normalize_coefficients(coeffs, weights);

    std::vector<double> x(n);
    for (int t = 0; t < n; ++t) x[t] = uniform_range(rng, -2.0, 2.0);
    double raw = 0.0;
    for (int j = 0; j < k; ++j) {
      double pre = 0.0;
      for (int t = 0; t < n; ++t) pre += weights[j][t] * x[t];
      raw += coeffs[j] * std::max(pre, 0.0);
    }
    CHECK(eval_network(normalized, x) == doctest::Approx(raw).epsilon(1e-12));
  }
}

TEST_CASE("check_bounded reports norm and label violations") {
  Dataset ok(2, false, {{{0.6, 0.8}, 1.0, 1.0}, {{0.0, 0.0}, -1.0, 1.0}});
  CHECK(check_bounded(ok, 1).ok());

  Dataset bad(2, false, {{{2.0, 0.0}, 0.5, 1.0}});
  BoundedReport rep = check_bounded(bad, 1);
  REQUIRE(rep.violations.size() == 1);
  CHECK(rep.violations[0].norm_violation);
  CHECK_FALSE(rep.violations[0].label_violation);

  Dataset big_label(1, false, {{{0.5}, 3.0, 1.0}});
  CHECK_FALSE(check_bounded(big_label, 2).ok());
  CHECK(check_bounded(big_label, 3).ok());
}

TEST_CASE("pad_dimensions extends with zeros and preserves losses") {
  Dataset data(2, false, {{{1.0, 0.0}, 1.0, 1.0}, {{0.0, 1.0}, 0.5, 2.0}});
  Dataset padded = pad_dimensions(data, 5);
  CHECK(padded.dim() == 5);
  CHECK(padded.samples()[0].x == std::vector<double>{1.0, 0.0, 0.0, 0.0, 0.0});

  ReluNetwork net = unit_network({0.3, -0.7});
  ReluNetwork extended = unit_network({0.3, -0.7, 9.0, -4.0, 2.0});
  CHECK(eval_loss(extended, padded) == doctest::Approx(eval_loss(net, data)));

  CHECK_THROWS_AS(pad_dimensions(data, 1), ValidationError);
}

TEST_CASE("appending a zero-weight unit leaves the loss unchanged") {
  Dataset data = two_point_line();
  ReluNetwork net = unit_network({1.0});
  ReluNetwork grown = net;
  grown.k = 2;
  grown.coeffs.push_back(-1);
  grown.unit_weights.push_back({0.0});
  CHECK(eval_loss(grown, data) == doctest::Approx(eval_loss(net, data)));
}

TEST_CASE("dataset invariants are enforced") {
  CHECK_THROWS_AS(Dataset(1, false, {}), ValidationError);
  CHECK_THROWS_AS(Dataset(1, false, {{{1.0}, 0.0, 0.0}}), ValidationError);
  CHECK_THROWS_AS(Dataset(2, false, {{{1.0}, 0.0, 1.0}}), ValidationError);
  CHECK_THROWS_AS(Dataset(1, true, {{{2.0}, 0.0, 1.0}}), ValidationError);

  Dataset d(1, false, {{{1.0}, 0.0, 0.5}, {{2.0}, 1.0, 0.25}});
  CHECK(d.total_weight() == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("dataset and network json round trips") {
  Dataset data(2, true, {{{0.6, 0.8}, 1.0, 2.0}, {{0.0, 0.0}, -0.5, 1.0}});
  Dataset back = dataset_from_json(dataset_to_json(data));
  CHECK(back.dim() == data.dim());
  CHECK(back.bounded() == data.bounded());
  REQUIRE(back.size() == data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK(back.samples()[i].x == data.samples()[i].x);
    CHECK(back.samples()[i].y == data.samples()[i].y);
    CHECK(back.samples()[i].weight == data.samples()[i].weight);
  }

  // weights default to 1.0 when omitted
  nlohmann::json j = {{"dim", 1}, {"samples", {{{"x", {0.25}}, {"y", 1.0}}}}};
  Dataset defaulted = dataset_from_json(j);
  CHECK(defaulted.samples()[0].weight == 1.0);

  ReluNetwork net;
  net.k = 2;
  net.coeffs = {1, -1};
  net.unit_weights = {{0.1, -0.2}, {1.0 / 3.0, 0.7}};
  ReluNetwork nb = network_from_json(network_to_json(net));
  CHECK(nb.coeffs == net.coeffs);
  CHECK(nb.unit_weights == net.unit_weights);  // exact round trip of doubles
}
