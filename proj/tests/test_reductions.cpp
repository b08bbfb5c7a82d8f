#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "relu2/eval.hpp"
#include "relu2/reductions.hpp"
#include "relu2/trainer.hpp"

using namespace relu2;

namespace {

SetCoverInstance three_subsets() { return {3, {{1, 2}, {2, 3}, {3}}}; }

MonotoneCircuit single_gate(GateOp op) {
  MonotoneCircuit c;
  c.num_inputs = 2;
  c.gates.push_back({op, {1, 2}});
  c.output_wire = 3;
  return c;
}

Hypergraph four_cycle() { return {4, {{1, 2}, {2, 3}, {3, 4}, {4, 1}}}; }
Hypergraph triangle() { return {3, {{1, 2}, {2, 3}, {1, 3}}}; }

}  // namespace

TEST_CASE("set cover reduction shape and constants") {
  ReductionOutput out = reduce_set_cover(three_subsets());
  CHECK(out.dataset.dim() == 5);
  CHECK(out.dataset.size() == 8);
  CHECK(out.params.at("gamma") == doctest::Approx(0.01 / 9.0).epsilon(1e-15));

  // labels in [0,1], features in {-1,0,1}
  for (const WeightedSample& s : out.dataset.samples()) {
    CHECK(s.y >= 0.0);
    CHECK(s.y <= 1.0);
    for (double x : s.x) CHECK((x == 0.0 || x == 1.0 || x == -1.0));
  }

  // the label bound for k = 1 holds, but element samples leave the unit ball,
  // as does the intended witness
  BoundedReport rep = check_bounded(out.dataset, 1);
  CHECK_FALSE(rep.ok());
  for (const BoundedViolation& v : rep.violations) CHECK_FALSE(v.label_violation);

  CHECK_THROWS_AS(reduce_set_cover({0, {}}), ValidationError);
  CHECK_THROWS_AS(reduce_set_cover({2, {{1}}}), ValidationError);  // element 2 uncoverable
}

TEST_CASE("set cover witness achieves the completeness formula") {
  ReductionOutput out = reduce_set_cover(three_subsets());
  const double gamma = out.params.at("gamma");
  ReluNetwork w = setcover_witness(out.witness_recipe, {1, 2});
  CHECK(eval_loss(w, out.dataset) ==
        doctest::Approx(gamma * gamma * 2.0 / 8.0).epsilon(1e-12));

  // {T1, T3} also covers; {T2, T3} does not and must cost more
  ReluNetwork w13 = setcover_witness(out.witness_recipe, {1, 3});
  CHECK(eval_loss(w13, out.dataset) ==
        doctest::Approx(gamma * gamma * 2.0 / 8.0).epsilon(1e-12));
  ReluNetwork w23 = setcover_witness(out.witness_recipe, {2, 3});
  CHECK(eval_loss(w23, out.dataset) > gamma * gamma * 2.0 / 8.0 * 100.0);
}

TEST_CASE("set cover optimum equals the best cover size") {
  ReductionOutput out = reduce_set_cover(three_subsets());
  const double gamma = out.params.at("gamma");
  TrainOptions opts;
  TrainResult r = train_exact(out.dataset, 1, opts);
  CHECK(r.loss == doctest::Approx(gamma * gamma * 2.0 / 8.0).epsilon(1e-6));
}

TEST_CASE("circuit reduction constants and samples") {
  ReductionOutput and_out = reduce_mmcs(single_gate(GateOp::AND));
  CHECK(and_out.params.at("wires") == 3.0);
  CHECK(and_out.params.at("depth") == 1.0);
  CHECK(and_out.params.at("gamma") == doctest::Approx(1.0 / 900.0).epsilon(1e-15));
  CHECK(and_out.dataset.size() == 6);
  CHECK(and_out.certificate.at("opt_mmcs").get<int>() == 2);

  ReductionOutput or_out = reduce_mmcs(single_gate(GateOp::OR));
  CHECK(or_out.dataset.size() == 5);
  CHECK(or_out.certificate.at("opt_mmcs").get<int>() == 1);

  for (const WeightedSample& s : and_out.dataset.samples()) {
    CHECK(s.y >= 0.0);
    CHECK(s.y <= 1.0);
    for (double x : s.x) CHECK((x == 0.0 || x == 1.0 || x == -1.0));
  }

  MonotoneCircuit bad = single_gate(GateOp::AND);
  bad.gates[0].inputs = {1, 3};  // refers to its own output
  CHECK_THROWS_AS(reduce_mmcs(bad), ValidationError);
}

TEST_CASE("circuit trainer minimum matches opt * gamma^2 in total error") {
  for (GateOp op : {GateOp::AND, GateOp::OR}) {
    ReductionOutput out = reduce_mmcs(single_gate(op));
    const double gamma = out.params.at("gamma");
    const int opt = out.certificate.at("opt_mmcs").get<int>();
    TrainOptions opts;
    TrainResult r = train_exact(out.dataset, 1, opts);
    const double total = r.loss * out.dataset.total_weight();
    CHECK(total == doctest::Approx(opt * gamma * gamma).epsilon(1e-6));

    // the witness from an optimal assignment reaches the exact total
    std::vector<bool> assignment =
        op == GateOp::AND ? std::vector<bool>{true, true} : std::vector<bool>{true, false};
    ReluNetwork w = mmcs_witness(out.witness_recipe, assignment);
    CHECK(eval_loss(w, out.dataset) * out.dataset.total_weight() ==
          doctest::Approx(opt * gamma * gamma).epsilon(1e-12));
  }
}

TEST_CASE("densest-subgraph parameters, weights, and witness decomposition") {
  // a positive-gap configuration: a perfect matching with degree one
  Hypergraph matching;
  matching.n = 1000;
  for (int i = 0; i < 500; ++i) matching.edges.push_back({2 * i + 1, 2 * i + 2});
  DksStructureReport rep = dks_structure_check(matching, 2, 500);
  CHECK(rep.params.epsilon > 0.0);
  CHECK(rep.params.max_degree == 1);
  CHECK(rep.params.delta == doctest::Approx(1.0 / (2.0 * std::sqrt(2.0))));

  // group weights land exactly on (1-zeta), (1-gamma)zeta, gamma*zeta
  CHECK(rep.group_weight_constant ==
        doctest::Approx(1.0 - rep.params.zeta).epsilon(1e-12));
  CHECK(rep.group_weight_cardinality ==
        doctest::Approx((1.0 - rep.params.gamma) * rep.params.zeta).epsilon(1e-12));
  CHECK(rep.group_weight_edge ==
        doctest::Approx(rep.params.gamma * rep.params.zeta).epsilon(1e-12));
  CHECK(rep.group_weight_constant + rep.group_weight_cardinality + rep.group_weight_edge ==
        doctest::Approx(1.0).epsilon(1e-12));

  CHECK(rep.max_sample_norm <= 1.0 + 1e-12);
  CHECK(rep.witness_norm == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.witness_lstar == 0.0);
  CHECK(rep.witness_lcard ==
        doctest::Approx(rep.params.lcard_completeness).epsilon(1e-9));
}

TEST_CASE("densest-subgraph four-cycle raises the non-positive gap error") {
  Hypergraph c4 = four_cycle();
  CHECK(dks_parameters(c4, 2, 1).epsilon < 0.0);
  CHECK_THROWS_AS(reduce_dks(c4, 2, 1), NonPositiveGapError);
  try {
    reduce_dks(c4, 2, 1);
  } catch (const NonPositiveGapError& e) {
    CHECK(e.epsilon < 0.0);  // the error carries the computed value
  }
}

TEST_CASE("densest-subgraph materialization matches the streamed structure") {
  Hypergraph matching;
  matching.n = 40;
  for (int i = 0; i < 20; ++i) matching.edges.push_back({2 * i + 1, 2 * i + 2});
  DksParams p = dks_parameters(matching, 2, 20);
  if (p.epsilon > 0.0) {
    ReductionOutput out = reduce_dks(matching, 2, 20);
    CHECK(out.dataset.dim() == 41);
    CHECK(out.dataset.size() == 1 + 40 + 20);
    CHECK(out.dataset.total_weight() == doctest::Approx(1.0).epsilon(1e-12));
  } else {
    CHECK_THROWS_AS(reduce_dks(matching, 2, 20), NonPositiveGapError);
  }

  // witness from params on a materialized variant evaluates consistently
  Hypergraph big = matching;
  DksStructureReport rep = dks_structure_check(big, 2, 20);
  ReluNetwork w = dks_witness_from_params(rep.params, {1, 2});
  CHECK(std::sqrt(squared_norm(w.unit_weights[0])) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("coloring reduction on the four-cycle") {
  ReductionOutput out = reduce_coloring(four_cycle(), 2);
  CHECK(out.dataset.dim() == 4);
  CHECK(out.dataset.size() == 8);
  CHECK(out.dataset.bounded());
  const double label = 1.0 / (2.0 * std::sqrt(8.0));
  CHECK(out.params.at("vertex_label") == doctest::Approx(label).epsilon(1e-15));
  CHECK(label == doctest::Approx(0.176777).epsilon(1e-5));

  // every sample lies in the unit ball
  CHECK(check_bounded(out.dataset, 2).ok());

  // a proper 2-coloring of the even cycle realizes the samples
  ReluNetwork w = coloring_witness(out.witness_recipe, {1, 2, 1, 2});
  CHECK(eval_loss(w, out.dataset) <= 1e-12);
  CHECK(squared_norm(w.unit_weights[0]) == doctest::Approx(0.5625).epsilon(1e-12));
  CHECK(squared_norm(w.unit_weights[1]) <= 1.0 + 1e-12);

  CHECK_THROWS_AS(reduce_coloring(Hypergraph{3, {{1, 2}}}, 2), ValidationError);  // isolated vertex
}

TEST_CASE("triangle soundness bound arithmetic") {
  ReductionOutput out = reduce_coloring(triangle(), 2);
  const double coeff = out.certificate.at("soundness_coefficient").get<double>();
  CHECK(coeff * (1.0 / 3.0) == doctest::Approx(1.0 / 115200.0).epsilon(1e-12));
}

TEST_CASE("coloring padding adds dummy vertices to every edge") {
  Hypergraph h3{4, {{1, 2, 3}, {2, 3, 4}}};
  CHECK(pad_coloring(h3, 2).n == 4);  // identity at k = 2

  Hypergraph padded = pad_coloring(h3, 3);
  CHECK(padded.n == 5);
  CHECK(padded.num_edges() == 2);
  for (const std::vector<int>& e : padded.edges) {
    CHECK(e.size() == 4);
    CHECK(e.back() == 5);
  }

  // 2-colorable input stays k-colorable: give the dummies fresh colors
  std::vector<int> coloring{1, 2, 1, 2, 3};
  for (const std::vector<int>& e : padded.edges) {
    bool mono = true;
    for (std::size_t i = 1; i < e.size(); ++i) mono = mono && coloring[e[i] - 1] == coloring[e[0] - 1];
    CHECK_FALSE(mono);
  }

  // at k = 2 the padding is the identity, so monochromatic counts transfer
  // exactly; checked exhaustively on a 4-vertex input
  Hypergraph tiny{4, {{1, 2, 3}, {2, 3, 4}}};
  Hypergraph ptiny = pad_coloring(tiny, 2);
  for (int mask = 0; mask < 16; ++mask) {
    std::vector<int> pc(4);
    for (int v = 0; v < 4; ++v) pc[v] = ((mask >> v) & 1) + 1;
    int mono_in = 0, mono_out = 0;
    for (const std::vector<int>& e : tiny.edges) {
      bool mono = true;
      for (std::size_t i = 1; i < e.size(); ++i) mono = mono && pc[e[i] - 1] == pc[e[0] - 1];
      mono_in += mono;
    }
    for (const std::vector<int>& e : ptiny.edges) {
      bool mono = true;
      for (std::size_t i = 1; i < e.size(); ++i) mono = mono && pc[e[i] - 1] == pc[e[0] - 1];
      mono_out += mono;
    }
    CHECK(mono_in == mono_out);
  }

  CHECK_THROWS_AS(pad_coloring(four_cycle(), 3), ValidationError);  // not 3-uniform
}

TEST_CASE("general position generation") {
  Tolerances tol;
  const double c = 1.0 / (2.0 * std::sqrt(2.0));
  std::vector<std::vector<double>> pts =
      generate_general_position(2, 3, {c, c}, 0.005, 42, tol);
  REQUIRE(pts.size() == 3);
  for (const std::vector<double>& p : pts) {
    const double dx = p[0] - c, dy = p[1] - c;
    CHECK(std::sqrt(dx * dx + dy * dy) <= 0.005 + 1e-12);
  }
  // every pair is linearly independent
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      const double det = pts[i][0] * pts[j][1] - pts[i][1] * pts[j][0];
      CHECK(std::abs(det) > 1e-12);
    }

  // count == dim is a single subset
  std::vector<std::vector<double>> two =
      generate_general_position(2, 2, {c, c}, 0.005, 7, tol);
  CHECK(two.size() == 2);

  // identical seeds give identical points
  std::vector<std::vector<double>> again =
      generate_general_position(2, 3, {c, c}, 0.005, 42, tol);
  CHECK(again == pts);

  // the deterministic construction also passes the audit
  GeneralPositionOptions gp;
  gp.moment_curve = true;
  std::vector<std::vector<double>> mc =
      generate_general_position(2, 5, {c, c}, 0.005, 0, tol, gp);
  CHECK(mc.size() == 5);
}

TEST_CASE("gadget construction and tau") {
  ReductionOutput g = build_gadget(2, 5);
  CHECK(g.dataset.size() == 24);  // 3 sets of 2^k * k = 8 points
  CHECK(g.dataset.dim() == 2);
  CHECK(g.dataset.bounded());

  // the identity witness realizes the samples exactly
  ReluNetwork w = gadget_witness(g.witness_recipe);
  CHECK(eval_loss(w, g.dataset) == 0.0);

  REQUIRE_FALSE(g.certificate.at("tau").is_null());
  CHECK(g.certificate.at("tau").get<double>() > 0.0);

  // tau with identity rows: inner minimum is 1, so tau = 0.1/(k|S|)
  std::vector<std::vector<std::vector<double>>> identity_set = {
      {{1.0, 0.0}, {0.0, 1.0}}};
  std::optional<double> tau = compute_tau(identity_set, 2);
  REQUIRE(tau.has_value());
  CHECK(*tau == doctest::Approx(0.1 / (2.0 * 2.0)).epsilon(1e-12));

  // duplicating the sets halves tau through the 1/|S| prefactor
  std::vector<std::vector<std::vector<double>>> doubled = {identity_set[0], identity_set[0]};
  std::optional<double> tau2 = compute_tau(doubled, 2);
  REQUIRE(tau2.has_value());
  CHECK(*tau2 == doctest::Approx(*tau / 2.0).epsilon(1e-12));
}

TEST_CASE("simple-pair gadget variant") {
  GadgetOptions opt;
  opt.simple_pair = true;
  ReductionOutput g = build_gadget(2, 0, opt);
  CHECK(g.dataset.size() == 2);
  ReluNetwork w = gadget_witness(g.witness_recipe);
  CHECK(eval_loss(w, g.dataset) == 0.0);

  // at (1,1) the trainer realizes; every other coefficient vector pays >= 0.5
  TrainOptions topts;
  topts.bounded = true;
  topts.fixed_coeffs = std::vector<int>{1, 1};
  CHECK(train_exact(g.dataset, 2, topts).loss <= 1e-10);
  for (std::vector<int> a : {std::vector<int>{1, -1}, {-1, 1}, {-1, -1}}) {
    topts.fixed_coeffs = a;
    CHECK(train_exact(g.dataset, 2, topts).loss >= 0.5 - 1e-6);
  }
}

TEST_CASE("reduced gadget keeps a strictly positive floor for wrong signs") {
  GadgetOptions opt;
  opt.points_per_set = 2;
  ReductionOutput g = build_gadget(2, 11, opt);
  CHECK(g.dataset.size() == 6);

  TrainOptions topts;
  topts.bounded = true;
  topts.fixed_coeffs = std::vector<int>{1, 1};
  CHECK(train_exact(g.dataset, 2, topts).loss <= 1e-8);

  for (std::vector<int> a : {std::vector<int>{1, -1}, {-1, 1}, {-1, -1}}) {
    TrainOptions o = topts;
    o.fixed_coeffs = a;
    // record the floor with the grid oracle first, then confirm the trainer
    TrainResult oracle = brute_force_oracle(g.dataset, 2, 0.1, 1.0, o);
    TrainResult exact = train_exact(g.dataset, 2, o);
    CHECK(exact.loss > 1e-9);
    CHECK(exact.loss <= oracle.loss + 1e-8);
    CHECK(oracle.loss <= exact.loss + oracle_grid_resolution_bound(g.dataset, 2, 0.1) + 1e-3);
  }
}

TEST_CASE("composition embeds the halves with equal weight") {
  Hypergraph path{2, {{1, 2}}};
  ReductionOutput base = reduce_coloring(path, 2);
  GadgetOptions opt;
  opt.simple_pair = true;
  ReductionOutput gadget = build_gadget(2, 0, opt);

  ReductionOutput comp = compose_reduction(base, gadget);
  CHECK(comp.dataset.dim() == base.dataset.dim() + 2);
  CHECK(comp.dataset.size() == base.dataset.size() + gadget.dataset.size());

  double first_half = 0.0, second_half = 0.0;
  for (std::size_t i = 0; i < comp.dataset.size(); ++i) {
    const double w = comp.dataset.samples()[i].weight;
    if (i < base.dataset.size())
      first_half += w;
    else
      second_half += w;
  }
  CHECK(first_half == doctest::Approx(second_half).epsilon(1e-12));
  CHECK(first_half ==
        doctest::Approx(0.5 * comp.dataset.total_weight()).epsilon(1e-12));

  // the composed witness realizes the composed samples within the ball
  ReluNetwork base_w = coloring_witness(base.witness_recipe, {1, 2});
  ReluNetwork comp_w = compose_witness(comp.witness_recipe, base_w);
  CHECK(eval_loss(comp_w, comp.dataset) <= 1e-12);
  for (const std::vector<double>& u : comp_w.unit_weights)
    CHECK(squared_norm(u) <= 1.0 + 1e-12);

  CHECK_THROWS_AS(compose_with_gadget(base.dataset, 3, gadget), ValidationError);
}

TEST_CASE("composed minimum splits over the independent halves") {
  Hypergraph path{2, {{1, 2}}};
  ReductionOutput base = reduce_coloring(path, 2);
  GadgetOptions opt;
  opt.simple_pair = true;
  ReductionOutput gadget = build_gadget(2, 0, opt);
  ReductionOutput comp = compose_reduction(base, gadget);

  // halved-label copies of each half as standalone datasets
  auto halved = [](const Dataset& d) {
    std::vector<WeightedSample> s = d.samples();
    for (WeightedSample& e : s) e.y *= 0.5;
    return Dataset(d.dim(), d.bounded(), std::move(s));
  };
  Dataset base_half = halved(base.dataset);
  Dataset gadget_half = halved(gadget.dataset);

  for (std::vector<int> a : {std::vector<int>{1, 1}, {1, -1}, {-1, -1}}) {
    TrainOptions o;  // unbounded: the halves then optimize independently
    o.fixed_coeffs = a;
    const double whole = train_exact(comp.dataset, 2, o).loss;
    const double left = train_exact(base_half, 2, o).loss;
    const double right = train_exact(gadget_half, 2, o).loss;
    CHECK(whole == doctest::Approx(0.5 * left + 0.5 * right).epsilon(1e-8));

    TrainOptions ob = o;
    ob.bounded = true;
    CHECK(train_exact(comp.dataset, 2, ob).loss >= whole - 1e-9);
  }

  // with a negative coefficient the gadget half keeps the loss positive
  TrainOptions neg;
  neg.bounded = true;
  neg.fixed_coeffs = std::vector<int>{1, -1};
  CHECK(train_exact(comp.dataset, 2, neg).loss > 1e-6);
}
