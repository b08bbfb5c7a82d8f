#include <algorithm>
#include <cmath>

#include "relu2/reductions.hpp"

namespace relu2 {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488016887242097;

void require_dks_inputs(const Hypergraph& graph, int kappa, int ell) {
  graph.validate(/*require_graph=*/true);
  if (graph.num_edges() < 1) throw ValidationError("graph must have at least one edge");
  if (kappa < 2) throw ValidationError("kappa must be at least 2");
  if (ell < 1) throw ValidationError("edge target must be at least 1");
}
}  // namespace

DksParams dks_parameters(const Hypergraph& graph, int kappa, int ell) {
  require_dks_inputs(graph, kappa, ell);
  DksParams p;
  p.N = graph.n;
  p.M = graph.num_edges();
  p.max_degree = graph.max_degree();
  p.kappa = kappa;
  p.ell = ell;
  const double d = static_cast<double>(p.max_degree);
  p.delta = 1.0 / (2.0 * std::sqrt(static_cast<double>(kappa)));
  p.gamma = 1.0 / (1000.0 * d);
  p.zeta = 1.0 / (1e10 * d * d);
  const double N = p.N, M = p.M, dl = p.delta, g = p.gamma, z = p.zeta;
  p.lcard_completeness =
      (1.0 - g) * z * (1.0 - kappa * dl / (kSqrt2 * N) + kappa * dl * dl / (8.0 * N));
  p.opt = p.lcard_completeness +
          g * z * (1.0 - ell * dl / (2.0 * kSqrt2 * M) + ell * dl * dl / (32.0 * M));
  p.epsilon = g * z * ell * dl / (4.0 * kSqrt2 * M) -
              (1.0 - g) * z * kappa * dl * dl / (8.0 * N) -
              g * z * ell * dl * dl / (32.0 * M);
  p.weight_constant = 1.0 - z;
  p.weight_cardinality = (1.0 - g) * z;
  p.weight_edge = g * z;
  return p;
}

void dks_visit_samples(const Hypergraph& graph, const DksParams& p,
                       const std::function<void(const std::vector<double>& x, double y,
                                                double weight)>& visit) {
  const int star = p.N;  // coordinate N is the constant coordinate
  std::vector<double> x(p.N + 1, 0.0);

  x[star] = 1.0;
  visit(x, 1.0 / kSqrt2, p.weight_constant);
  x[star] = 0.0;

  const double wv = p.weight_cardinality / p.N;
  for (int v = 0; v < p.N; ++v) {
    x[v] = 0.5;
    x[star] = -0.5 * p.delta;
    visit(x, 1.0, wv);
    x[v] = 0.0;
  }
  x[star] = 0.0;

  const double we = p.weight_edge / p.M;
  for (const std::vector<int>& e : graph.edges) {
    x[e[0] - 1] = 0.5;
    x[e[1] - 1] = 0.5;
    x[star] = -0.5 * 3.5 * p.delta;
    visit(x, 1.0, we);
    x[e[0] - 1] = 0.0;
    x[e[1] - 1] = 0.0;
  }
}

ReluNetwork dks_witness_from_params(const DksParams& p, const std::vector<int>& vertex_set) {
  if (static_cast<int>(vertex_set.size()) != p.kappa)
    throw ValidationError("witness vertex set must have exactly kappa vertices");
  ReluNetwork net;
  net.k = 1;
  net.coeffs = {1};
  net.unit_weights = {std::vector<double>(p.N + 1, 0.0)};
  net.unit_weights[0][p.N] = 1.0 / kSqrt2;
  for (int v : vertex_set) {
    if (v < 1 || v > p.N) throw ValidationError("witness vertex out of range");
    net.unit_weights[0][v - 1] = p.delta * kSqrt2;
  }
  return net;
}

DksStructureReport dks_structure_check(const Hypergraph& graph, int kappa, int ell) {
  DksStructureReport r;
  r.params = dks_parameters(graph, kappa, ell);
  const DksParams& p = r.params;

  r.group_weight_constant = p.weight_constant;
  double acc = 0.0;
  for (int v = 0; v < p.N; ++v) acc += p.weight_cardinality / p.N;
  r.group_weight_cardinality = acc;
  acc = 0.0;
  for (int e = 0; e < p.M; ++e) acc += p.weight_edge / p.M;
  r.group_weight_edge = acc;

  // per-kind norms (each group's samples share one norm)
  const double vertex_norm = 0.5 * std::sqrt(1.0 + p.delta * p.delta);
  const double edge_norm = 0.5 * std::sqrt(2.0 + 3.5 * 3.5 * p.delta * p.delta);
  r.max_sample_norm = std::max({1.0, vertex_norm, edge_norm});

  // witness on the lexicographically first kappa-subset, evaluated through
  // the nonzero coordinates only
  std::vector<int> first(kappa);
  for (int i = 0; i < kappa; ++i) first[i] = i + 1;
  ReluNetwork w = dks_witness_from_params(p, first);
  const std::vector<double>& wv = w.unit_weights[0];
  const double wstar = wv[p.N];
  r.witness_norm = std::sqrt(squared_norm(wv));

  const double relu_star = std::max(wstar, 0.0);
  r.witness_lstar = p.weight_constant * (1.0 / kSqrt2 - relu_star) * (1.0 / kSqrt2 - relu_star);
  double lcard = 0.0;
  for (int v = 0; v < p.N; ++v) {
    const double pre = 0.5 * (wv[v] - p.delta * wstar);
    const double resid = 1.0 - std::max(pre, 0.0);
    lcard += (p.weight_cardinality / p.N) * resid * resid;
  }
  r.witness_lcard = lcard;
  double ledge = 0.0;
  for (const std::vector<int>& e : graph.edges) {
    const double pre = 0.5 * (wv[e[0] - 1] + wv[e[1] - 1] - 3.5 * p.delta * wstar);
    const double resid = 1.0 - std::max(pre, 0.0);
    ledge += (p.weight_edge / p.M) * resid * resid;
  }
  r.witness_ledge = ledge;
  return r;
}

ReductionOutput reduce_dks(const Hypergraph& graph, int kappa, int ell) {
  DksParams p = dks_parameters(graph, kappa, ell);
  if (!(p.epsilon > 0.0)) throw NonPositiveGapError(p.epsilon);

  const double entries = (static_cast<double>(p.N) + 1.0) * (1.0 + p.N + p.M);
  if (entries > 2e8)
    throw BudgetError("dense materialization needs " + std::to_string(entries) +
                          " matrix entries; use the structure check at this scale",
                      entries, 2e8);

  std::vector<WeightedSample> samples;
  samples.reserve(1 + p.N + p.M);
  dks_visit_samples(graph, p, [&](const std::vector<double>& x, double y, double weight) {
    samples.push_back({x, y, weight});
  });

  ReductionOutput out{Dataset(p.N + 1, true, std::move(samples)), "dks", {}, {}, {}};
  out.params = {{"N", static_cast<double>(p.N)},
                {"M", static_cast<double>(p.M)},
                {"d", static_cast<double>(p.max_degree)},
                {"kappa", static_cast<double>(p.kappa)},
                {"ell", static_cast<double>(p.ell)},
                {"delta", p.delta},
                {"gamma", p.gamma},
                {"zeta", p.zeta},
                {"k", 1.0},
                {"n", static_cast<double>(p.N + 1)},
                {"m", static_cast<double>(1 + p.N + p.M)}};
  out.certificate = {{"mode", "dks-gap"},
                     {"opt", p.opt},
                     {"epsilon", p.epsilon},
                     {"lstar_completeness", 0.0},
                     {"lcard_completeness", p.lcard_completeness},
                     {"group_weights",
                      {{"constant", p.weight_constant},
                       {"cardinality", p.weight_cardinality},
                       {"edge", p.weight_edge}}}};
  out.witness_recipe = {{"type", "dks"},
                        {"coord_star", p.N},
                        {"delta", p.delta},
                        {"kappa", p.kappa},
                        {"w_star", 1.0 / kSqrt2},
                        {"w_in_set", p.delta * kSqrt2}};
  return out;
}

ReluNetwork dks_witness(const nlohmann::json& recipe, const std::vector<int>& vertex_set) {
  if (recipe.at("type") != "dks")
    throw ValidationError("witness recipe is not a densest-subgraph recipe");
  DksParams p;
  p.N = recipe.at("coord_star").get<int>();
  p.kappa = recipe.at("kappa").get<int>();
  p.delta = recipe.at("delta").get<double>();
  return dks_witness_from_params(p, vertex_set);
}

}  // namespace relu2
