#include <algorithm>
#include <cmath>
#include <set>

#include "relu2/reductions.hpp"

namespace relu2 {

int Hypergraph::max_edge_size() const {
  int t = 0;
  for (const std::vector<int>& e : edges) t = std::max(t, static_cast<int>(e.size()));
  return t;
}

std::vector<int> Hypergraph::degrees() const {
  std::vector<int> deg(n, 0);
  for (const std::vector<int>& e : edges)
    for (int v : e) ++deg[v - 1];
  return deg;
}

int Hypergraph::max_degree() const {
  int d = 0;
  for (int x : degrees()) d = std::max(d, x);
  return d;
}

void Hypergraph::validate(bool require_graph) const {
  if (n < 1) throw ValidationError("hypergraph must have at least one vertex");
  for (const std::vector<int>& e : edges) {
    if (static_cast<int>(e.size()) < 2) throw ValidationError("edges must have size at least 2");
    if (require_graph && e.size() != 2) throw ValidationError("expected a 2-uniform graph");
    std::set<int> distinct;
    for (int v : e) {
      if (v < 1 || v > n) throw ValidationError("edge vertex out of range");
      if (!distinct.insert(v).second) throw ValidationError("edge repeats a vertex (self-loop)");
    }
  }
}

ReductionOutput reduce_coloring(const Hypergraph& h, int k) {
  h.validate();
  if (k < 2) throw ValidationError("color count must be at least 2");
  if (h.num_edges() < 1) throw ValidationError("hypergraph must have at least one edge");
  const int N = h.n;
  const int M = h.num_edges();
  const int t = h.max_edge_size();
  const std::vector<int> deg = h.degrees();
  for (int v = 0; v < N; ++v)
    if (deg[v] == 0)
      throw ValidationError("vertex " + std::to_string(v + 1) +
                            " is isolated (weight would vanish); remove it first");

  const double label = 1.0 / (t * std::sqrt(static_cast<double>(t) * N));
  const double inv_sqrt_t = 1.0 / std::sqrt(static_cast<double>(t));

  std::vector<WeightedSample> samples;
  samples.reserve(N + M);
  for (int v = 0; v < N; ++v) {
    WeightedSample s;
    s.x.assign(N, 0.0);
    s.x[v] = 1.0;
    s.y = label;
    s.weight = static_cast<double>(deg[v]);
    samples.push_back(std::move(s));
  }
  for (const std::vector<int>& e : h.edges) {
    WeightedSample s;
    s.x.assign(N, 0.0);
    for (int v : e) s.x[v - 1] = inv_sqrt_t;
    s.y = 0.0;
    samples.push_back(std::move(s));
  }

  const double sb_coeff =
      1.0 / (100.0 * k * k * std::pow(static_cast<double>(t), 5.0) * N);

  ReductionOutput out{Dataset(N, true, std::move(samples)), "coloring", {}, {}, {}};
  out.params = {{"N", static_cast<double>(N)},
                {"M", static_cast<double>(M)},
                {"t", static_cast<double>(t)},
                {"k", static_cast<double>(k)},
                {"n", static_cast<double>(N)},
                {"m", static_cast<double>(N + M)},
                {"vertex_label", label}};
  out.certificate = {
      {"mode", "coloring"},
      {"completeness_loss", 0.0},
      {"soundness_coefficient", sb_coeff},
      {"formula",
       "a k-coloring leaving fraction g of edges monochromatic forces loss > g * soundness_coefficient"}};
  out.witness_recipe = {{"type", "coloring"},
                        {"k", k},
                        {"t", t},
                        {"n", N},
                        {"matched_value", label},
                        {"other_value", -1.0 / std::sqrt(static_cast<double>(N))}};
  return out;
}

ReluNetwork coloring_witness(const nlohmann::json& recipe, const std::vector<int>& coloring) {
  if (recipe.at("type") != "coloring")
    throw ValidationError("witness recipe is not a coloring recipe");
  const int k = recipe.at("k").get<int>();
  const int n = recipe.at("n").get<int>();
  const double matched = recipe.at("matched_value").get<double>();
  const double other = recipe.at("other_value").get<double>();
  if (static_cast<int>(coloring.size()) != n)
    throw ValidationError("coloring length must equal the vertex count");
  ReluNetwork net;
  net.k = k;
  net.coeffs.assign(k, 1);
  net.unit_weights.assign(k, std::vector<double>(n, other));
  for (int v = 0; v < n; ++v) {
    const int c = coloring[v];
    if (c < 1 || c > k) throw ValidationError("color out of range");
    net.unit_weights[c - 1][v] = matched;
  }
  return net;
}

Hypergraph pad_coloring(const Hypergraph& h, int k) {
  h.validate();
  if (k < 2) throw ValidationError("color count must be at least 2");
  for (const std::vector<int>& e : h.edges)
    if (e.size() != 3) throw ValidationError("padding requires a 3-uniform hypergraph");
  if (k == 2) return h;
  Hypergraph padded;
  padded.n = h.n + (k - 2);
  padded.edges = h.edges;
  for (std::vector<int>& e : padded.edges)
    for (int dummy = 0; dummy < k - 2; ++dummy) e.push_back(h.n + 1 + dummy);
  return padded;
}

}  // namespace relu2
