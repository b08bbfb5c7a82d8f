#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "relu2/types.hpp"

namespace relu2 {

// ---------------------------------------------------------------------------
// combinatorial source instances

struct SetCoverInstance {
  int universe_size = 0;
  std::vector<std::vector<int>> subsets;  // 1-based elements of {1..universe_size}

  void validate() const;
};

enum class GateOp { AND, OR };

/// Wires are 1-based: wires 1..num_inputs are the inputs, wire num_inputs + g
/// is the output of gate g. Gate inputs must reference earlier wires.
struct MonotoneCircuit {
  int num_inputs = 0;
  struct Gate {
    GateOp op;
    std::vector<int> inputs;
  };
  std::vector<Gate> gates;
  int output_wire = 0;

  int wire_count() const { return num_inputs + static_cast<int>(gates.size()); }
  int depth() const;  // max gate height; input wires have height 0
  void validate() const;
  /// Wire values under the given input assignment (1-based wire indexing).
  std::vector<bool> evaluate(const std::vector<bool>& inputs) const;
};

/// Vertices are 1-based. Plain graphs are the 2-uniform case.
struct Hypergraph {
  int n = 0;
  std::vector<std::vector<int>> edges;

  int num_edges() const { return static_cast<int>(edges.size()); }
  int max_edge_size() const;
  int max_degree() const;
  std::vector<int> degrees() const;
  void validate(bool require_graph = false) const;
};

// ---------------------------------------------------------------------------
// generator output

/// A generated dataset together with the constants used, a machine-checkable
/// certificate, and enough data to rebuild a witness network from a
/// combinatorial solution.
struct ReductionOutput {
  Dataset dataset;
  std::string kind;  // setcover | mmcs | dks | coloring | gadget | compose
  std::map<std::string, double> params;
  nlohmann::json certificate;
  nlohmann::json witness_recipe;
};

// ---------------------------------------------------------------------------
// 1-ReLU hardness generators (unbounded weights)

/// n = M + 2 (one coordinate per subset plus two dummy coordinates);
/// gamma = 0.01 / M^2. A cover of size t evaluates to average error
/// gamma^2 * t / |S| under the recipe witness.
ReductionOutput reduce_set_cover(const SetCoverInstance& inst);

/// n = |C| + 1 (wire coordinates plus a dummy); gamma = 1/(10|C|)^(depth+1).
/// The minimum TOTAL squared error equals opt * gamma^2 where opt is the
/// least number of true inputs satisfying the circuit; the certificate
/// carries both the total and the equivalent average convention.
ReductionOutput reduce_mmcs(const MonotoneCircuit& circuit);

// ---------------------------------------------------------------------------
// densest-subgraph generator (bounded instance, normalized weights)

struct DksParams {
  int N = 0, M = 0, max_degree = 0, kappa = 0, ell = 0;
  double delta = 0, gamma = 0, zeta = 0;
  double opt = 0, epsilon = 0;
  double lcard_completeness = 0;  // cardinality part of the witness loss
  double weight_constant = 0, weight_cardinality = 0, weight_edge = 0;
};

/// Evaluates every closed-form constant of the construction without building
/// samples. Does not reject non-positive gaps; callers inspect epsilon.
DksParams dks_parameters(const Hypergraph& graph, int kappa, int ell);

/// Streams the construction's samples in order (constant, vertices, edges)
/// without materializing them; x is the dense feature vector of one sample.
void dks_visit_samples(const Hypergraph& graph, const DksParams& p,
                       const std::function<void(const std::vector<double>& x, double y,
                                                double weight)>& visit);

/// Structural validation at any scale: group weight sums, sample norms, and
/// the witness decomposition for the lexicographically first kappa-subset.
struct DksStructureReport {
  DksParams params;
  double group_weight_constant = 0, group_weight_cardinality = 0, group_weight_edge = 0;
  double max_sample_norm = 0;
  double witness_norm = 0;
  double witness_lstar = 0, witness_lcard = 0, witness_ledge = 0;
};
DksStructureReport dks_structure_check(const Hypergraph& graph, int kappa, int ell);

/// Materializes the full dataset. Raises NonPositiveGapError when the gap
/// formula is non-positive at this scale, and a budget error when the dense
/// sample matrix would be too large to hold in memory.
ReductionOutput reduce_dks(const Hypergraph& graph, int kappa, int ell);

// ---------------------------------------------------------------------------
// hypergraph-coloring generator (bounded, sum-of-k target)

/// n = N; vertex samples (e_i, 1/(t*sqrt(t*n))) with weight deg(i) and
/// hyperedge samples ((1/sqrt(t)) * sum e_v, 0) with weight 1.
ReductionOutput reduce_coloring(const Hypergraph& h, int k);

/// Adds k-2 dummy vertices to a 3-uniform hypergraph and to every edge,
/// producing a (k+1)-uniform hypergraph; k = 2 is the identity.
Hypergraph pad_coloring(const Hypergraph& h, int k);

// ---------------------------------------------------------------------------
// coefficient-sign gadget (bounded)

struct GeneralPositionOptions {
  double audit_cap = 20000;   // max number of subsets checked per point set
  bool moment_curve = false;  // deterministic construction instead of sampling
};

/// `count` points inside the ball B(center, radius), every dim-subset of which
/// has smallest singular value above tol.rank_tol. Deterministic given seed.
std::vector<std::vector<double>> generate_general_position(
    int dim, int count, const std::vector<double>& center, double radius, std::uint64_t seed,
    const Tolerances& tol, const GeneralPositionOptions& gp = {});

struct GadgetOptions {
  int points_per_set = 0;     // 0 means the default sizing 2^k * k
  bool simple_pair = false;   // the two-sample variant; requires k == 2
  GeneralPositionOptions gp{};
  Tolerances tol{};
};

/// Labelled point sets realizable by the all-ones coefficient vector only.
/// For every sign vector u except all-minus-one, a point set inside
/// B(u/(2 sqrt k), 0.01/k) labelled by f(x) = sum_j max(x_j, 0).
ReductionOutput build_gadget(int k, std::uint64_t seed, const GadgetOptions& opts = {});

/// tau = 0.1/(k|S|) * min(1, min over sets and k-subsets of the squared
/// smallest singular value of the subset matrix). Empty when the subset
/// enumeration would exceed the cap.
std::optional<double> compute_tau(const std::vector<std::vector<std::vector<double>>>& point_sets,
                                  int k, double cap = 1e7);

/// Extracts the point sets of a gadget output and computes tau.
std::optional<double> compute_tau(const ReductionOutput& gadget, double cap = 1e7);

/// Embeds a sum-of-k realizable dataset and a gadget side by side: original
/// samples become (x ∘ 0_k, y/2) and gadget samples (0_n ∘ x~, y~/2), with
/// weights cross-multiplied so each half carries exactly half the total.
Dataset compose_with_gadget(const Dataset& base, int k, const ReductionOutput& gadget);

/// ReductionOutput wrapper for the composition; keeps both witness recipes.
ReductionOutput compose_reduction(const ReductionOutput& base, const ReductionOutput& gadget);

// ---------------------------------------------------------------------------
// witness builders: every recipe is self-contained, so a witness can be
// rebuilt from the recipe JSON plus the combinatorial solution alone

ReluNetwork setcover_witness(const nlohmann::json& recipe, const std::vector<int>& cover);
ReluNetwork mmcs_witness(const nlohmann::json& recipe, const std::vector<bool>& input_assignment);
ReluNetwork dks_witness(const nlohmann::json& recipe, const std::vector<int>& vertex_set);
ReluNetwork dks_witness_from_params(const DksParams& p, const std::vector<int>& vertex_set);
ReluNetwork coloring_witness(const nlohmann::json& recipe, const std::vector<int>& coloring);
ReluNetwork gadget_witness(const nlohmann::json& recipe);
ReluNetwork compose_witness(const nlohmann::json& recipe, const ReluNetwork& base_witness);

/// Dispatcher over recipe types. The solution object carries the field the
/// recipe type expects: {"cover": [...]}, {"assignment": [...]},
/// {"vertices": [...]}, {"coloring": [...]}, {} for gadgets, and
/// {"base_solution": {...}} for compositions.
ReluNetwork witness_from_recipe(const nlohmann::json& recipe, const nlohmann::json& solution);

}  // namespace relu2
