#include <algorithm>
#include <cmath>

#include "relu2/json_io.hpp"
#include "relu2/reductions.hpp"

namespace relu2 {

// ---------------------------------------------------------------------------
// Set Cover

void SetCoverInstance::validate() const {
  if (universe_size < 1) throw ValidationError("universe must be non-empty");
  if (subsets.empty()) throw ValidationError("subset family must be non-empty");
  std::vector<char> covered(universe_size + 1, 0);
  for (const std::vector<int>& t : subsets)
    for (int u : t) {
      if (u < 1 || u > universe_size)
        throw ValidationError("subset element " + std::to_string(u) + " out of range");
      covered[u] = 1;
    }
  for (int u = 1; u <= universe_size; ++u)
    if (!covered[u])
      throw ValidationError("element " + std::to_string(u) +
                            " appears in no subset; no cover exists");
}

ReductionOutput reduce_set_cover(const SetCoverInstance& inst) {
  inst.validate();
  const int M = static_cast<int>(inst.subsets.size());
  const int U = inst.universe_size;
  const int n = M + 2;  // coord 0: dummy "one", coord 1: dummy "gamma", 2+i: subset i
  const double gamma = 0.01 / (static_cast<double>(M) * M);

  std::vector<WeightedSample> samples;
  samples.reserve(U + M + 2);
  for (int u = 1; u <= U; ++u) {
    WeightedSample s;
    s.x.assign(n, 0.0);
    s.x[0] = 1.0;
    for (int i = 0; i < M; ++i)
      if (std::find(inst.subsets[i].begin(), inst.subsets[i].end(), u) != inst.subsets[i].end())
        s.x[2 + i] = 1.0;
    s.y = 0.0;
    samples.push_back(std::move(s));
  }
  for (int i = 0; i < M; ++i) {
    WeightedSample s;
    s.x.assign(n, 0.0);
    s.x[1] = 1.0;
    s.x[2 + i] = 1.0;
    s.y = gamma;
    samples.push_back(std::move(s));
  }
  {
    WeightedSample s;
    s.x.assign(n, 0.0);
    s.x[0] = 1.0;
    s.y = 1.0;
    samples.push_back(std::move(s));
  }
  {
    WeightedSample s;
    s.x.assign(n, 0.0);
    s.x[1] = 1.0;
    s.y = gamma;
    samples.push_back(std::move(s));
  }

  const int m = static_cast<int>(samples.size());
  ReductionOutput out{Dataset(n, false, std::move(samples)), "setcover", {}, {}, {}};
  out.params = {{"M", static_cast<double>(M)},
                {"U", static_cast<double>(U)},
                {"gamma", gamma},
                {"k", 1.0},
                {"m", static_cast<double>(m)},
                {"n", static_cast<double>(n)}};
  out.certificate = {{"mode", "completeness-formula"},
                     {"gamma", gamma},
                     {"sample_count", m},
                     {"per_cover_set_total_error", gamma * gamma},
                     {"formula", "average loss of a size-t cover witness = gamma^2 * t / sample_count"}};
  out.witness_recipe = {{"type", "setcover"}, {"coord_one", 0},     {"coord_gamma", 1},
                        {"subset_coord_base", 2}, {"num_subsets", M}, {"gamma", gamma},
                        {"w_one", 1.0},       {"w_cover", -1.0}};
  return out;
}

ReluNetwork setcover_witness(const nlohmann::json& recipe, const std::vector<int>& cover) {
  if (recipe.at("type") != "setcover")
    throw ValidationError("witness recipe is not a set cover recipe");
  const int M = recipe.at("num_subsets").get<int>();
  const double gamma = recipe.at("gamma").get<double>();
  ReluNetwork net;
  net.k = 1;
  net.coeffs = {1};
  net.unit_weights = {std::vector<double>(M + 2, 0.0)};
  net.unit_weights[0][0] = recipe.at("w_one").get<double>();
  net.unit_weights[0][1] = gamma;
  for (int i : cover) {
    if (i < 1 || i > M) throw ValidationError("cover references subset out of range");
    net.unit_weights[0][1 + i] = recipe.at("w_cover").get<double>();
  }
  return net;
}

// ---------------------------------------------------------------------------
// Minimum Monotone Circuit Satisfiability

void MonotoneCircuit::validate() const {
  if (num_inputs < 1) throw ValidationError("circuit must have at least one input wire");
  for (std::size_t g = 0; g < gates.size(); ++g) {
    const int own_wire = num_inputs + static_cast<int>(g) + 1;
    if (gates[g].inputs.empty())
      throw ValidationError("gate " + std::to_string(g + 1) + " has no inputs");
    for (int in : gates[g].inputs)
      if (in < 1 || in >= own_wire)
        throw ValidationError("gate " + std::to_string(g + 1) +
                              " references wire " + std::to_string(in) +
                              " that is not earlier in the order");
  }
  if (output_wire < 1 || output_wire > wire_count())
    throw ValidationError("output wire out of range");
}

int MonotoneCircuit::depth() const {
  std::vector<int> height(wire_count() + 1, 0);
  int d = 0;
  for (std::size_t g = 0; g < gates.size(); ++g) {
    int h = 0;
    for (int in : gates[g].inputs) h = std::max(h, height[in]);
    height[num_inputs + static_cast<int>(g) + 1] = h + 1;
    d = std::max(d, h + 1);
  }
  return d;
}

std::vector<bool> MonotoneCircuit::evaluate(const std::vector<bool>& inputs) const {
  if (static_cast<int>(inputs.size()) != num_inputs)
    throw ValidationError("assignment length does not match input count");
  std::vector<bool> value(wire_count() + 1, false);
  for (int i = 0; i < num_inputs; ++i) value[i + 1] = inputs[i];
  for (std::size_t g = 0; g < gates.size(); ++g) {
    bool v = gates[g].op == GateOp::AND;
    for (int in : gates[g].inputs)
      v = gates[g].op == GateOp::AND ? (v && value[in]) : (v || value[in]);
    value[num_inputs + static_cast<int>(g) + 1] = v;
  }
  return value;
}

namespace {

// least number of true inputs that satisfies the circuit, by enumeration
std::optional<int> mmcs_opt_brute(const MonotoneCircuit& c, int cap_bits = 20) {
  if (c.num_inputs > cap_bits) return std::nullopt;
  int best = -1;
  for (std::uint64_t mask = 0; mask < (1ull << c.num_inputs); ++mask) {
    std::vector<bool> inputs(c.num_inputs);
    int trues = 0;
    for (int i = 0; i < c.num_inputs; ++i) {
      inputs[i] = (mask >> i) & 1u;
      trues += inputs[i];
    }
    if (best >= 0 && trues >= best) continue;
    if (c.evaluate(inputs)[c.output_wire]) best = trues;
  }
  if (best < 0) return std::nullopt;  // unsatisfiable even with all inputs true
  return best;
}

}  // namespace

ReductionOutput reduce_mmcs(const MonotoneCircuit& circuit) {
  circuit.validate();
  const int wires = circuit.wire_count();
  const int depth = circuit.depth();
  const int n = wires + 1;  // wire w lives at coordinate w-1; dummy at coordinate |C|
  const double gamma = std::pow(10.0 * wires, -(depth + 1.0));

  std::vector<WeightedSample> samples;
  {
    WeightedSample s;  // dummy coordinate carries the constant gamma
    s.x.assign(n, 0.0);
    s.x[wires] = 1.0;
    s.y = gamma;
    samples.push_back(std::move(s));
  }
  for (int i = 1; i <= circuit.num_inputs; ++i) {
    WeightedSample s;  // charges gamma^2 for each input set to true
    s.x.assign(n, 0.0);
    s.x[wires] = 1.0;
    s.x[i - 1] = -1.0;
    s.y = gamma;
    samples.push_back(std::move(s));
  }
  {
    WeightedSample s;  // the output wire must evaluate to one
    s.x.assign(n, 0.0);
    s.x[circuit.output_wire - 1] = 1.0;
    s.y = 1.0;
    samples.push_back(std::move(s));
  }
  for (std::size_t g = 0; g < circuit.gates.size(); ++g) {
    const int out_wire = circuit.num_inputs + static_cast<int>(g) + 1;
    if (circuit.gates[g].op == GateOp::OR) {
      WeightedSample s;
      s.x.assign(n, 0.0);
      s.x[out_wire - 1] = 1.0;
      for (int in : circuit.gates[g].inputs) s.x[in - 1] -= 1.0;
      s.y = 0.0;
      samples.push_back(std::move(s));
    } else {
      for (int in : circuit.gates[g].inputs) {
        WeightedSample s;
        s.x.assign(n, 0.0);
        s.x[out_wire - 1] = 1.0;
        s.x[in - 1] -= 1.0;
        s.y = 0.0;
        samples.push_back(std::move(s));
      }
    }
  }

  const int m = static_cast<int>(samples.size());
  ReductionOutput out{Dataset(n, false, std::move(samples)), "mmcs", {}, {}, {}};
  out.params = {{"wires", static_cast<double>(wires)},
                {"depth", static_cast<double>(depth)},
                {"inputs", static_cast<double>(circuit.num_inputs)},
                {"gamma", gamma},
                {"k", 1.0},
                {"m", static_cast<double>(m)},
                {"n", static_cast<double>(n)}};
  out.certificate = {{"mode", "completeness-formula"},
                     {"error_convention", "total"},
                     {"gamma", gamma},
                     {"sample_count", m},
                     {"per_true_input_total_error", gamma * gamma},
                     {"formula", "minimum TOTAL squared error = opt * gamma^2; average = total / sample_count"}};
  if (std::optional<int> opt = mmcs_opt_brute(circuit)) {
    out.certificate["opt_mmcs"] = *opt;
    out.certificate["completeness_total"] = *opt * gamma * gamma;
    out.certificate["completeness_average"] = *opt * gamma * gamma / m;
  } else {
    out.certificate["opt_mmcs"] = nullptr;
  }
  out.witness_recipe = {{"type", "mmcs"},
                        {"coord_gamma", wires},
                        {"gamma", gamma},
                        {"wires", wires},
                        {"inputs", circuit.num_inputs},
                        {"circuit", circuit_to_json(circuit)}};
  return out;
}

ReluNetwork mmcs_witness(const nlohmann::json& recipe, const std::vector<bool>& input_assignment) {
  if (recipe.at("type") != "mmcs") throw ValidationError("witness recipe is not a circuit recipe");
  const MonotoneCircuit circuit = circuit_from_json(recipe.at("circuit"));
  const int wires = recipe.at("wires").get<int>();
  const double gamma = recipe.at("gamma").get<double>();
  const std::vector<bool> value = circuit.evaluate(input_assignment);
  ReluNetwork net;
  net.k = 1;
  net.coeffs = {1};
  net.unit_weights = {std::vector<double>(wires + 1, 0.0)};
  for (int w = 1; w <= wires; ++w)
    if (value[w]) net.unit_weights[0][w - 1] = 1.0;
  net.unit_weights[0][wires] = gamma;
  return net;
}

}  // namespace relu2
