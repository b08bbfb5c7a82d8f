#include "relu2/json_io.hpp"

#include <fstream>

namespace relu2 {

nlohmann::json dataset_to_json(const Dataset& data, nlohmann::json meta) {
  nlohmann::json j;
  j["dim"] = data.dim();
  j["bounded"] = data.bounded();
  j["samples"] = nlohmann::json::array();
  for (const WeightedSample& s : data.samples()) {
    nlohmann::json e;
    e["x"] = s.x;
    e["y"] = s.y;
    e["weight"] = s.weight;
    j["samples"].push_back(std::move(e));
  }
  j["meta"] = std::move(meta);
  return j;
}

Dataset dataset_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("samples"))
    throw ValidationError("dataset json must contain 'dim' and 'samples'");
  const int dim = j.at("dim").get<int>();
  const bool bounded = j.value("bounded", false);
  std::vector<WeightedSample> samples;
  for (const nlohmann::json& e : j.at("samples")) {
    WeightedSample s;
    s.x = e.at("x").get<std::vector<double>>();
    s.y = e.at("y").get<double>();
    s.weight = e.value("weight", 1.0);
    samples.push_back(std::move(s));
  }
  return Dataset(dim, bounded, std::move(samples));
}

nlohmann::json network_to_json(const ReluNetwork& net) {
  nlohmann::json j;
  j["k"] = net.k;
  j["coeffs"] = net.coeffs;
  j["weights"] = net.unit_weights;
  return j;
}

ReluNetwork network_from_json(const nlohmann::json& j) {
  ReluNetwork net;
  net.k = j.at("k").get<int>();
  net.coeffs = j.at("coeffs").get<std::vector<int>>();
  net.unit_weights = j.at("weights").get<std::vector<std::vector<double>>>();
  validate_network(net);
  return net;
}

nlohmann::json train_result_to_json(const TrainResult& result) {
  nlohmann::json j;
  j["loss"] = result.loss;
  j["network"] = network_to_json(result.network);
  j["pattern"] = result.pattern.to_bitstring();
  j["coeffs"] = result.coeff_vector;
  j["solver_clean"] = result.solver_clean;
  j["subproblems"] = result.subproblems;
  return j;
}

nlohmann::json reduction_output_to_json(const ReductionOutput& out, nlohmann::json meta) {
  nlohmann::json j;
  j["kind"] = out.kind;
  j["params"] = out.params;
  j["certificate"] = out.certificate;
  j["witness_recipe"] = out.witness_recipe;
  j["dataset"] = dataset_to_json(out.dataset, std::move(meta));
  return j;
}

ReductionOutput reduction_output_from_json(const nlohmann::json& j) {
  ReductionOutput out{dataset_from_json(j.at("dataset")), j.at("kind").get<std::string>(),
                      j.at("params").get<std::map<std::string, double>>(), j.at("certificate"),
                      j.at("witness_recipe")};
  return out;
}

nlohmann::json setcover_to_json(const SetCoverInstance& inst) {
  return {{"universe", inst.universe_size}, {"subsets", inst.subsets}};
}

SetCoverInstance setcover_from_json(const nlohmann::json& j) {
  SetCoverInstance inst;
  inst.universe_size = j.at("universe").get<int>();
  inst.subsets = j.at("subsets").get<std::vector<std::vector<int>>>();
  inst.validate();
  return inst;
}

nlohmann::json circuit_to_json(const MonotoneCircuit& c) {
  nlohmann::json gates = nlohmann::json::array();
  for (const MonotoneCircuit::Gate& g : c.gates)
    gates.push_back({{"op", g.op == GateOp::AND ? "AND" : "OR"}, {"in", g.inputs}});
  return {{"inputs", c.num_inputs}, {"gates", gates}, {"output", c.output_wire}};
}

MonotoneCircuit circuit_from_json(const nlohmann::json& j) {
  MonotoneCircuit c;
  c.num_inputs = j.at("inputs").get<int>();
  for (const nlohmann::json& g : j.at("gates")) {
    const std::string op = g.at("op").get<std::string>();
    if (op != "AND" && op != "OR") throw ValidationError("gate op must be AND or OR");
    c.gates.push_back({op == "AND" ? GateOp::AND : GateOp::OR,
                       g.at("in").get<std::vector<int>>()});
  }
  c.output_wire = j.at("output").get<int>();
  c.validate();
  return c;
}

nlohmann::json hypergraph_to_json(const Hypergraph& h) {
  return {{"n", h.n}, {"edges", h.edges}};
}

Hypergraph hypergraph_from_json(const nlohmann::json& j) {
  Hypergraph h;
  h.n = j.at("n").get<int>();
  h.edges = j.at("edges").get<std::vector<std::vector<int>>>();
  h.validate();
  return h;
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return j;
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
}

}  // namespace relu2
