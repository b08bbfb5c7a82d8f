#pragma once

#include <string>

#include "json.hpp"
#include "relu2/reductions.hpp"
#include "relu2/trainer.hpp"
#include "relu2/types.hpp"

namespace relu2 {

// Dataset files: {"dim": int, "bounded": bool, "samples": [{"x": [...],
// "y": real, "weight": real}, ...], "meta": object}; a missing weight
// defaults to 1.0. Network files: {"k": int, "coeffs": [+-1...],
// "weights": [[...]...]}.

nlohmann::json dataset_to_json(const Dataset& data, nlohmann::json meta = nlohmann::json::object());
Dataset dataset_from_json(const nlohmann::json& j);

nlohmann::json network_to_json(const ReluNetwork& net);
ReluNetwork network_from_json(const nlohmann::json& j);

nlohmann::json train_result_to_json(const TrainResult& result);

nlohmann::json reduction_output_to_json(const ReductionOutput& out,
                                        nlohmann::json meta = nlohmann::json::object());
ReductionOutput reduction_output_from_json(const nlohmann::json& j);

// instance files
nlohmann::json setcover_to_json(const SetCoverInstance& inst);
SetCoverInstance setcover_from_json(const nlohmann::json& j);
nlohmann::json circuit_to_json(const MonotoneCircuit& c);
MonotoneCircuit circuit_from_json(const nlohmann::json& j);
nlohmann::json hypergraph_to_json(const Hypergraph& h);
Hypergraph hypergraph_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace relu2
