// relu2 command line: generate hardness instances, train depth-2 ReLU
// networks to global optimality, verify certificates, and evaluate the
// sample-complexity formulas.
//
// Exit codes: 0 success/pass, 1 input error or failed verification,
// 2 non-positive gap, 3 budget exceeded, 4 unverifiable at this scale.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "relu2/eval.hpp"
#include "relu2/json_io.hpp"
#include "relu2/learning.hpp"
#include "relu2/reductions.hpp"
#include "relu2/solver.hpp"
#include "relu2/trainer.hpp"
#include "relu2/verify.hpp"

namespace {

using namespace relu2;

std::vector<int> parse_coeffs(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok == "1" || tok == "+1")
      out.push_back(1);
    else if (tok == "-1")
      out.push_back(-1);
    else
      throw ValidationError("coefficients must be a comma-separated list of 1 and -1");
  }
  if (out.empty()) throw ValidationError("empty coefficient list");
  return out;
}

int resolve_threads(int flag_value) {
  if (const char* env = std::getenv("RELU2_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return flag_value;
}

Dataset load_dataset(const std::string& path) {
  const nlohmann::json j = read_json_file(path);
  if (j.contains("dataset")) return dataset_from_json(j.at("dataset"));
  return dataset_from_json(j);
}

struct GenerateArgs {
  std::string reduction, in_path, out_path, gadget_path;
  int k = 2, kappa = 2, ell = 1, points_per_set = 0, pad_k = 0;
  std::uint64_t seed = 0;
  bool simple_pair = false;
};

int cmd_generate(const GenerateArgs& a) {
  std::optional<ReductionOutput> out;
  if (a.reduction == "setcover") {
    out = reduce_set_cover(setcover_from_json(read_json_file(a.in_path)));
  } else if (a.reduction == "mmcs") {
    out = reduce_mmcs(circuit_from_json(read_json_file(a.in_path)));
  } else if (a.reduction == "dks") {
    out = reduce_dks(hypergraph_from_json(read_json_file(a.in_path)), a.kappa, a.ell);
  } else if (a.reduction == "coloring") {
    Hypergraph h = hypergraph_from_json(read_json_file(a.in_path));
    if (a.pad_k > 0) h = pad_coloring(h, a.pad_k);
    out = reduce_coloring(h, a.k);
  } else if (a.reduction == "gadget") {
    GadgetOptions opts;
    opts.points_per_set = a.points_per_set;
    opts.simple_pair = a.simple_pair;
    out = build_gadget(a.k, a.seed, opts);
  } else if (a.reduction == "compose") {
    const ReductionOutput base = reduction_output_from_json(read_json_file(a.in_path));
    const ReductionOutput gadget = reduction_output_from_json(read_json_file(a.gadget_path));
    out = compose_reduction(base, gadget);
  } else {
    throw ValidationError("unknown reduction kind: " + a.reduction);
  }

  nlohmann::json meta = {{"tool", "relu2 generate"},
                         {"reduction", a.reduction},
                         {"seed", a.seed}};
  write_json_file(a.out_path, reduction_output_to_json(*out, std::move(meta)));
  std::cout << "wrote " << a.out_path << ": kind=" << out->kind << " n=" << out->dataset.dim()
            << " m=" << out->dataset.size() << "\n";
  return 0;
}

struct TrainArgs {
  std::string in_path, out_path, mode = "exact", fix_coeffs;
  int k = 1, threads = 1, cap_bits = 24;
  bool bounded = false;
  double delta_net = 0.1, grid_step = 0.25, box_radius = 1.0;
  std::uint64_t seed = 0;
};

int cmd_train(const TrainArgs& a) {
  const Dataset data = load_dataset(a.in_path);
  TrainOptions opts;
  opts.bounded = a.bounded;
  opts.threads = resolve_threads(a.threads);
  opts.enumeration_cap_bits = a.cap_bits;
  if (!a.fix_coeffs.empty()) opts.fixed_coeffs = parse_coeffs(a.fix_coeffs);

  const auto t0 = std::chrono::steady_clock::now();
  nlohmann::json result;
  double loss = 0.0;
  bool have_loss = true;
  if (a.mode == "exact") {
    TrainResult r = train_exact(data, a.k, opts);
    loss = r.loss;
    result = train_result_to_json(r);
  } else if (a.mode == "epsnet") {
    TrainResult r = train_epsnet(data, a.k, a.delta_net, a.seed, opts);
    loss = r.loss;
    result = train_result_to_json(r);
  } else if (a.mode == "oracle") {
    TrainResult r = brute_force_oracle(data, a.k, a.grid_step, a.box_radius, opts);
    loss = r.loss;
    result = train_result_to_json(r);
  } else if (a.mode == "lp-realizable") {
    RealizableResult r = train_realizable_1relu(data);
    result["realizable"] = r.realizable;
    if (r.realizable) {
      loss = eval_loss(r.network, data);
      result["loss"] = loss;
      result["network"] = network_to_json(r.network);
    } else {
      std::cout << "not-realizable by a single unit of either sign\n";
      result["loss"] = nullptr;
      have_loss = false;
    }
  } else {
    throw ValidationError("unknown mode: " + a.mode);
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  result["meta"] = {{"tool", "relu2 train"}, {"mode", a.mode}, {"seed", a.seed}};
  if (!a.out_path.empty()) write_json_file(a.out_path, result);
  if (have_loss) {
    std::printf("loss (weighted average): %.17g\n", loss);
    std::printf("total squared error:     %.17g\n", loss * data.total_weight());
  }
  std::fprintf(stderr, "wall time: %.3fs\n", elapsed);
  return 0;
}

struct VerifyArgs {
  std::string in_path, solution_path, out_path, check = "witness", fix_coeffs;
  bool bounded = false;
  double tol = 1e-9;
  int threads = 1, cap_bits = 24;
};

int cmd_verify(const VerifyArgs& a) {
  VerifyReport report;
  if (a.check == "roundtrip") {
    report = roundtrip_setcover(setcover_from_json(read_json_file(a.in_path)), a.tol);
  } else {
    const ReductionOutput out = reduction_output_from_json(read_json_file(a.in_path));
    if (a.check == "witness") {
      nlohmann::json solution = nlohmann::json::object();
      if (!a.solution_path.empty()) solution = read_json_file(a.solution_path);
      report = check_witness(out, solution, a.tol);
    } else if (a.check == "soundness") {
      TrainOptions topts;
      topts.bounded = a.bounded;
      topts.threads = resolve_threads(a.threads);
      topts.enumeration_cap_bits = a.cap_bits;
      if (!a.fix_coeffs.empty()) topts.fixed_coeffs = parse_coeffs(a.fix_coeffs);
      report = check_soundness_gap(out, topts, a.tol);
    } else {
      throw ValidationError("unknown check: " + a.check);
    }
  }

  if (!a.out_path.empty()) write_json_file(a.out_path, report.to_json());
  for (const VerifyCheck& c : report.checks)
    std::printf("%-28s expected=%.12g observed=%.12g %s\n", c.name.c_str(), c.expected,
                c.observed, c.pass ? "pass" : "FAIL");
  std::printf("overall: %s (%s)\n", report.overall ? "pass" : "fail", report.status.c_str());
  if (report.status == "unverifiable-at-scale") return 4;
  return report.overall ? 0 : 1;
}

struct ComplexityArgs {
  int k = 1;
  double eps = 1.0, delta = 1.0, c_smooth = 1.0;
  bool as_json = false;
};

int cmd_complexity(const ComplexityArgs& a) {
  LearnParams p{a.k, a.eps, a.delta, a.c_smooth};
  const std::int64_t agn = sample_complexity_agnostic(p);
  const std::int64_t real = sample_complexity_realizable(p);
  const double gap = generalization_gap_bound(a.k, agn, a.delta);
  if (a.as_json) {
    nlohmann::json j = {{"k", a.k},
                        {"epsilon", a.eps},
                        {"delta", a.delta},
                        {"C", a.c_smooth},
                        {"agnostic_m", agn},
                        {"realizable_m", real},
                        {"generalization_gap_at_agnostic_m", gap}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::printf("agnostic m:    %lld\n", static_cast<long long>(agn));
    std::printf("realizable m:  %lld\n", static_cast<long long>(real));
    std::printf("gap bound at agnostic m: %.12g\n", gap);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"globally optimal depth-2 ReLU training and hardness-instance tooling"};
  app.require_subcommand(1);

  GenerateArgs ga;
  CLI::App* gen = app.add_subcommand("generate", "generate a reduction dataset + certificate");
  gen->add_option("--reduction", ga.reduction,
                  "setcover | mmcs | dks | coloring | gadget | compose")->required();
  gen->add_option("--in", ga.in_path, "instance file (or base reduction for compose)");
  gen->add_option("--out", ga.out_path, "output file")->required();
  gen->add_option("--gadget", ga.gadget_path, "gadget reduction file (compose)");
  gen->add_option("--k", ga.k, "unit / color count");
  gen->add_option("--kappa", ga.kappa, "subgraph size (dks)");
  gen->add_option("--ell", ga.ell, "edge target (dks)");
  gen->add_option("--points-per-set", ga.points_per_set, "gadget point-set size (0 = default)");
  gen->add_option("--pad-k", ga.pad_k, "pad a 3-uniform hypergraph before coloring");
  gen->add_option("--seed", ga.seed, "random seed");
  gen->add_flag("--simple-pair", ga.simple_pair, "two-sample gadget variant (k = 2)");

  TrainArgs ta;
  CLI::App* tr = app.add_subcommand("train", "train on a dataset file");
  tr->add_option("--in", ta.in_path, "dataset or reduction file")->required();
  tr->add_option("--out", ta.out_path, "result file");
  tr->add_option("--k", ta.k, "number of units");
  tr->add_option("--mode", ta.mode, "exact | epsnet | lp-realizable | oracle");
  tr->add_flag("--bounded", ta.bounded, "restrict every unit to the unit ball");
  tr->add_option("--fix-coeffs", ta.fix_coeffs, "fixed coefficient vector, e.g. 1,-1");
  tr->add_option("--threads", ta.threads, "worker threads (env RELU2_THREADS overrides)");
  tr->add_option("--cap-bits", ta.cap_bits, "enumeration budget in pattern bits");
  tr->add_option("--delta-net", ta.delta_net, "net spacing (epsnet mode)");
  tr->add_option("--grid-step", ta.grid_step, "grid step (oracle mode)");
  tr->add_option("--box-radius", ta.box_radius, "grid radius (oracle mode)");
  tr->add_option("--seed", ta.seed, "random seed");

  VerifyArgs va;
  CLI::App* ve = app.add_subcommand("verify", "check certificates against trainers/witnesses");
  ve->add_option("--in", va.in_path, "reduction file (or instance for roundtrip)")->required();
  ve->add_option("--check", va.check, "witness | soundness | roundtrip");
  ve->add_option("--solution", va.solution_path, "combinatorial solution file (witness)");
  ve->add_option("--out", va.out_path, "report file");
  ve->add_option("--tol", va.tol, "check tolerance");
  ve->add_flag("--bounded", va.bounded, "bounded trainer (soundness)");
  ve->add_option("--fix-coeffs", va.fix_coeffs, "fixed coefficients (soundness)");
  ve->add_option("--threads", va.threads, "worker threads");
  ve->add_option("--cap-bits", va.cap_bits, "enumeration budget in pattern bits");

  ComplexityArgs ca;
  CLI::App* co = app.add_subcommand("complexity", "sample-complexity formulas");
  co->add_option("--k", ca.k, "number of units");
  co->add_option("--eps", ca.eps, "additive accuracy");
  co->add_option("--delta", ca.delta, "failure probability");
  co->add_option("--C", ca.c_smooth, "realizable-bound constant");
  co->add_flag("--json", ca.as_json, "machine-readable output");

  TrainArgs oa;
  CLI::App* orc = app.add_subcommand("oracle", "exhaustive grid minimum (test oracle)");
  orc->add_option("--in", oa.in_path, "dataset or reduction file")->required();
  orc->add_option("--out", oa.out_path, "result file");
  orc->add_option("--k", oa.k, "number of units");
  orc->add_flag("--bounded", oa.bounded, "clip grid points into the unit ball");
  orc->add_option("--fix-coeffs", oa.fix_coeffs, "fixed coefficient vector");
  orc->add_option("--grid-step", oa.grid_step, "grid step");
  orc->add_option("--box-radius", oa.box_radius, "grid radius");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) return cmd_generate(ga);
    if (tr->parsed()) return cmd_train(ta);
    if (ve->parsed()) return cmd_verify(va);
    if (co->parsed()) return cmd_complexity(ca);
    if (orc->parsed()) {
      oa.mode = "oracle";
      return cmd_train(oa);
    }
  } catch (const NonPositiveGapError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    std::printf("epsilon: %.17g\n", e.epsilon);
    return 2;
  } catch (const BudgetError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
