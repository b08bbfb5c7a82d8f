#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "relu2/reductions.hpp"
#include "relu2/rng.hpp"

namespace relu2 {

namespace {

double binomial(int n, int r) {
  if (r < 0 || r > n) return 0.0;
  double v = 1.0;
  for (int i = 0; i < r; ++i) v = v * (n - i) / (i + 1);
  return v;
}

double smallest_singular_value(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues().minCoeff();
}

// visits every r-subset of {0..n-1} in lexicographic order
template <typename F>
void for_each_combination(int n, int r, F&& f) {
  std::vector<int> idx(r);
  for (int i = 0; i < r; ++i) idx[i] = i;
  for (;;) {
    f(idx);
    int i = r - 1;
    while (i >= 0 && idx[i] == n - r + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
}

double gadget_label(const std::vector<double>& x) {
  double f = 0.0;
  for (double v : x) f += std::max(v, 0.0);
  return f;
}

ReluNetwork gadget_witness_from_recipe(const nlohmann::json& recipe) {
  const std::string type = recipe.at("type").get<std::string>();
  ReluNetwork net;
  if (type == "gadget-identity") {
    const int k = recipe.at("k").get<int>();
    net.k = k;
    net.coeffs.assign(k, 1);
    net.unit_weights.assign(k, std::vector<double>(k, 0.0));
    for (int j = 0; j < k; ++j) net.unit_weights[j][j] = 1.0;
    return net;
  }
  if (type == "gadget-pair") {
    const std::vector<double> u = recipe.at("u").get<std::vector<double>>();
    net.k = 2;
    net.coeffs = {1, 1};
    net.unit_weights = {u, u};
    for (double& v : net.unit_weights[1]) v = -v;
    return net;
  }
  throw ValidationError("unknown gadget recipe type: " + type);
}

}  // namespace

std::vector<std::vector<double>> generate_general_position(int dim, int count,
                                                           const std::vector<double>& center,
                                                           double radius, std::uint64_t seed,
                                                           const Tolerances& tol,
                                                           const GeneralPositionOptions& gp) {
  tol.validate();
  if (dim < 1) throw ValidationError("dimension must be positive");
  if (count < dim) throw ValidationError("need at least dim points");
  if (static_cast<int>(center.size()) != dim) throw ValidationError("center has wrong length");
  if (!(radius > 0.0)) throw ValidationError("radius must be positive");

  std::mt19937_64 rng(seed);
  for (int round = 0; round < 100; ++round) {
    std::vector<std::vector<double>> points(count);
    if (gp.moment_curve) {
      // rows of a generalized Vandermonde matrix, scaled into the ball
      const double scale = radius / std::sqrt(static_cast<double>(dim));
      for (int i = 0; i < count; ++i) {
        const double t = static_cast<double>(i + 1) / (count + 1);
        points[i].resize(dim);
        double pw = t;
        for (int c = 0; c < dim; ++c) {
          points[i][c] = center[c] + scale * pw;
          pw *= t;
        }
      }
    } else {
      for (int i = 0; i < count; ++i) points[i] = uniform_in_ball(rng, center, radius);
    }

    // audit: smallest singular value of every (or a sampled set of) dim-subset
    bool ok = true;
    Eigen::MatrixXd m(dim, dim);
    auto check = [&](const std::vector<int>& idx) {
      if (!ok) return;
      for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) m(r, c) = points[idx[r]][c];
      if (smallest_singular_value(m) <= tol.rank_tol) ok = false;
    };
    if (binomial(count, dim) <= gp.audit_cap) {
      for_each_combination(count, dim, check);
    } else {
      for (int trial = 0; trial < static_cast<int>(gp.audit_cap) && ok; ++trial) {
        // sampled subset: draw dim distinct indices
        std::vector<int> idx;
        while (static_cast<int>(idx.size()) < dim) {
          int cand = static_cast<int>(rng() % count);
          if (std::find(idx.begin(), idx.end(), cand) == idx.end()) idx.push_back(cand);
        }
        check(idx);
      }
    }
    if (ok) return points;
    if (gp.moment_curve)
      throw GenerationError("moment-curve construction failed the rank audit at this size");
  }
  throw GenerationError("point sampling failed the rank audit in 100 rounds");
}

std::optional<double> compute_tau(const std::vector<std::vector<std::vector<double>>>& point_sets,
                                  int k, double cap) {
  if (k < 1) throw ValidationError("unit count must be positive");
  std::size_t total_points = 0;
  double combos = 0.0;
  for (const std::vector<std::vector<double>>& set : point_sets) {
    total_points += set.size();
    combos += binomial(static_cast<int>(set.size()), k);
  }
  if (combos > cap) return std::nullopt;

  double inner = 1.0;
  Eigen::MatrixXd m(k, k);
  for (const std::vector<std::vector<double>>& set : point_sets) {
    if (static_cast<int>(set.size()) < k)
      throw ValidationError("each point set needs at least k points");
    for_each_combination(static_cast<int>(set.size()), k, [&](const std::vector<int>& idx) {
      for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c) m(r, c) = set[idx[r]][c];
      const double s = smallest_singular_value(m);
      inner = std::min(inner, s * s);
    });
  }
  return 0.1 / (k * static_cast<double>(total_points)) * inner;
}

std::optional<double> compute_tau(const ReductionOutput& gadget, double cap) {
  if (gadget.kind != "gadget") throw ValidationError("tau is defined for gadget outputs");
  if (gadget.witness_recipe.at("type") == "gadget-pair")
    throw ValidationError("tau is defined for the general point-set gadget");
  const int k = static_cast<int>(gadget.params.at("k"));
  const int per_set = static_cast<int>(gadget.params.at("points_per_set"));
  std::vector<std::vector<std::vector<double>>> sets;
  const auto& samples = gadget.dataset.samples();
  for (std::size_t base = 0; base < samples.size(); base += per_set) {
    std::vector<std::vector<double>> set;
    for (int i = 0; i < per_set; ++i) set.push_back(samples[base + i].x);
    sets.push_back(std::move(set));
  }
  return compute_tau(sets, k, cap);
}

ReductionOutput build_gadget(int k, std::uint64_t seed, const GadgetOptions& opts) {
  if (k < 2) throw ValidationError("the gadget needs at least two units");

  if (opts.simple_pair) {
    if (k != 2) throw ValidationError("the two-sample gadget variant requires k = 2");
    std::vector<WeightedSample> samples(2);
    samples[0] = {{1.0, 0.0}, 1.0, 1.0};
    samples[1] = {{-1.0, 0.0}, 1.0, 1.0};
    ReductionOutput out{Dataset(2, true, std::move(samples)), "gadget", {}, {}, {}};
    out.params = {{"k", 2.0}, {"m", 2.0}, {"n", 2.0}, {"simple_pair", 1.0}};
    out.certificate = {{"mode", "gadget"},
                       {"simple_pair", true},
                       {"completeness_loss", 0.0},
                       {"soundness_min_loss", 0.5},
                       {"tau", nullptr}};
    out.witness_recipe = {{"type", "gadget-pair"}, {"u", std::vector<double>{1.0, 0.0}}};
    return out;
  }

  const int per_set = opts.points_per_set > 0 ? opts.points_per_set : (1 << k) * k;
  if (per_set < k) throw ValidationError("points per set must be at least k");

  const double radius = 0.01 / k;
  const double center_scale = 1.0 / (2.0 * std::sqrt(static_cast<double>(k)));

  std::vector<std::vector<std::vector<double>>> sets;
  std::vector<WeightedSample> samples;
  for (std::uint64_t c = 1; c < (1ull << k); ++c) {
    std::vector<double> center(k);
    for (int j = 0; j < k; ++j)
      center[j] = (((c >> (k - 1 - j)) & 1u) ? 1.0 : -1.0) * center_scale;
    std::vector<std::vector<double>> set = generate_general_position(
        k, per_set, center, radius, seed + c * 0x9E3779B97F4A7C15ull, opts.tol, opts.gp);
    for (const std::vector<double>& x : set) samples.push_back({x, gadget_label(x), 1.0});
    sets.push_back(std::move(set));
  }

  const int m = static_cast<int>(samples.size());
  ReductionOutput out{Dataset(k, true, std::move(samples)), "gadget", {}, {}, {}};
  out.params = {{"k", static_cast<double>(k)},
                {"points_per_set", static_cast<double>(per_set)},
                {"num_sets", static_cast<double>((1 << k) - 1)},
                {"m", static_cast<double>(m)},
                {"n", static_cast<double>(k)},
                {"seed", static_cast<double>(seed)},
                {"simple_pair", 0.0}};
  out.certificate = {{"mode", "gadget"},
                     {"simple_pair", false},
                     {"completeness_loss", 0.0}};
  if (std::optional<double> tau = compute_tau(sets, k))
    out.certificate["tau"] = *tau;
  else
    out.certificate["tau"] = nullptr;
  out.witness_recipe = {{"type", "gadget-identity"}, {"k", k}};
  return out;
}

ReluNetwork gadget_witness(const nlohmann::json& recipe) {
  return gadget_witness_from_recipe(recipe);
}

Dataset compose_with_gadget(const Dataset& base, int k, const ReductionOutput& gadget) {
  if (gadget.kind != "gadget") throw ValidationError("composition requires a gadget output");
  if (static_cast<int>(gadget.params.at("k")) != k)
    throw ValidationError("gadget was built for a different unit count");
  if (gadget.dataset.dim() != k)
    throw ValidationError("gadget dimension must equal the unit count");

  const int n = base.dim();
  std::vector<WeightedSample> samples;
  samples.reserve(base.size() + gadget.dataset.size());
  for (const WeightedSample& s : base.samples()) {
    WeightedSample e;
    e.x = s.x;
    e.x.resize(n + k, 0.0);
    e.y = 0.5 * s.y;
    e.weight = s.weight * gadget.dataset.total_weight();
    samples.push_back(std::move(e));
  }
  for (const WeightedSample& s : gadget.dataset.samples()) {
    WeightedSample e;
    e.x.assign(n + k, 0.0);
    std::copy(s.x.begin(), s.x.end(), e.x.begin() + n);
    e.y = 0.5 * s.y;
    e.weight = s.weight * base.total_weight();
    samples.push_back(std::move(e));
  }
  return Dataset(n + k, base.bounded() && gadget.dataset.bounded(), std::move(samples));
}

ReductionOutput compose_reduction(const ReductionOutput& base, const ReductionOutput& gadget) {
  const int k = static_cast<int>(gadget.params.at("k"));
  ReductionOutput out{compose_with_gadget(base.dataset, k, gadget), "compose", {}, {}, {}};
  out.params = {{"k", static_cast<double>(k)},
                {"base_dim", static_cast<double>(base.dataset.dim())},
                {"base_m", static_cast<double>(base.dataset.size())},
                {"gadget_m", static_cast<double>(gadget.dataset.size())},
                {"n", static_cast<double>(out.dataset.dim())},
                {"m", static_cast<double>(out.dataset.size())}};
  out.certificate = {{"mode", "compose"},
                     {"base_kind", base.kind},
                     {"base_certificate", base.certificate},
                     {"gadget_certificate", gadget.certificate}};
  // both halves carry exactly half of the total weight
  out.certificate["half_weight"] =
      base.dataset.total_weight() * gadget.dataset.total_weight();
  out.witness_recipe = {{"type", "compose"},
                        {"k", k},
                        {"base_dim", base.dataset.dim()},
                        {"base_kind", base.kind},
                        {"base_recipe", base.witness_recipe},
                        {"gadget_recipe", gadget.witness_recipe}};
  return out;
}

ReluNetwork compose_witness(const nlohmann::json& recipe, const ReluNetwork& base_witness) {
  if (recipe.at("type") != "compose")
    throw ValidationError("witness recipe is not a composition recipe");
  const int k = recipe.at("k").get<int>();
  const int base_dim = recipe.at("base_dim").get<int>();
  validate_network(base_witness);
  if (base_witness.k != k || base_witness.dim() != base_dim)
    throw ValidationError("base witness shape does not match the composition");
  for (int a : base_witness.coeffs)
    if (a != 1) throw ValidationError("composition expects an all-ones base witness");

  const ReluNetwork gadget_net = gadget_witness_from_recipe(recipe.at("gadget_recipe"));
  ReluNetwork net;
  net.k = k;
  net.coeffs.assign(k, 1);
  net.unit_weights.assign(k, std::vector<double>(base_dim + k, 0.0));
  for (int j = 0; j < k; ++j) {
    for (int t = 0; t < base_dim; ++t)
      net.unit_weights[j][t] = 0.5 * base_witness.unit_weights[j][t];
    for (int t = 0; t < k; ++t)
      net.unit_weights[j][base_dim + t] = 0.5 * gadget_net.unit_weights[j][t];
  }
  return net;
}

ReluNetwork witness_from_recipe(const nlohmann::json& recipe, const nlohmann::json& solution) {
  const std::string type = recipe.at("type").get<std::string>();
  if (type == "setcover")
    return setcover_witness(recipe, solution.at("cover").get<std::vector<int>>());
  if (type == "mmcs")
    return mmcs_witness(recipe, solution.at("assignment").get<std::vector<bool>>());
  if (type == "dks")
    return dks_witness(recipe, solution.at("vertices").get<std::vector<int>>());
  if (type == "coloring")
    return coloring_witness(recipe, solution.at("coloring").get<std::vector<int>>());
  if (type == "gadget-identity" || type == "gadget-pair") return gadget_witness_from_recipe(recipe);
  if (type == "compose") {
    const ReluNetwork base =
        witness_from_recipe(recipe.at("base_recipe"), solution.at("base_solution"));
    return compose_witness(recipe, base);
  }
  throw ValidationError("unknown witness recipe type: " + type);
}

}  // namespace relu2
