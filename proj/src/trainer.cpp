#include "relu2/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

#include "relu2/eval.hpp"
#include "relu2/solver.hpp"

namespace relu2 {

namespace {

struct Collapsed {
  Eigen::MatrixXd X;             // m_c x n
  Eigen::VectorXd y, w, sqrt_w;
  std::vector<int> origin;       // original sample index -> collapsed row
  int m = 0;
};

// Identical (x, y) rows constrain every unit identically, so they are merged
// by summing weights; this shrinks the enumeration exponent.
Collapsed collapse_duplicates(const Dataset& data) {
  std::map<std::pair<std::vector<double>, double>, int> seen;
  std::vector<int> rows;
  std::vector<double> weights;
  Collapsed c;
  c.origin.resize(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const WeightedSample& s = data.samples()[i];
    auto key = std::make_pair(s.x, s.y);
    auto [it, inserted] = seen.emplace(key, static_cast<int>(rows.size()));
    if (inserted) {
      rows.push_back(static_cast<int>(i));
      weights.push_back(s.weight);
    } else {
      weights[it->second] += s.weight;
    }
    c.origin[i] = it->second;
  }
  c.m = static_cast<int>(rows.size());
  c.X.resize(c.m, data.dim());
  c.y.resize(c.m);
  c.w.resize(c.m);
  c.sqrt_w.resize(c.m);
  for (int r = 0; r < c.m; ++r) {
    const WeightedSample& s = data.samples()[rows[r]];
    for (int j = 0; j < data.dim(); ++j) c.X(r, j) = s.x[j];
    c.y(r) = s.y;
    c.w(r) = weights[r];
    c.sqrt_w(r) = std::sqrt(weights[r]);
  }
  return c;
}

std::vector<int> coeffs_from_index(std::uint64_t ci, int k) {
  // ci's binary digits map to a_1..a_k, most significant first, 0 -> -1:
  // ascending ci enumerates coefficient vectors in lexicographic order.
  std::vector<int> a(k);
  for (int j = 0; j < k; ++j) a[j] = (ci >> (k - 1 - j)) & 1 ? 1 : -1;
  return a;
}

// Unit relabeling within an equal-coefficient group fixes the objective, so
// only patterns whose column bitstrings are sorted within each group are kept.
bool pattern_is_canonical(std::uint64_t pattern, int m, int k, const std::vector<int>& coeffs) {
  for (int j = 0; j + 1 < k; ++j) {
    if (coeffs[j] != coeffs[j + 1]) continue;
    std::uint64_t col_a = 0, col_b = 0;
    for (int i = 0; i < m; ++i) {
      col_a |= ((pattern >> (static_cast<std::uint64_t>(i) * k + j)) & 1u) << i;
      col_b |= ((pattern >> (static_cast<std::uint64_t>(i) * k + j + 1)) & 1u) << i;
    }
    if (col_a > col_b) return false;
  }
  return true;
}

struct Candidate {
  double loss = std::numeric_limits<double>::infinity();
  std::uint64_t joint = ~0ull;
  Eigen::VectorXd z;
  std::vector<int> coeffs;
  std::uint64_t pattern = 0;
  bool clean = true;
};

bool better(const Candidate& a, const Candidate& b) {
  return a.loss < b.loss || (a.loss == b.loss && a.joint < b.joint);
}

struct Enumeration {
  const Collapsed& c;
  int n, k, d;
  bool bounded;
  double total_weight;
  std::vector<std::vector<int>> coeff_candidates;
  std::uint64_t patterns;  // 2^(m*k)
};

class Worker {
 public:
  Worker(const Enumeration& e, const TrainOptions& opts) : e_(e), opts_(opts) {
    prob_.design.resize(e.c.m, e.d);
    prob_.target.resize(e.c.m);
    for (int i = 0; i < e.c.m; ++i) prob_.target(i) = e.c.sqrt_w(i) * e.c.y(i);
    prob_.inequalities.resize(static_cast<std::size_t>(e.c.m) * e.k);
    for (int i = 0; i < e.c.m; ++i)
      for (int j = 0; j < e.k; ++j) {
        LinearConstraint& lc = prob_.inequalities[static_cast<std::size_t>(i) * e.k + j];
        lc.g = Eigen::VectorXd::Zero(e.d);
        lc.g.segment(static_cast<Eigen::Index>(j) * e.n, e.n) = e.c.X.row(i).transpose();
        lc.sense = -1;
      }
    if (e.bounded)
      for (int j = 0; j < e.k; ++j) {
        BallBlock bb;
        bb.radius = 1.0;
        for (int t = 0; t < e.n; ++t) bb.indices.push_back(j * e.n + t);
        prob_.ball_blocks.push_back(bb);
      }
  }

  void solve_joint(std::uint64_t joint, Candidate& best, std::uint64_t& solved) {
    const std::uint64_t ci = joint >> mk_bits();
    const std::uint64_t pattern = joint & (e_.patterns - 1);
    const std::vector<int>& a = e_.coeff_candidates[ci];
    if (opts_.prune_unit_permutations && !pattern_is_canonical(pattern, e_.c.m, e_.k, a))
      return;

    prob_.design.setZero();
    for (int i = 0; i < e_.c.m; ++i)
      for (int j = 0; j < e_.k; ++j) {
        const bool active = (pattern >> (static_cast<std::uint64_t>(i) * e_.k + j)) & 1u;
        prob_.inequalities[static_cast<std::size_t>(i) * e_.k + j].sense = active ? 1 : -1;
        if (active)
          prob_.design.block(i, j * e_.n, 1, e_.n) =
              (a[j] * e_.c.sqrt_w(i)) * e_.c.X.row(i);
      }

    SolveOutcome sol = solve_cls(prob_, opts_.tol, opts_.solver_iteration_budget);
    ++solved;
    Candidate cand;
    cand.loss = 2.0 * sol.objective / e_.total_weight;
    cand.joint = joint;
    cand.z = sol.z_star;
    cand.coeffs = a;
    cand.pattern = pattern;
    cand.clean = sol.status == SolveStatus::converged;
    if (better(cand, best)) best = std::move(cand);
  }

  std::uint64_t mk_bits() const {
    return static_cast<std::uint64_t>(e_.c.m) * static_cast<std::uint64_t>(e_.k);
  }

 private:
  const Enumeration& e_;
  const TrainOptions& opts_;
  ClsProblem prob_;
};

}  // namespace

void TrainOptions::validate(int k) const {
  tol.validate();
  if (threads < 1) throw ValidationError("thread budget must be at least 1");
  if (enumeration_cap_bits < 1 || enumeration_cap_bits > 62)
    throw ValidationError("enumeration cap must be between 1 and 62 bits");
  if (fixed_coeffs) {
    if (static_cast<int>(fixed_coeffs->size()) != k)
      throw ValidationError("fixed coefficient vector length must equal k");
    for (int a : *fixed_coeffs)
      if (a != 1 && a != -1) throw ValidationError("fixed coefficients must be -1 or +1");
  }
}

TrainResult train_exact(const Dataset& data, int k, const TrainOptions& opts) {
  if (k < 1) throw ValidationError("unit count must be positive");
  opts.validate(k);

  Collapsed c = collapse_duplicates(data);
  const int n = data.dim();
  const std::uint64_t mk = static_cast<std::uint64_t>(c.m) * static_cast<std::uint64_t>(k);
  if (mk > static_cast<std::uint64_t>(opts.enumeration_cap_bits))
    throw BudgetError("enumeration needs " + std::to_string(mk) +
                          " pattern bits (cap " + std::to_string(opts.enumeration_cap_bits) +
                          "): 2^" + std::to_string(mk) + " subproblems",
                      static_cast<double>(mk), static_cast<double>(opts.enumeration_cap_bits));

  Enumeration e{c, n, k, n * k, opts.bounded, data.total_weight(), {}, 1ull << mk};
  if (opts.fixed_coeffs) {
    e.coeff_candidates.push_back(*opts.fixed_coeffs);
  } else {
    for (std::uint64_t ci = 0; ci < (1ull << k); ++ci)
      e.coeff_candidates.push_back(coeffs_from_index(ci, k));
  }

  const std::uint64_t total = e.coeff_candidates.size() * e.patterns;
  const int threads = std::max(1, opts.threads);

  Candidate best;
  std::uint64_t solved_total = 0;

  if (threads == 1 || total < 2048) {
    Worker w(e, opts);
    for (std::uint64_t joint = 0; joint < total; ++joint) w.solve_joint(joint, best, solved_total);
  } else {
    // Work pool over fixed chunks; the fold keys on (loss, joint index), so
    // chunk assignment order cannot change the winner.
    std::atomic<std::uint64_t> next{0};
    std::mutex merge_mutex;
    const std::uint64_t chunk = 1024;
    std::vector<std::thread> pool;
    std::uint64_t solved_sum = 0;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&]() {
        Worker w(e, opts);
        Candidate local;
        std::uint64_t local_solved = 0;
        for (;;) {
          const std::uint64_t start = next.fetch_add(chunk);
          if (start >= total) break;
          const std::uint64_t stop = std::min(start + chunk, total);
          for (std::uint64_t joint = start; joint < stop; ++joint)
            w.solve_joint(joint, local, local_solved);
        }
        std::lock_guard<std::mutex> lock(merge_mutex);
        solved_sum += local_solved;
        if (better(local, best)) best = std::move(local);
      });
    }
    for (std::thread& th : pool) th.join();
    solved_total = solved_sum;
  }

  TrainResult res;
  res.loss = best.loss;
  res.coeff_vector = best.coeffs;
  res.solver_clean = best.clean;
  res.subproblems = solved_total;
  res.network.k = k;
  res.network.coeffs = best.coeffs;
  res.network.unit_weights.resize(k);
  for (int j = 0; j < k; ++j) {
    res.network.unit_weights[j].assign(n, 0.0);
    for (int t = 0; t < n; ++t) res.network.unit_weights[j][t] = best.z(j * n + t);
  }
  res.pattern.m = static_cast<int>(data.size());
  res.pattern.k = k;
  res.pattern.bits.assign(data.size() * static_cast<std::size_t>(k), 0);
  for (std::size_t i = 0; i < data.size(); ++i)
    for (int j = 0; j < k; ++j)
      res.pattern.bits[i * k + j] =
          (best.pattern >> (static_cast<std::uint64_t>(c.origin[i]) * k + j)) & 1u;

  // pattern consistency: the convex objective must match the true ReLU loss
  if (std::abs(eval_loss(res.network, data) - res.loss) > opts.tol.loss_tol)
    res.solver_clean = false;
  return res;
}

RealizableResult train_realizable_1relu(const Dataset& data) {
  const int n = data.dim();
  RealizableResult res;
  for (int orientation : {+1, -1}) {
    bool possible = true;
    std::vector<LinearEquality> eqs;
    std::vector<LinearConstraint> ineqs;
    for (const WeightedSample& s : data.samples()) {
      const double label = orientation * s.y;
      Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(s.x.data(), n);
      if (label > 0.0) {
        eqs.push_back({x, label});
      } else if (label == 0.0) {
        ineqs.push_back({x, -1});
      } else {
        possible = false;  // a single unit with this orientation outputs >= 0
        break;
      }
    }
    if (!possible) continue;
    FeasibilityResult f = solve_linear_feasibility(eqs, ineqs, n);
    if (!f.feasible) continue;
    res.realizable = true;
    res.network.k = 1;
    res.network.coeffs = {orientation};
    res.network.unit_weights = {
        std::vector<double>(f.point.data(), f.point.data() + f.point.size())};
    if (eval_loss(res.network, data) <= 1e-9) return res;
    res.realizable = false;
  }
  return res;
}

namespace {

// Axis grid of spacing 2*delta/sqrt(n), radially clipped into the unit ball:
// the clip of the nearest grid node to any ball point is within delta of it.
std::vector<std::vector<double>> covering_net(int n, double delta) {
  const double spacing = 2.0 * delta / std::sqrt(static_cast<double>(n));
  const int half = spacing >= 1.0 ? 0 : static_cast<int>(std::floor(1.0 / spacing));
  std::vector<std::vector<double>> net;
  std::vector<int> idx(n, -half);
  for (;;) {
    std::vector<double> p(n);
    for (int t = 0; t < n; ++t) p[t] = idx[t] * spacing;
    const double nsq = squared_norm(p);
    if (nsq > 1.0) {
      const double scale = 1.0 / std::sqrt(nsq);
      for (double& v : p) v *= scale;
    }
    net.push_back(std::move(p));
    int t = 0;
    while (t < n && ++idx[t] > half) idx[t++] = -half;
    if (t == n) break;
  }
  return net;
}

SignPattern derive_pattern(const ReluNetwork& net, const Dataset& data) {
  SignPattern sp;
  sp.m = static_cast<int>(data.size());
  sp.k = net.k;
  sp.bits.assign(data.size() * static_cast<std::size_t>(net.k), 0);
  for (std::size_t i = 0; i < data.size(); ++i)
    for (int j = 0; j < net.k; ++j) {
      double pre = 0.0;
      for (int t = 0; t < data.dim(); ++t) pre += net.unit_weights[j][t] * data.samples()[i].x[t];
      if (pre > 0.0) sp.bits[i * net.k + j] = 1;
    }
  return sp;
}

TrainResult enumerate_networks(const Dataset& data, int k,
                               const std::vector<std::vector<double>>& points,
                               const TrainOptions& opts) {
  std::vector<std::vector<int>> coeff_candidates;
  if (opts.fixed_coeffs) {
    coeff_candidates.push_back(*opts.fixed_coeffs);
  } else {
    for (std::uint64_t ci = 0; ci < (1ull << k); ++ci)
      coeff_candidates.push_back(coeffs_from_index(ci, k));
  }

  ReluNetwork net;
  net.k = k;
  net.coeffs = coeff_candidates[0];
  net.unit_weights.assign(k, points[0]);

  double best_loss = std::numeric_limits<double>::infinity();
  ReluNetwork best_net;
  for (const std::vector<int>& a : coeff_candidates) {
    net.coeffs = a;
    std::vector<std::size_t> tuple(k, 0);
    for (;;) {
      for (int j = 0; j < k; ++j) net.unit_weights[j] = points[tuple[j]];
      const double loss = eval_loss(net, data);
      if (loss < best_loss) {
        best_loss = loss;
        best_net = net;
      }
      int j = 0;
      while (j < k && ++tuple[j] == points.size()) tuple[j++] = 0;
      if (j == k) break;
    }
  }

  TrainResult res;
  res.network = best_net;
  res.loss = best_loss;
  res.coeff_vector = best_net.coeffs;
  res.pattern = derive_pattern(best_net, data);
  res.subproblems = coeff_candidates.size() * static_cast<std::uint64_t>(
      std::pow(static_cast<double>(points.size()), k));
  return res;
}

}  // namespace

TrainResult train_epsnet(const Dataset& data, int k, double net_spacing, std::uint64_t seed,
                         const TrainOptions& opts, double cap) {
  (void)seed;  // the grid net is deterministic; the seed is accepted for interface stability
  if (k < 1) throw ValidationError("unit count must be positive");
  if (!(net_spacing > 0.0)) throw ValidationError("net spacing must be positive");
  if (!data.bounded()) throw ValidationError("covering-net training requires a bounded dataset");
  opts.validate(k);

  const int n = data.dim();
  const double log_estimate =
      static_cast<double>(k) * n * std::log(std::max(3.0 / net_spacing, 1.0));
  if (log_estimate > std::log(cap))
    throw BudgetError("covering net of (3/delta)^(k*n) = e^" + std::to_string(log_estimate) +
                          " points exceeds the cap",
                      std::exp(log_estimate), cap);

  std::vector<std::vector<double>> net = covering_net(n, net_spacing);
  const double tuples = std::pow(static_cast<double>(net.size()), k) *
                        (opts.fixed_coeffs ? 1.0 : std::pow(2.0, k));
  if (tuples > cap)
    throw BudgetError("covering-net enumeration needs " + std::to_string(tuples) +
                          " evaluations (cap " + std::to_string(cap) + ")",
                      tuples, cap);
  return enumerate_networks(data, k, net, opts);
}

TrainResult brute_force_oracle(const Dataset& data, int k, double grid_step, double box_radius,
                               const TrainOptions& opts, double cap) {
  if (k < 1) throw ValidationError("unit count must be positive");
  if (!(grid_step > 0.0) || !(box_radius > 0.0))
    throw ValidationError("grid step and box radius must be positive");
  opts.validate(k);

  const int n = data.dim();
  const int count = static_cast<int>(std::floor(2.0 * box_radius / grid_step + 1e-9)) + 1;
  const double total = std::pow(static_cast<double>(count), k * n) *
                       (opts.fixed_coeffs ? 1.0 : std::pow(2.0, k));
  if (total > cap)
    throw BudgetError("grid enumeration needs " + std::to_string(total) + " evaluations (cap " +
                          std::to_string(cap) + ")",
                      total, cap);

  // one shared pool of per-coordinate values, enumerated per unit coordinate
  std::vector<double> values(count);
  for (int t = 0; t < count; ++t) values[t] = -box_radius + t * grid_step;

  std::vector<std::vector<int>> coeff_candidates;
  if (opts.fixed_coeffs) {
    coeff_candidates.push_back(*opts.fixed_coeffs);
  } else {
    for (std::uint64_t ci = 0; ci < (1ull << k); ++ci)
      coeff_candidates.push_back(coeffs_from_index(ci, k));
  }

  ReluNetwork net;
  net.k = k;
  net.unit_weights.assign(k, std::vector<double>(n, 0.0));

  double best_loss = std::numeric_limits<double>::infinity();
  ReluNetwork best_net;
  std::uint64_t evals = 0;
  for (const std::vector<int>& a : coeff_candidates) {
    net.coeffs = a;
    std::vector<int> idx(static_cast<std::size_t>(k) * n, 0);
    for (;;) {
      for (int j = 0; j < k; ++j) {
        double nsq = 0.0;
        for (int t = 0; t < n; ++t) {
          net.unit_weights[j][t] = values[idx[static_cast<std::size_t>(j) * n + t]];
          nsq += net.unit_weights[j][t] * net.unit_weights[j][t];
        }
        if (opts.bounded && nsq > 1.0) {
          const double scale = 1.0 / std::sqrt(nsq);
          for (int t = 0; t < n; ++t) net.unit_weights[j][t] *= scale;
        }
      }
      const double loss = eval_loss(net, data);
      ++evals;
      if (loss < best_loss) {
        best_loss = loss;
        best_net = net;
      }
      std::size_t t = 0;
      while (t < idx.size() && ++idx[t] == count) idx[t++] = 0;
      if (t == idx.size()) break;
    }
  }

  TrainResult res;
  res.network = best_net;
  res.loss = best_loss;
  res.coeff_vector = best_net.coeffs;
  res.pattern = derive_pattern(best_net, data);
  res.subproblems = evals;
  return res;
}

double oracle_grid_resolution_bound(const Dataset& data, int k, double grid_step) {
  const double rho = grid_step * std::sqrt(static_cast<double>(data.dim())) / 2.0;
  double acc = 0.0;
  for (const WeightedSample& s : data.samples()) {
    const double xn = std::sqrt(squared_norm(s.x));
    const double reach = k * rho * xn;
    const double resid = k * xn + std::abs(s.y);
    acc += s.weight * (2.0 * resid * reach + reach * reach);
  }
  return acc / data.total_weight();
}

}  // namespace relu2
