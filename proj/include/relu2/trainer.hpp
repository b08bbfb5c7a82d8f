#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "relu2/types.hpp"

namespace relu2 {

/// Per-(sample, unit) activity guesses: bit(i, j) = 1 means unit j was guessed
/// active on sample i, which constrains <w_j, x_i> >= 0 (<= 0 otherwise).
struct SignPattern {
  int m = 0;
  int k = 0;
  std::vector<std::uint8_t> bits;  // row-major, bits[i * k + j]

  std::uint8_t bit(int i, int j) const { return bits[static_cast<std::size_t>(i) * k + j]; }
  std::string to_bitstring() const {
    std::string s(bits.size(), '0');
    for (std::size_t t = 0; t < bits.size(); ++t)
      if (bits[t]) s[t] = '1';
    return s;
  }
};

struct TrainOptions {
  bool bounded = false;  // adds a unit-ball block per unit to every subproblem
  std::optional<std::vector<int>> fixed_coeffs;
  bool prune_unit_permutations = true;
  int threads = 1;
  int enumeration_cap_bits = 24;  // refuse when (collapsed m) * k exceeds this
  Tolerances tol{};
  std::uint64_t solver_iteration_budget = 100000;

  void validate(int k) const;
};

struct TrainResult {
  ReluNetwork network;
  double loss = 0.0;               // weighted average squared error at the optimum
  SignPattern pattern;             // over the original (uncollapsed) samples
  std::vector<int> coeff_vector;
  bool solver_clean = true;        // false when any subproblem hit its budget
  std::uint64_t subproblems = 0;   // convex programs actually solved
};

/// Globally optimal training by enumerating coefficient vectors and sign
/// patterns and solving one convex program per guess. Ties are broken by the
/// lexicographically smallest (coeff_vector, pattern); identical (x, y) rows
/// are merged by summing weights before enumeration.
TrainResult train_exact(const Dataset& data, int k, const TrainOptions& opts);

struct RealizableResult {
  bool realizable = false;
  ReluNetwork network;  // valid only when realizable
};

/// Zero-error 1-ReLU fit via two linear feasibility problems (one per
/// coefficient orientation); reports not-realizable when both fail.
RealizableResult train_realizable_1relu(const Dataset& data);

/// Covering-net baseline over the unit ball per unit. Requires bounded data.
/// The returned loss is within 4*k^2*delta + k^2*delta^2 of the bounded
/// optimum (each unit is 1-Lipschitz in its weights and |f - y| <= 2k).
TrainResult train_epsnet(const Dataset& data, int k, double net_spacing, std::uint64_t seed,
                         const TrainOptions& opts = {}, double cap = 1e7);

/// Exhaustive minimum over a coordinate grid per unit crossed with all
/// coefficient vectors. Test oracle; intentionally simple. With opts.bounded
/// every grid point is radially clipped to the unit ball per unit.
TrainResult brute_force_oracle(const Dataset& data, int k, double grid_step, double box_radius,
                               const TrainOptions& opts = {}, double cap = 5e7);

/// Worst-case additive gap between the oracle minimum over the (clipped) grid
/// and the true bounded optimum, from the rounding radius per unit:
/// avg_i w_i * [2 R_i k rho ||x_i|| + (k rho ||x_i||)^2], rho = step*sqrt(n)/2,
/// R_i = k||x_i|| + |y_i|.
double oracle_grid_resolution_bound(const Dataset& data, int k, double grid_step);

}  // namespace relu2
