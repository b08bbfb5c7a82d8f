#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace relu2 {

/// Thrown when an input violates a documented precondition or invariant.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Thrown by the densest-subgraph generator when the certified gap formula
/// evaluates to a non-positive value at the requested instance scale.
struct NonPositiveGapError : std::runtime_error {
  double epsilon;
  explicit NonPositiveGapError(double eps)
      : std::runtime_error("gap formula is non-positive at this scale: epsilon = " +
                           std::to_string(eps)),
        epsilon(eps) {}
};

/// Thrown when an enumeration would exceed its configured budget. Carries the
/// budget that would have been required so callers can report or raise caps.
struct BudgetError : std::runtime_error {
  double required;
  double cap;
  BudgetError(const std::string& what, double required_, double cap_)
      : std::runtime_error(what), required(required_), cap(cap_) {}
};

/// Thrown when randomized point-set generation fails repeatedly.
struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A feature vector with a label and a positive weight. The weight acts as a
/// fractional multiplicity: a weight of c is equivalent to c copies.
struct WeightedSample {
  std::vector<double> x;
  double y = 0.0;
  double weight = 1.0;
};

/// Immutable collection of weighted samples in a fixed dimension. When the
/// bounded flag is set every feature vector must lie in the unit ball.
class Dataset {
 public:
  Dataset(int dim, bool bounded, std::vector<WeightedSample> samples);

  int dim() const { return dim_; }
  bool bounded() const { return bounded_; }
  const std::vector<WeightedSample>& samples() const { return samples_; }
  double total_weight() const { return total_weight_; }
  std::size_t size() const { return samples_.size(); }

 private:
  int dim_;
  bool bounded_;
  std::vector<WeightedSample> samples_;
  double total_weight_;
};

/// A depth-2 network: k unit weight vectors and a coefficient in {-1,+1} per
/// unit. Evaluates to sum_j coeffs[j] * max(0, <unit_weights[j], x>).
struct ReluNetwork {
  int k = 0;
  std::vector<std::vector<double>> unit_weights;
  std::vector<int> coeffs;

  int dim() const { return unit_weights.empty() ? 0 : static_cast<int>(unit_weights[0].size()); }
};

/// Checks the structural invariants of a network; with bounded set, also
/// checks that every unit weight vector lies in the unit ball (tol 1e-12).
void validate_network(const ReluNetwork& net, bool bounded = false);

struct Tolerances {
  double kkt_tol = 1e-8;
  double loss_tol = 1e-6;
  double rank_tol = 1e-9;

  void validate() const {
    if (!(kkt_tol > 0.0) || !(loss_tol > 0.0) || !(rank_tol > 0.0))
      throw ValidationError("tolerances must be strictly positive");
  }
};

inline double squared_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double t : v) s += t * t;
  return s;
}

}  // namespace relu2
