#pragma once

#include <span>
#include <vector>

#include "relu2/types.hpp"

namespace relu2 {

/// sum_j coeffs[j] * max(0, <unit_weights[j], x>). Rejects dimension mismatch.
double eval_network(const ReluNetwork& net, std::span<const double> x);

/// Weighted average squared error: (1/W) * sum_i w_i (f(x_i) - y_i)^2 with
/// W the dataset total weight. Equals the plain multiset average when the
/// weights are copy counts.
double eval_loss(const ReluNetwork& net, const Dataset& data);

/// Absorbs arbitrary nonzero coefficients into the unit weights: the result
/// has coeffs sign(a_j) and units |a_j| * w_j and evaluates identically.
ReluNetwork normalize_coefficients(const std::vector<double>& general_coeffs,
                                   const std::vector<std::vector<double>>& unit_weights);

struct BoundedViolation {
  std::size_t sample_index;
  double norm;
  double label;
  bool norm_violation;
  bool label_violation;
};

struct BoundedReport {
  std::vector<BoundedViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Reports every sample with ||x|| > 1 or |y| > k (tolerance 1e-12).
BoundedReport check_bounded(const Dataset& data, int k);

/// Extends every sample with zero coordinates up to new_dim.
Dataset pad_dimensions(const Dataset& data, int new_dim);

}  // namespace relu2
