#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "json.hpp"
#include "relu2/types.hpp"

namespace relu2 {

/// Homogeneous halfspace on z: sense +1 means g.z >= 0, sense -1 means g.z <= 0.
struct LinearConstraint {
  Eigen::VectorXd g;
  int sense = -1;
};

/// Euclidean-ball bound on a sub-vector of z. Index sets of distinct blocks
/// must be disjoint.
struct BallBlock {
  std::vector<int> indices;
  double radius = 1.0;
};

/// Least squares over an intersection of homogeneous halfspaces and ball
/// blocks: minimize 0.5 * ||design z - target||^2. z = 0 is always feasible.
struct ClsProblem {
  Eigen::MatrixXd design;
  Eigen::VectorXd target;
  std::vector<LinearConstraint> inequalities;
  std::vector<BallBlock> ball_blocks;

  void validate() const;

  /// Diagnostic dump for bug reports.
  nlohmann::json to_json() const;
};

enum class SolveStatus { converged, budget_exhausted };

struct SolveOutcome {
  Eigen::VectorXd z_star;
  double objective = 0.0;      // 0.5 * ||A z - b||^2 at z_star
  double kkt_residual = 0.0;   // max of scaled stationarity, feasibility, complementarity
  std::int64_t iterations = 0;
  SolveStatus status = SolveStatus::converged;
};

/// Deterministic solve to kkt_residual <= tol.kkt_tol. An interior-point pass
/// localizes the active set, then an exact equality-constrained polish step
/// removes the tail error; the reported residual is measured at the returned
/// point. Never reports infeasibility: z = 0 satisfies every constraint.
SolveOutcome solve_cls(const ClsProblem& p, const Tolerances& tol,
                       std::uint64_t iteration_budget = 100000);

struct LinearEquality {
  Eigen::VectorXd a;
  double rhs = 0.0;
};

struct FeasibilityResult {
  bool feasible = false;
  Eigen::VectorXd point;
  double max_violation = 0.0;  // over equalities and inequalities at `point`
};

/// Finds a point satisfying the equalities and homogeneous inequalities to
/// within 1e-9, or reports infeasibility (the least-squares distance to the
/// equalities over the inequality cone is strictly positive).
FeasibilityResult solve_linear_feasibility(const std::vector<LinearEquality>& equalities,
                                           const std::vector<LinearConstraint>& inequalities,
                                           int dim);

}  // namespace relu2
