#include "relu2/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace relu2 {

namespace {

constexpr double kFeasEps = 1e-11;   // feasibility slack accepted in the polish step
constexpr double kMultEps = 1e-9;    // multiplier sign slack before a constraint is dropped
constexpr int kIpmMaxIter = 200;
constexpr int kPolishMaxIter = 60;

struct Workspace {
  // constraint values c_i(z) >= 0 and their gradients (rows of J)
  Eigen::VectorXd c;
  Eigen::MatrixXd J;
};

// c and J for the stacked constraint list: first the linear halfspaces as
// c = sense * (g.z), then each ball block as c = 0.5*(r^2 - ||z_B||^2).
void eval_constraints(const ClsProblem& p, const Eigen::VectorXd& z, Workspace& ws) {
  const int nl = static_cast<int>(p.inequalities.size());
  const int nb = static_cast<int>(p.ball_blocks.size());
  const int d = static_cast<int>(p.design.cols());
  ws.c.resize(nl + nb);
  ws.J.resize(nl + nb, d);
  for (int i = 0; i < nl; ++i) {
    const LinearConstraint& lc = p.inequalities[i];
    const double s = static_cast<double>(lc.sense);
    ws.c(i) = s * lc.g.dot(z);
    ws.J.row(i) = s * lc.g.transpose();
  }
  for (int b = 0; b < nb; ++b) {
    const BallBlock& bb = p.ball_blocks[b];
    double nsq = 0.0;
    ws.J.row(nl + b).setZero();
    for (int idx : bb.indices) {
      nsq += z(idx) * z(idx);
      ws.J(nl + b, idx) = -z(idx);
    }
    ws.c(nl + b) = 0.5 * (bb.radius * bb.radius - nsq);
  }
}

double objective_at(const ClsProblem& p, const Eigen::VectorXd& z) {
  return 0.5 * (p.design * z - p.target).squaredNorm();
}

// KKT residual at (z, lambda): scaled stationarity, primal violation,
// complementarity. lambda is over the stacked constraint list.
double kkt_residual_at(const ClsProblem& p, const Eigen::MatrixXd& AtA,
                       const Eigen::VectorXd& Atb, const Eigen::VectorXd& z,
                       const Eigen::VectorXd& lambda, Workspace& ws) {
  eval_constraints(p, z, ws);
  const double dual_scale = 1.0 + Atb.lpNorm<Eigen::Infinity>();
  Eigen::VectorXd stat = AtA * z - Atb;
  if (lambda.size() > 0) stat -= ws.J.transpose() * lambda;
  double res = stat.lpNorm<Eigen::Infinity>() / dual_scale;
  for (int i = 0; i < ws.c.size(); ++i) {
    res = std::max(res, -ws.c(i));                                  // primal violation
    res = std::max(res, std::abs(lambda(i) * ws.c(i)) / dual_scale);  // complementarity
    res = std::max(res, -lambda(i));                                 // dual sign
  }
  return res;
}

double max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
  double a = 1.0;
  for (int i = 0; i < v.size(); ++i)
    if (dv(i) < 0.0) a = std::min(a, -0.995 * v(i) / dv(i));
  return a;
}

struct IpmResult {
  Eigen::VectorXd z;
  Eigen::VectorXd lambda;
  int iterations = 0;
  bool converged = false;
};

IpmResult run_ipm(const ClsProblem& p, const Eigen::MatrixXd& AtA, const Eigen::VectorXd& Atb,
                  double target_tol, std::int64_t budget) {
  const int d = static_cast<int>(p.design.cols());
  const int nl = static_cast<int>(p.inequalities.size());
  const int nb = static_cast<int>(p.ball_blocks.size());
  const int pc = nl + nb;

  IpmResult out;
  out.z = Eigen::VectorXd::Zero(d);
  out.lambda = Eigen::VectorXd::Ones(pc);
  Eigen::VectorXd s = Eigen::VectorXd::Ones(pc);

  Workspace ws;
  const double dual_scale = 1.0 + Atb.lpNorm<Eigen::Infinity>();
  const int max_iter = static_cast<int>(std::min<std::int64_t>(kIpmMaxIter, budget));
  double best_err = std::numeric_limits<double>::infinity();
  int stall = 0;

  for (out.iterations = 0; out.iterations < max_iter; ++out.iterations) {
    eval_constraints(p, out.z, ws);
    Eigen::VectorXd F = AtA * out.z - Atb;
    Eigen::VectorXd rd = F - ws.J.transpose() * out.lambda;
    Eigen::VectorXd rp = ws.c - s;
    const double mu = s.dot(out.lambda) / pc;

    double pinf = 0.0;
    for (int i = 0; i < pc; ++i) pinf = std::max(pinf, -ws.c(i));
    const double derr = rd.lpNorm<Eigen::Infinity>() / dual_scale;
    const double err = std::max({pinf, derr, mu / dual_scale});
    if (err <= target_tol) {
      out.converged = true;
      break;
    }
    if (err < 0.5 * best_err) {
      best_err = err;
      stall = 0;
    } else if (++stall > 25) {
      break;  // no longer improving; hand over to the polish step
    }

    // Hessian of the Lagrangian: AtA plus lambda_b on active ball diagonals.
    Eigen::MatrixXd H = AtA;
    for (int b = 0; b < nb; ++b)
      for (int idx : p.ball_blocks[b].indices) H(idx, idx) += out.lambda(nl + b);

    Eigen::VectorXd D = out.lambda.cwiseQuotient(s);
    Eigen::MatrixXd M = H + ws.J.transpose() * D.asDiagonal() * ws.J;
    // tiny ridge keeps the factorization well-posed on rank-deficient patterns
    const double ridge = 1e-13 * (1.0 + M.diagonal().cwiseAbs().maxCoeff());
    M.diagonal().array() += ridge;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(M);

    // affine (predictor) direction: complementarity target 0
    Eigen::VectorXd rhs_aff = -F - ws.J.transpose() * (D.cwiseProduct(rp));
    Eigen::VectorXd dz_aff = ldlt.solve(rhs_aff);
    Eigen::VectorXd ds_aff = ws.J * dz_aff + rp;
    Eigen::VectorXd dl_aff = -out.lambda - D.cwiseProduct(ds_aff);

    const double a_aff = std::min(max_step(s, ds_aff), max_step(out.lambda, dl_aff));
    const double mu_aff =
        (s + a_aff * ds_aff).dot(out.lambda + a_aff * dl_aff) / pc;
    double sigma = mu > 0 ? std::pow(mu_aff / mu, 3.0) : 0.0;
    sigma = std::clamp(sigma, 1e-8, 1.0);

    // corrector: complementarity target sigma*mu minus the predictor cross term
    Eigen::VectorXd rc =
        out.lambda.cwiseProduct(s) + dl_aff.cwiseProduct(ds_aff) -
        Eigen::VectorXd::Constant(pc, sigma * mu);
    Eigen::VectorXd rhs =
        -rd - ws.J.transpose() * (rc.cwiseQuotient(s) + D.cwiseProduct(rp));
    Eigen::VectorXd dz = ldlt.solve(rhs);
    Eigen::VectorXd ds = ws.J * dz + rp;
    Eigen::VectorXd dl = -rc.cwiseQuotient(s) - D.cwiseProduct(ds);

    const double ap = max_step(s, ds);
    const double ad = max_step(out.lambda, dl);
    out.z += ap * dz;
    s += ap * ds;
    out.lambda += ad * dl;
  }
  return out;
}

// Exact solve of: minimize 0.5||Az-b||^2 subject to the rows of G annihilating
// z and fixed ball multipliers lam_ball on the given blocks. Returns the
// stationary point and the equality multipliers through `mult`.
struct EqSolve {
  Eigen::VectorXd z;
  Eigen::VectorXd mult;
};

EqSolve solve_eq_kkt(const Eigen::MatrixXd& AtA, const Eigen::VectorXd& Atb,
                     const Eigen::MatrixXd& G, const ClsProblem& p,
                     const std::vector<int>& active_balls, const Eigen::VectorXd& lam_ball) {
  const int d = static_cast<int>(AtA.cols());
  const int a = static_cast<int>(G.rows());
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(d + a, d + a);
  K.topLeftCorner(d, d) = AtA;
  const int nl = static_cast<int>(p.inequalities.size());
  for (std::size_t t = 0; t < active_balls.size(); ++t) {
    const BallBlock& bb = p.ball_blocks[active_balls[t] - nl];
    for (int idx : bb.indices) K(idx, idx) += lam_ball(t);
  }
  if (a > 0) {
    K.topRightCorner(d, a) = -G.transpose();
    K.bottomLeftCorner(a, d) = G;
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d + a);
  rhs.head(d) = Atb;
  // complete orthogonal decomposition: minimum-norm solution on singular KKT
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(K);
  Eigen::VectorXd sol = cod.solve(rhs);
  return {sol.head(d), sol.tail(a)};
}

struct PolishResult {
  Eigen::VectorXd z;
  Eigen::VectorXd lambda;  // stacked, zero on inactive constraints
  bool ok = false;
};

PolishResult polish(const ClsProblem& p, const Eigen::MatrixXd& AtA, const Eigen::VectorXd& Atb,
                    const IpmResult& ipm, Workspace& ws) {
  const int d = static_cast<int>(p.design.cols());
  const int nl = static_cast<int>(p.inequalities.size());
  const int nb = static_cast<int>(p.ball_blocks.size());
  const int pc = nl + nb;
  PolishResult res;

  eval_constraints(p, ipm.z, ws);
  std::vector<int> active;   // linear constraint ids
  std::vector<int> aballs;   // stacked ids nl..nl+nb-1
  for (int i = 0; i < nl; ++i)
    if (ipm.lambda(i) > std::max(ws.c(i), 0.0)) active.push_back(i);
  for (int b = 0; b < nb; ++b)
    if (ipm.lambda(nl + b) > std::max(ws.c(nl + b), 0.0)) aballs.push_back(nl + b);

  const double scale = 1.0 + Atb.lpNorm<Eigen::Infinity>();

  struct MergedRow {
    Eigen::VectorXd grad;          // gradient of the representative constraint
    std::vector<int> same_ids;     // active ids with exactly this gradient
    std::vector<int> opposite_ids; // active ids with exactly the negated gradient
  };

  for (int round = 0; round < kPolishMaxIter; ++round) {
    // Merge identical active rows; an exactly opposed pair pins g.z = 0 with
    // a sign-free multiplier (the negative part belongs to the opposite row).
    std::vector<MergedRow> rows;
    for (int id : active) {
      const Eigen::VectorXd gi =
          static_cast<double>(p.inequalities[id].sense) * p.inequalities[id].g;
      bool merged = false;
      for (MergedRow& row : rows) {
        if ((gi - row.grad).lpNorm<Eigen::Infinity>() == 0.0) {
          row.same_ids.push_back(id);
          merged = true;
          break;
        }
        if ((gi + row.grad).lpNorm<Eigen::Infinity>() == 0.0) {
          row.opposite_ids.push_back(id);
          merged = true;
          break;
        }
      }
      if (!merged) rows.push_back({gi, {id}, {}});
    }

    Eigen::MatrixXd G(rows.size(), d);
    for (std::size_t r = 0; r < rows.size(); ++r) G.row(r) = rows[r].grad.transpose();

    Eigen::VectorXd lam_ball = Eigen::VectorXd::Zero(aballs.size());
    for (std::size_t t = 0; t < aballs.size(); ++t)
      lam_ball(t) = std::max(ipm.lambda(aballs[t]), 1e-8);

    EqSolve eq = solve_eq_kkt(AtA, Atb, G, p, aballs, lam_ball);

    // Newton on the active ball radii: drive ||z_B||^2 to r^2 in lam_ball.
    bool ball_failed = false;
    if (!aballs.empty()) {
      for (int it = 0; it < 40; ++it) {
        Eigen::VectorXd psi(aballs.size());
        double worst = 0.0;
        for (std::size_t t = 0; t < aballs.size(); ++t) {
          const BallBlock& bb = p.ball_blocks[aballs[t] - nl];
          double nsq = 0.0;
          for (int idx : bb.indices) nsq += eq.z(idx) * eq.z(idx);
          psi(t) = nsq - bb.radius * bb.radius;
          worst = std::max(worst, std::abs(psi(t)) / (bb.radius * bb.radius));
        }
        if (worst <= 1e-13) break;
        if (it == 39) ball_failed = true;

        // Jacobian d psi_t / d lam_u via one KKT solve per active ball
        const int a = static_cast<int>(G.rows());
        Eigen::MatrixXd K = Eigen::MatrixXd::Zero(d + a, d + a);
        K.topLeftCorner(d, d) = AtA;
        for (std::size_t t = 0; t < aballs.size(); ++t) {
          const BallBlock& bb = p.ball_blocks[aballs[t] - nl];
          for (int idx : bb.indices) K(idx, idx) += lam_ball(t);
        }
        if (a > 0) {
          K.topRightCorner(d, a) = -G.transpose();
          K.bottomLeftCorner(a, d) = G;
        }
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(K);
        Eigen::MatrixXd Jpsi(aballs.size(), aballs.size());
        for (std::size_t u = 0; u < aballs.size(); ++u) {
          Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d + a);
          const BallBlock& bu = p.ball_blocks[aballs[u] - nl];
          for (int idx : bu.indices) rhs(idx) = -eq.z(idx);
          Eigen::VectorXd dzl = cod.solve(rhs);
          for (std::size_t t = 0; t < aballs.size(); ++t) {
            const BallBlock& bt = p.ball_blocks[aballs[t] - nl];
            double acc = 0.0;
            for (int idx : bt.indices) acc += 2.0 * eq.z(idx) * dzl(idx);
            Jpsi(t, u) = acc;
          }
        }
        Eigen::VectorXd dl = Jpsi.completeOrthogonalDecomposition().solve(-psi);
        double step = 1.0;
        for (std::size_t t = 0; t < aballs.size(); ++t)
          if (dl(t) < 0.0 && lam_ball(t) + dl(t) < 0.0)
            step = std::min(step, -lam_ball(t) / dl(t));
        lam_ball += step * dl;
        for (std::size_t t = 0; t < aballs.size(); ++t) lam_ball(t) = std::max(lam_ball(t), 0.0);
        eq = solve_eq_kkt(AtA, Atb, G, p, aballs, lam_ball);
        if (step < 1e-12) break;
      }
      // drop balls whose multiplier collapsed to zero but are now interior
      bool dropped = false;
      for (std::size_t t = 0; t < aballs.size(); ++t) {
        const BallBlock& bb = p.ball_blocks[aballs[t] - nl];
        double nsq = 0.0;
        for (int idx : bb.indices) nsq += eq.z(idx) * eq.z(idx);
        if (lam_ball(t) == 0.0 && nsq < bb.radius * bb.radius * (1.0 - 1e-12)) {
          aballs.erase(aballs.begin() + t);
          dropped = true;
          break;
        }
      }
      if (dropped) continue;
      if (ball_failed) return res;  // fall back to the interior-point iterate
    }

    // multiplier signs on active linear rows; rows with an opposite partner
    // act as equalities and carry a sign-free multiplier
    int drop_row = -1;
    double most_negative = -kMultEps * scale;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (!rows[r].opposite_ids.empty()) continue;
      if (eq.mult(static_cast<Eigen::Index>(r)) < most_negative) {
        most_negative = eq.mult(static_cast<Eigen::Index>(r));
        drop_row = static_cast<int>(r);
      }
    }
    if (drop_row >= 0) {
      for (int id : rows[drop_row].same_ids)
        active.erase(std::remove(active.begin(), active.end(), id), active.end());
      continue;
    }

    // feasibility of every constraint at the polished point
    eval_constraints(p, eq.z, ws);
    int add = -1;
    double worst_violation = -kFeasEps * scale;
    for (int i = 0; i < pc; ++i) {
      const bool is_active = (i < nl)
                                 ? std::find(active.begin(), active.end(), i) != active.end()
                                 : std::find(aballs.begin(), aballs.end(), i) != aballs.end();
      if (is_active) continue;
      if (ws.c(i) < worst_violation) {
        worst_violation = ws.c(i);
        add = i;
      }
    }
    if (add >= 0) {
      if (add < nl)
        active.push_back(add);
      else
        aballs.push_back(add);
      continue;
    }

    // success: assemble stacked multipliers, splitting sign-free multipliers
    // between the row and its opposite partner
    res.z = eq.z;
    res.lambda = Eigen::VectorXd::Zero(pc);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const double nu = eq.mult(static_cast<Eigen::Index>(r));
      if (nu >= 0.0)
        res.lambda(rows[r].same_ids.front()) = nu;
      else if (!rows[r].opposite_ids.empty())
        res.lambda(rows[r].opposite_ids.front()) = -nu;
    }
    for (std::size_t t = 0; t < aballs.size(); ++t) res.lambda(aballs[t]) = lam_ball(t);
    res.ok = true;
    return res;
  }
  return res;
}

}  // namespace

void ClsProblem::validate() const {
  const int d = static_cast<int>(design.cols());
  if (design.rows() != target.size())
    throw ValidationError("design row count does not match target length");
  for (const LinearConstraint& lc : inequalities) {
    if (lc.g.size() != d) throw ValidationError("inequality vector has wrong length");
    if (lc.sense != 1 && lc.sense != -1) throw ValidationError("inequality sense must be +-1");
  }
  std::vector<char> used(d, 0);
  for (const BallBlock& bb : ball_blocks) {
    if (!(bb.radius > 0.0)) throw ValidationError("ball radius must be positive");
    for (int idx : bb.indices) {
      if (idx < 0 || idx >= d) throw ValidationError("ball index out of range");
      if (used[idx]) throw ValidationError("ball blocks must be disjoint");
      used[idx] = 1;
    }
  }
  // z = 0 satisfies every homogeneous halfspace and every ball bound.
}

nlohmann::json ClsProblem::to_json() const {
  nlohmann::json j;
  j["rows"] = design.rows();
  j["cols"] = design.cols();
  j["design"] = nlohmann::json::array();
  for (Eigen::Index r = 0; r < design.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < design.cols(); ++c) row.push_back(design(r, c));
    j["design"].push_back(row);
  }
  j["target"] = std::vector<double>(target.data(), target.data() + target.size());
  j["inequalities"] = nlohmann::json::array();
  for (const LinearConstraint& lc : inequalities) {
    nlohmann::json e;
    e["g"] = std::vector<double>(lc.g.data(), lc.g.data() + lc.g.size());
    e["sense"] = lc.sense;
    j["inequalities"].push_back(e);
  }
  j["ball_blocks"] = nlohmann::json::array();
  for (const BallBlock& bb : ball_blocks) {
    nlohmann::json e;
    e["indices"] = bb.indices;
    e["radius"] = bb.radius;
    j["ball_blocks"].push_back(e);
  }
  return j;
}

SolveOutcome solve_cls(const ClsProblem& p, const Tolerances& tol,
                       std::uint64_t iteration_budget) {
  p.validate();
  tol.validate();
  const int pc = static_cast<int>(p.inequalities.size() + p.ball_blocks.size());

  SolveOutcome out;
  Workspace ws;

  if (pc == 0) {
    // unconstrained: minimum-norm least squares, exact
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(p.design);
    out.z_star = cod.solve(p.target);
    out.objective = objective_at(p, out.z_star);
    out.iterations = 0;
    Eigen::MatrixXd AtA = p.design.transpose() * p.design;
    Eigen::VectorXd Atb = p.design.transpose() * p.target;
    out.kkt_residual = (AtA * out.z_star - Atb).lpNorm<Eigen::Infinity>() /
                       (1.0 + Atb.lpNorm<Eigen::Infinity>());
    out.status = SolveStatus::converged;
    return out;
  }

  const Eigen::MatrixXd AtA = p.design.transpose() * p.design;
  const Eigen::VectorXd Atb = p.design.transpose() * p.target;

  // Shortcut: if the unconstrained minimum-norm solution is already feasible
  // it is optimal (all multipliers zero).
  {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(p.design);
    Eigen::VectorXd z0 = cod.solve(p.target);
    eval_constraints(p, z0, ws);
    if (ws.c.minCoeff() >= 0.0) {
      out.z_star = z0;
      out.objective = objective_at(p, z0);
      out.iterations = 0;
      out.kkt_residual = kkt_residual_at(p, AtA, Atb, z0, Eigen::VectorXd::Zero(pc), ws);
      out.status =
          out.kkt_residual <= tol.kkt_tol ? SolveStatus::converged : SolveStatus::budget_exhausted;
      return out;
    }
  }

  IpmResult ipm = run_ipm(p, AtA, Atb, 0.1 * tol.kkt_tol, iteration_budget);
  PolishResult pol = polish(p, AtA, Atb, ipm, ws);

  Eigen::VectorXd z = pol.ok ? pol.z : ipm.z;
  Eigen::VectorXd lambda = pol.ok ? pol.lambda : ipm.lambda;
  if (pol.ok && objective_at(p, pol.z) > objective_at(p, ipm.z)) {
    // keep whichever point certifies better; both are then measured honestly
    const double k_pol = kkt_residual_at(p, AtA, Atb, pol.z, pol.lambda, ws);
    const double k_ipm = kkt_residual_at(p, AtA, Atb, ipm.z, ipm.lambda, ws);
    if (k_ipm < k_pol) {
      z = ipm.z;
      lambda = ipm.lambda;
    }
  }

  out.z_star = z;
  out.objective = objective_at(p, z);
  out.iterations = ipm.iterations;
  out.kkt_residual = kkt_residual_at(p, AtA, Atb, z, lambda, ws);
  out.status =
      out.kkt_residual <= tol.kkt_tol ? SolveStatus::converged : SolveStatus::budget_exhausted;
  return out;
}

FeasibilityResult solve_linear_feasibility(const std::vector<LinearEquality>& equalities,
                                           const std::vector<LinearConstraint>& inequalities,
                                           int dim) {
  if (dim <= 0) throw ValidationError("dimension must be positive");
  for (const LinearEquality& eq : equalities)
    if (eq.a.size() != dim) throw ValidationError("equality vector has wrong length");

  ClsProblem p;
  p.design.resize(static_cast<Eigen::Index>(equalities.size()), dim);
  p.target.resize(static_cast<Eigen::Index>(equalities.size()));
  for (std::size_t i = 0; i < equalities.size(); ++i) {
    p.design.row(static_cast<Eigen::Index>(i)) = equalities[i].a.transpose();
    p.target(static_cast<Eigen::Index>(i)) = equalities[i].rhs;
  }
  if (equalities.empty()) {
    p.design.resize(0, dim);
    p.target.resize(0);
  }
  p.inequalities = inequalities;

  Tolerances tol;
  tol.kkt_tol = 1e-10;
  SolveOutcome sol = solve_cls(p, tol);

  FeasibilityResult res;
  res.point = sol.z_star;
  double viol = 0.0;
  for (std::size_t i = 0; i < equalities.size(); ++i)
    viol = std::max(viol, std::abs(equalities[i].a.dot(sol.z_star) - equalities[i].rhs));
  for (const LinearConstraint& lc : inequalities)
    viol = std::max(viol, -static_cast<double>(lc.sense) * lc.g.dot(sol.z_star));
  res.max_violation = viol;
  res.feasible = viol <= 1e-9;
  return res;
}

}  // namespace relu2
