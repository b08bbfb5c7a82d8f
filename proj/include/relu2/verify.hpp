#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "relu2/reductions.hpp"
#include "relu2/trainer.hpp"
#include "relu2/types.hpp"

namespace relu2 {

struct VerifyCheck {
  std::string name;
  double expected = 0.0;
  double observed = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Status values: "ok" for a completed verification (overall tells the
/// verdict), "unverifiable-at-scale" when the instance exceeds the trainer's
/// enumeration budget, "structure-only" when soundness cannot be certified by
/// training at any desk scale and only formula structure was checked, and
/// "instance-rejected" when the generator refused the source instance.
struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool overall = false;
  std::string status = "ok";
  std::string note;

  nlohmann::json to_json() const;
};

/// Rebuilds the recipe witness from the given combinatorial solution and
/// checks that it achieves the certificate's completeness value (and, for
/// bounded targets, that it is admissible).
VerifyReport check_witness(const ReductionOutput& out, const nlohmann::json& solution,
                           double tol = 1e-9);

/// Runs the global trainer on the generated dataset and checks the
/// certificate's claim: strict exceedance of the soundness bound for
/// soundness-mode certificates, and agreement with the completeness value
/// otherwise. Soundness is certified numerically at instance scale, not
/// asymptotically.
VerifyReport check_soundness_gap(const ReductionOutput& out, const TrainOptions& topts,
                                 double tol = 1e-9);

/// Exhaustive minimum cover size, then train_exact, then the closed-form
/// identity gamma^2 * t_star / samples. Instances up to 12 subsets.
VerifyReport roundtrip_setcover(const SetCoverInstance& inst, double tol = 1e-9);

// desk-scale brute-force helpers (also used by the verification paths)

/// Exhaustive minimum cover size; empty when no cover exists.
std::optional<int> min_cover_size(const SetCoverInstance& inst, int max_subsets = 20);

/// Minimum fraction of monochromatic edges over all k-colorings; empty when
/// k^N exceeds the cap.
std::optional<double> min_monochromatic_fraction(const Hypergraph& h, int k, double cap = 2e6);

}  // namespace relu2
