#pragma once

#include <optional>

#include "nilcurv/report.hpp"

namespace nilcurv {

struct VerifyOptions {
  /// When set, replaces every pinned upper-bound residual threshold in the
  /// suite (tightening it surfaces honest float error as reported failures;
  /// nothing throws). Pinned lower-bound floors (non-solvability evidence)
  /// and exact-equality checks are unaffected.
  std::optional<double> tol;
};

/// Runs the built-in verification suite end to end: classified family
/// reproduction, randomized dual-route curvature oracles, decomposition round
/// trips, Einstein-condition equivalences, eigenvalue-inequality fuzzing, the
/// coupled matrix-equation checks, and the seeded sign-of-lambda searches.
/// Every random draw is seeded internally, so two runs produce byte-identical
/// reports.
Report run_verification(const VerifyOptions& opts = {});

} // namespace nilcurv
