#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nilcurv/attributes.hpp"
#include "nilcurv/optimize.hpp"

namespace nilcurv {

/// Which scalar quantity a free parameter controls.
enum class FreeKind {
  metric_entry,        ///< g(i, j) = g(j, i)
  structure_constant,  ///< coefficient of e_k in [e_i, e_j]
  lambda,              ///< the Einstein constant
  metric_scale,        ///< uniform multiple of the whole metric
};

struct FreeEntry {
  FreeKind kind = FreeKind::lambda;
  int i = 0, j = 0, k = 0;
  double lo = -1.0, hi = 1.0;
};

enum class ResidualKind {
  einstein,        ///< |Ric - lambda Id|_F^2 on the base algebra
  es_system,       ///< squared residuals of the three split Einstein conditions
  quasi_einstein,  ///< squared quasi-Einstein residuals of (g, omega, z)
  lemmaimp_system, ///< handled by kap_search, not by this evaluator
};

/// A residual-minimization problem over a template algebra with chosen free
/// entries. When structure constants are free, the squared defect of the
/// Jacobi identity is added to the residual so minimizers are genuine Lie
/// algebras; an instantiation with a degenerate metric (or one on which the
/// residual cannot be evaluated at all) scores the fixed penalty value.
struct SearchProblem {
  MetricLieAlgebra<double> base{0, Mat<double>(0, 0)};
  std::vector<FreeEntry> frees;
  ResidualKind kind = ResidualKind::einstein;
  std::optional<double> fixed_lambda;  ///< used when no lambda entry is free
  std::optional<CocycleData<double>> omega;  ///< for quasi_einstein
  std::optional<Mat<double>> z_metric;       ///< for quasi_einstein
};

inline constexpr double kSearchPenalty = 1e100;

/// The algebra (plus lambda) described by a parameter vector. The metric is
/// built by scaling the base metric first and overwriting individually
/// controlled entries afterwards, so every free parameter can be read back
/// exactly and pack(unpack(x)) = x bit for bit.
struct Instantiation {
  MetricLieAlgebra<double> algebra{0, Mat<double>(0, 0)};
  std::optional<double> lambda;  ///< only when a lambda entry is free
  double scale = 1.0;            ///< value of the metric_scale entry, if any
};

Instantiation unpack(const SearchProblem& p, const std::vector<double>& x);
/// Reads the free entries back out of an instantiation; pack(unpack(x)) = x.
std::vector<double> pack(const SearchProblem& p, const Instantiation& inst);

struct EvalResult {
  double value = 0.0;
  bool feasible = false;
  double lambda = 0.0;     ///< the constant actually used
  double jacobi_sq = 0.0;  ///< squared Jacobi defect (0 unless the bracket is free)
};

EvalResult evaluate_residual(const SearchProblem& p, const std::vector<double>& x);

/// Squared-norm Einstein defect at the given parameters (penalty when
/// infeasible).
double einstein_residual(const std::vector<double>& x, const SearchProblem& p);

struct SearchResult {
  double best_residual = 0.0;  ///< re-evaluated at best_x, never stale
  std::vector<double> best_x;
  double lambda = 0.0;
  int best_restart = -1;
  long total_evals = 0;
  long iterations = 0;
  std::uint64_t seed = 0;
  bool feasible = false;
};

struct MinimizeConfig {
  NelderMeadConfig nm;
  double start_margin = 0.0;  ///< shrink the start box by this fraction
};

/// Restarted deterministic simplex descent; starts are uniform in the bounds
/// from substreams of the seed, restarts merge by (residual, restart index),
/// and the reported residual is re-evaluated at the best parameters. Bounds
/// shape the random starts; descent may leave the box, where infeasible
/// points score the penalty. Internally the descent sees a shaped surrogate
/// at infeasible points (a high base plus the squared Jacobi defect) so that
/// problems with a free bracket can slide onto the Lie-algebra variety; the
/// reported values always come from evaluate_residual.
SearchResult minimize(const SearchProblem& p, int restarts, std::uint64_t seed,
                      const MinimizeConfig& cfg = {});

/// Template families for the sign-of-lambda probe.
enum class ScanTemplate {
  three_step_dim6,  ///< free structure constants + lambda
  three_step_dim7,  ///< free structure constants + lambda
  conti8_scaled,    ///< free metric scale + lambda
  abelian,          ///< free diagonal metric + lambda (einstein kind)
};

ScanTemplate scan_template_from_string(const std::string& s);
std::string scan_template_to_string(ScanTemplate t);

/// Builds the search problem a scan trial solves (exposed for testing).
SearchProblem scan_problem(ScanTemplate tmpl);

/// Near-solutions are gated on the unsquared residual re-evaluated at each
/// trial's optimum with the default (strict) validation tolerance: the worst
/// of the split-condition norms (or the Einstein gap norm) together with the
/// Jacobi defect. Unlike the squared optimization objective, that measure
/// bounds |lambda| directly, so the recorded constants are trustworthy at
/// the same 1e-6 scale.
struct ScanReport {
  ScanTemplate tmpl = ScanTemplate::abelian;
  int trials = 0;
  int near_solutions = 0;       ///< trials reaching gate residual <= near_tol
  double near_tol = 1e-6;
  double min_lambda = 0.0;      ///< over near-solutions (0 when none)
  double max_lambda = 0.0;
  double best_residual = 0.0;   ///< best gate residual over all trials
  bool supports_nonnegative = false;  ///< min_lambda >= -1e-6 among near-solutions
};

/// Runs `trials` independent minimizations of the chosen template and records
/// the Einstein constants of the near-solutions found. One restart per trial
/// is the default: trials are already independent seeded starts, so extra
/// restarts only buy a slightly better per-trial optimum at a linear cost.
ScanReport scan_lambda_sign(ScanTemplate tmpl, int trials, std::uint64_t seed,
                            int restarts_per_trial = 1);

} // namespace nilcurv
