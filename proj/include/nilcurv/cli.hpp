#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nilcurv/io.hpp"
#include "nilcurv/report.hpp"

namespace nilcurv {

/// Effective tolerance: the --tol flag wins over the NILCURV_TOL environment
/// variable, which wins over the file-level override, which wins over the
/// library default.
double effective_tolerance(const std::optional<double>& flag, const std::optional<double>& file_tol);

struct CheckOptions {
  std::string path;
  std::optional<double> tol;          ///< --tol
  std::optional<std::string> mode;    ///< --mode rational|float (force)
  bool decompose = false;             ///< --decompose
  bool soliton = false;               ///< --soliton
};

/// Structural and curvature checks on one algebra file: validation, Jacobi,
/// nilpotency, center, both Ricci routes with their agreement, and the
/// Einstein classification; optionally the center-splitting pipeline and a
/// least-squares algebraic Ricci-soliton fit.
Report run_check(const CheckOptions& opts);

struct FamilyOptions {
  std::string name;
  std::map<std::string, double> params;  ///< only explicitly set parameters
};

/// Instantiates a named catalogue family as a float-mode document.
AlgebraDocument family_document(const FamilyOptions& opts);

struct SearchOptions {
  std::string problem = "lambda-sign";
  std::vector<std::string> templates;  ///< empty = all scan templates
  int trials = 50;
  std::uint64_t seed = 1;
  int restarts = 1;  ///< per trial; raise for a more thorough per-trial descent
};

/// Seeded residual-minimization scans; reports, per template, how many trials
/// converged to near-solutions and the sign of the Einstein constant found.
Report run_search(const SearchOptions& opts);

struct LemmaOptions {
  std::string subcommand;  ///< weyl-fuzz | skew-diag | rank2-basis | kap-check | kap-search
  int k = 2;
  int restarts = 200;
  std::uint64_t seed = 7;
  int pairs = 1000;
  double a1 = 3.0, a2 = 4.0;
  int eps = 1;
  int sign = 1;
};

Report run_lemma(const LemmaOptions& opts);

/// Command-line entry point. Exit code 0 iff every check in the produced
/// report passed; 1 when checks failed; 2 on input errors.
int run_cli(int argc, const char* const* argv);

} // namespace nilcurv
