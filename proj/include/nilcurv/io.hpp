#pragma once

#include <optional>
#include <string>

#include "nilcurv/attributes.hpp"
#include "nilcurv/liealg.hpp"

namespace nilcurv {

/// Entrywise conversion from the exact scalar mode to doubles.
Mat<double> to_float(const Mat<Rational>& m);
MetricLieAlgebra<double> to_float(const MetricLieAlgebra<Rational>& a);
CocycleData<double> to_float(const CocycleData<Rational>& om);

/// In-memory form of an algebra file. Float documents carry only the double
/// payload. Rational documents carry the exact payload and a double shadow of
/// it, so routines that exist only in float mode (eigenvalues, searches) can
/// run on either kind of document.
struct AlgebraDocument {
  bool exact = false;                 ///< file mode: "rational" vs "float"
  std::optional<double> tolerance;    ///< optional per-file residual tolerance

  MetricLieAlgebra<double> algebra;
  std::optional<CocycleData<double>> cocycle;
  std::optional<Mat<double>> z_metric;

  MetricLieAlgebra<Rational> algebra_exact;  ///< populated iff exact
  std::optional<CocycleData<Rational>> cocycle_exact;
  std::optional<Mat<Rational>> z_metric_exact;
};

/// Parses the JSON algebra format:
///
///   {
///     "dim": 3,
///     "mode": "rational" | "float",
///     "metric": [[...], ...],                 // n x n, symmetric as stored
///     "brackets": [{"i":1,"j":2,"k":3,"c":...}, ...],  // 1-based, i < j
///     "cocycle": {"p":1, "z_metric":[[...]], "S":[[[...]]]},  // optional
///     "tolerance": 1e-9                        // optional, > 0
///   }
///
/// Scalar entries are JSON numbers in float mode; in rational mode they are
/// integers or strings "p/q" in lowest terms. Indices are 1-based in the file
/// and 0-based everywhere in memory; the shift happens only here. Unknown
/// fields anywhere are rejected. Repeated bracket records for the same
/// (i, j, k) accumulate. The metric and z_metric must be symmetric entry for
/// entry as written, and the cocycle operators must be metric-skew; shape or
/// symmetry violations throw ValidationError naming the offending entry,
/// malformed JSON or scalars throw ParseError.
AlgebraDocument parse_algebra_text(const std::string& text);

/// Reads and parses a file; throws ParseError when the file cannot be read.
AlgebraDocument load_algebra_file(const std::string& path);

/// Canonical serialization: fields in a fixed order, brackets sorted by
/// (i, j, k) with zero coefficients omitted, rationals as "p/q" in lowest
/// terms, doubles in shortest round-trip form. parse(emit(d)) reproduces the
/// document exactly: bit for bit in float mode, value for value in rational
/// mode.
std::string emit_algebra_text(const AlgebraDocument& doc);

void save_algebra_file(const AlgebraDocument& doc, const std::string& path);

/// Wraps an in-memory algebra (plus optional cocycle data) as a document.
AlgebraDocument document_from(const MetricLieAlgebra<double>& a,
                              std::optional<CocycleData<double>> om = std::nullopt,
                              std::optional<Mat<double>> z = std::nullopt);
AlgebraDocument document_from(const MetricLieAlgebra<Rational>& a,
                              std::optional<CocycleData<Rational>> om = std::nullopt,
                              std::optional<Mat<Rational>> z = std::nullopt);

} // namespace nilcurv
