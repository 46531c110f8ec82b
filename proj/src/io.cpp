#include "nilcurv/io.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace nilcurv {

Mat<double> to_float(const Mat<Rational>& m) {
  Mat<double> out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(i, j) = to_double(m(i, j));
  return out;
}

MetricLieAlgebra<double> to_float(const MetricLieAlgebra<Rational>& a) {
  MetricLieAlgebra<double> out(a.n, to_float(a.metric));
  for (std::size_t t = 0; t < a.c.size(); ++t)
    for (int k = 0; k < a.n; ++k) out.c[t][k] = to_double(a.c[t][k]);
  return out;
}

CocycleData<double> to_float(const CocycleData<Rational>& om) {
  CocycleData<double> out;
  out.g_dim = om.g_dim;
  for (const auto& s : om.s_ops) out.s_ops.push_back(to_float(s));
  return out;
}

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void require_keys(const json& obj, const std::string& what,
                  std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = std::any_of(allowed.begin(), allowed.end(),
                             [&](const char* k) { return it.key() == k; });
    if (!known) throw ValidationError("unknown field '" + it.key() + "' in " + what);
  }
}

const json& require_field(const json& obj, const char* key, const std::string& what) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(what + " is missing field '" + key + "'");
  return *it;
}

double float_entry(const json& v, const std::string& where) {
  if (!v.is_number()) throw ParseError("expected a number at " + where);
  return v.get<double>();
}

Rational exact_entry(const json& v, const std::string& where) {
  if (v.is_number_integer()) return Rational(static_cast<long>(v.get<long long>()));
  if (v.is_string()) {
    try {
      return parse_rational(v.get<std::string>());
    } catch (const ParseError& e) {
      throw ParseError(std::string(e.what()) + " at " + where);
    }
  }
  throw ParseError("expected an integer or \"p/q\" string at " + where);
}

template <class S, class EntryFn>
Mat<S> parse_matrix(const json& v, int rows, int cols, const std::string& name, EntryFn entry) {
  if (!v.is_array() || static_cast<int>(v.size()) != rows)
    throw ValidationError(name + " must be an array of " + std::to_string(rows) + " rows");
  Mat<S> m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const json& row = v[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw ValidationError(name + " row " + std::to_string(i + 1) + " must have " +
                            std::to_string(cols) + " entries");
    for (int j = 0; j < cols; ++j)
      m(i, j) = entry(row[static_cast<std::size_t>(j)],
                      name + "[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) + "]");
  }
  return m;
}

template <class S>
void require_symmetric_as_stored(const Mat<S>& m, const std::string& name) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = i + 1; j < m.cols(); ++j)
      if (!(m(i, j) == m(j, i)))
        throw ValidationError(name + " is not symmetric as stored: entries (" +
                              std::to_string(i + 1) + "," + std::to_string(j + 1) + ") and (" +
                              std::to_string(j + 1) + "," + std::to_string(i + 1) + ") differ");
}

int bracket_index(const json& rec, const char* key, int n, const std::string& where) {
  const json& v = require_field(rec, key, where);
  if (!v.is_number_integer()) throw ParseError(where + " field '" + key + "' must be an integer");
  long long x = v.get<long long>();
  if (x < 1 || x > n)
    throw ValidationError(where + " field '" + key + "' out of range 1.." + std::to_string(n));
  return static_cast<int>(x) - 1;  // 1-based in the file, 0-based in memory
}

/// Worst defect of W + W^T over the coefficient forms W_i = S_i^T G. This is
/// the metric-skewness of the operators, checked without inverting G so a
/// degenerate metric still parses (and is then reported by semantic checks).
template <class S>
double form_skewness_defect(const Mat<S>& g_metric, const std::vector<Mat<S>>& s_ops,
                            double* scale_out) {
  double worst = 0.0, scale = 1.0;
  for (const auto& s : s_ops) {
    Mat<S> w = s.transposed() * g_metric;
    scale = std::max(scale, w.norm_inf());
    worst = std::max(worst, (w + w.transposed()).norm_inf());
  }
  *scale_out = scale;
  return worst;
}

template <class S, class EntryFn>
void parse_into(const json& root, int n, double tol, MetricLieAlgebra<S>& algebra,
                std::optional<CocycleData<S>>& cocycle, std::optional<Mat<S>>& z_metric,
                EntryFn entry) {
  Mat<S> g = parse_matrix<S>(require_field(root, "metric", "document"), n, n, "metric", entry);
  require_symmetric_as_stored(g, "metric");
  algebra = MetricLieAlgebra<S>(n, std::move(g));

  if (auto it = root.find("brackets"); it != root.end()) {
    if (!it->is_array()) throw ValidationError("brackets must be an array");
    int pos = 0;
    for (const json& rec : *it) {
      ++pos;
      std::string where = "bracket record " + std::to_string(pos);
      if (!rec.is_object()) throw ValidationError(where + " must be an object");
      require_keys(rec, where, {"i", "j", "k", "c"});
      int i = bracket_index(rec, "i", n, where);
      int j = bracket_index(rec, "j", n, where);
      int k = bracket_index(rec, "k", n, where);
      if (!(i < j)) throw ValidationError(where + " must have i < j");
      algebra.add_bracket(i, j, k, entry(require_field(rec, "c", where), where + " field 'c'"));
    }
  }

  if (auto it = root.find("cocycle"); it != root.end()) {
    const json& coc = *it;
    if (!coc.is_object()) throw ValidationError("cocycle must be an object");
    require_keys(coc, "cocycle", {"p", "z_metric", "S"});
    const json& pv = require_field(coc, "p", "cocycle");
    if (!pv.is_number_integer() || pv.get<long long>() < 1)
      throw ValidationError("cocycle field 'p' must be a positive integer");
    int p = static_cast<int>(pv.get<long long>());

    Mat<S> z = parse_matrix<S>(require_field(coc, "z_metric", "cocycle"), p, p, "z_metric", entry);
    require_symmetric_as_stored(z, "z_metric");

    const json& sv = require_field(coc, "S", "cocycle");
    if (!sv.is_array() || static_cast<int>(sv.size()) != p)
      throw ValidationError("cocycle field 'S' must list exactly p operators");
    CocycleData<S> om;
    om.g_dim = n;
    for (int i = 0; i < p; ++i)
      om.s_ops.push_back(parse_matrix<S>(sv[static_cast<std::size_t>(i)], n, n,
                                         "S[" + std::to_string(i + 1) + "]", entry));

    double scale = 1.0;
    double defect = form_skewness_defect(algebra.metric, om.s_ops, &scale);
    if (defect > (is_exact_v<S> ? 0.0 : tol * scale))
      throw ValidationError("cocycle operators are not metric-skew (defect " +
                            format_scalar(defect) + ")");
    cocycle = std::move(om);
    z_metric = std::move(z);
  }
}

template <class S, class EntryFn>
ordered_json matrix_json(const Mat<S>& m, EntryFn entry) {
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(entry(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <class S, class EntryFn>
ordered_json emit_payload(bool exact, const std::optional<double>& tolerance,
                          const MetricLieAlgebra<S>& a, const std::optional<CocycleData<S>>& om,
                          const std::optional<Mat<S>>& z, EntryFn entry) {
  ordered_json out;
  out["dim"] = a.n;
  out["mode"] = exact ? "rational" : "float";
  out["metric"] = matrix_json(a.metric, entry);
  ordered_json brackets = ordered_json::array();
  for (int i = 0; i < a.n; ++i)
    for (int j = i + 1; j < a.n; ++j) {
      const auto& ck = a.c[a.pair_index(i, j)];
      for (int k = 0; k < a.n; ++k) {
        if (ck[k] == S(0)) continue;
        ordered_json rec;
        rec["i"] = i + 1;
        rec["j"] = j + 1;
        rec["k"] = k + 1;
        rec["c"] = entry(ck[k]);
        brackets.push_back(std::move(rec));
      }
    }
  out["brackets"] = std::move(brackets);
  if (om) {
    ordered_json coc;
    coc["p"] = om->p();
    coc["z_metric"] = matrix_json(z ? *z : Mat<S>::identity(om->p()), entry);
    ordered_json ops = ordered_json::array();
    for (const auto& s : om->s_ops) ops.push_back(matrix_json(s, entry));
    coc["S"] = std::move(ops);
    out["cocycle"] = std::move(coc);
  }
  if (tolerance) out["tolerance"] = *tolerance;
  return out;
}

} // namespace

AlgebraDocument parse_algebra_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("document root must be an object");
  require_keys(root, "document", {"dim", "mode", "metric", "brackets", "cocycle", "tolerance"});

  const json& dim = require_field(root, "dim", "document");
  if (!dim.is_number_integer() || dim.get<long long>() < 1)
    throw ValidationError("dim must be a positive integer");
  int n = static_cast<int>(dim.get<long long>());

  const json& mode = require_field(root, "mode", "document");
  if (!mode.is_string()) throw ParseError("mode must be a string");
  std::string mode_s = mode.get<std::string>();
  if (mode_s != "rational" && mode_s != "float")
    throw ValidationError("mode must be \"rational\" or \"float\"");

  AlgebraDocument doc;
  doc.exact = (mode_s == "rational");
  if (auto it = root.find("tolerance"); it != root.end()) {
    if (!it->is_number() || it->get<double>() <= 0.0)
      throw ValidationError("tolerance must be a positive number");
    doc.tolerance = it->get<double>();
  }
  double tol = doc.tolerance.value_or(kDefaultTol);

  if (doc.exact) {
    std::optional<CocycleData<Rational>> om;
    std::optional<Mat<Rational>> z;
    parse_into<Rational>(root, n, tol, doc.algebra_exact, om, z, exact_entry);
    doc.cocycle_exact = om;
    doc.z_metric_exact = z;
    doc.algebra = to_float(doc.algebra_exact);
    if (om) doc.cocycle = to_float(*om);
    if (z) doc.z_metric = to_float(*z);
  } else {
    parse_into<double>(root, n, tol, doc.algebra, doc.cocycle, doc.z_metric, float_entry);
  }
  return doc;
}

AlgebraDocument load_algebra_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_algebra_text(buf.str());
}

std::string emit_algebra_text(const AlgebraDocument& doc) {
  ordered_json out;
  if (doc.exact) {
    out = emit_payload(true, doc.tolerance, doc.algebra_exact, doc.cocycle_exact,
                       doc.z_metric_exact, [](const Rational& x) { return ordered_json(format_scalar(x)); });
  } else {
    out = emit_payload(false, doc.tolerance, doc.algebra, doc.cocycle, doc.z_metric,
                       [](double x) { return ordered_json(x); });
  }
  return out.dump(2) + "\n";
}

void save_algebra_file(const AlgebraDocument& doc, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path);
  out << emit_algebra_text(doc);
  if (!out) throw Error("failed writing file: " + path);
}

AlgebraDocument document_from(const MetricLieAlgebra<double>& a,
                              std::optional<CocycleData<double>> om, std::optional<Mat<double>> z) {
  AlgebraDocument doc;
  doc.exact = false;
  doc.algebra = a;
  if (om && !z) z = Mat<double>::identity(om->p());
  doc.cocycle = std::move(om);
  doc.z_metric = std::move(z);
  return doc;
}

AlgebraDocument document_from(const MetricLieAlgebra<Rational>& a,
                              std::optional<CocycleData<Rational>> om,
                              std::optional<Mat<Rational>> z) {
  AlgebraDocument doc;
  doc.exact = true;
  doc.algebra_exact = a;
  if (om && !z) z = Mat<Rational>::identity(om->p());
  doc.cocycle_exact = om;
  doc.z_metric_exact = z;
  doc.algebra = to_float(a);
  if (om) doc.cocycle = to_float(*om);
  if (z) doc.z_metric = to_float(*z);
  return doc;
}

} // namespace nilcurv
