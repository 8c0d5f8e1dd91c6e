#pragma once

// JSON readers and writers for matrices, polynomials, tuples, BCL data,
// rational symbols and ideals. Readers report the offending path through
// SchemaError.

#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "jointspec/bcl_model.hpp"
#include "jointspec/commuting_tuple.hpp"
#include "jointspec/error.hpp"
#include "jointspec/ideal_support.hpp"
#include "jointspec/mpoly.hpp"
#include "jointspec/rational_symbols.hpp"

namespace jointspec {

using Json = nlohmann::json;

namespace json_detail {

inline std::string at(const std::string& path, const std::string& key) { return path + "/" + key; }
inline std::string at(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }

inline const Json& field(const Json& j, const std::string& path, const std::string& key) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw SchemaError(at(path, key), "missing field");
  return *it;
}

inline const Json& array(const Json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array");
  return j;
}

inline double number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SchemaError(path, "expected a finite number");
  return v;
}

inline std::size_t count(const Json& j, const std::string& path, std::size_t min = 0) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) throw SchemaError(path, "expected an integer");
  const auto v = j.get<long long>();
  if (v < static_cast<long long>(min)) throw SchemaError(path, "expected an integer >= " + std::to_string(min));
  return static_cast<std::size_t>(v);
}

/// Serialization of a double that round-trips; NaN and infinities become strings.
inline Json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace json_detail

inline Json read_json_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw SchemaError(file, "cannot open file");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SchemaError(file, std::string("invalid JSON: ") + e.what());
  }
}

inline Complex complex_from_json(const Json& j, const std::string& path) {
  using namespace json_detail;
  return {number(field(j, path, "re"), at(path, "re")), number(field(j, path, "im"), at(path, "im"))};
}

inline Json to_json(Complex c) { return Json{{"re", json_detail::num(c.real())}, {"im", json_detail::num(c.imag())}}; }

inline CPoint point_from_json(const Json& j, const std::string& path, std::size_t dim) {
  using namespace json_detail;
  array(j, path);
  if (j.size() != dim) throw SchemaError(path, "expected " + std::to_string(dim) + " coordinates");
  CPoint p(static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim; ++i) p(static_cast<Eigen::Index>(i)) = complex_from_json(j[i], at(path, i));
  return p;
}

inline Json to_json(const CPoint& p) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < p.size(); ++i) out.push_back(to_json(p(i)));
  return out;
}

inline std::vector<CPoint> points_from_json(const Json& j, const std::string& path, std::size_t dim) {
  json_detail::array(j, path);
  std::vector<CPoint> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(point_from_json(j[i], json_detail::at(path, i), dim));
  return out;
}

/// {"n": int, "re": [[...]], "im": [[...]]}; "im" may be omitted for real matrices.
inline CMatrix matrix_from_json(const Json& j, const std::string& path) {
  using namespace json_detail;
  const std::size_t n = count(field(j, path, "n"), at(path, "n"), 1);
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  auto read_part = [&](const std::string& key, bool imag) {
    const std::string p = at(path, key);
    const Json& rows = array(field(j, path, key), p);
    if (rows.size() != n) throw SchemaError(p, "expected " + std::to_string(n) + " rows");
    for (std::size_t r = 0; r < n; ++r) {
      const std::string pr = at(p, r);
      const Json& row = array(rows[r], pr);
      if (row.size() != n) throw SchemaError(pr, "expected " + std::to_string(n) + " entries");
      for (std::size_t c = 0; c < n; ++c) {
        const double v = number(row[c], at(pr, c));
        auto& e = m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        e = imag ? Complex(e.real(), v) : Complex(v, e.imag());
      }
    }
  };
  read_part("re", false);
  if (j.contains("im")) read_part("im", true);
  return m;
}

inline Json to_json(const CMatrix& m) {
  Json re = Json::array(), im = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json rr = Json::array(), ri = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rr.push_back(json_detail::num(m(r, c).real()));
      ri.push_back(json_detail::num(m(r, c).imag()));
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return Json{{"n", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

/// {"nvars": int, "terms": [{"exp": [int,...], "re": float, "im": float}]}; "im" defaults to 0.
inline MPoly poly_from_json(const Json& j, const std::string& path) {
  using namespace json_detail;
  const std::size_t nvars = count(field(j, path, "nvars"), at(path, "nvars"));
  const std::string tp = at(path, "terms");
  const Json& terms = array(field(j, path, "terms"), tp);
  MPoly p(nvars);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string ip = at(tp, i);
    const Json& e = array(field(terms[i], ip, "exp"), at(ip, "exp"));
    if (e.size() != nvars) throw SchemaError(at(ip, "exp"), "expected " + std::to_string(nvars) + " exponents");
    Exponent exp(nvars);
    for (std::size_t v = 0; v < nvars; ++v) exp[v] = static_cast<unsigned>(count(e[v], at(at(ip, "exp"), v)));
    const double re = number(field(terms[i], ip, "re"), at(ip, "re"));
    const double im = terms[i].contains("im") ? number(terms[i]["im"], at(ip, "im")) : 0.0;
    p.add_term(exp, Complex(re, im));
  }
  return p;
}

inline Json to_json(const MPoly& p) {
  Json terms = Json::array();
  for (const auto& [e, c] : p.terms()) {
    terms.push_back(Json{{"exp", e}, {"re", json_detail::num(c.real())}, {"im", json_detail::num(c.imag())}});
  }
  return Json{{"nvars", p.nvars()}, {"terms", std::move(terms)}};
}

/// {"d": int, "mats": [matrix, ...]}
inline CommutingTuple tuple_from_json(const Json& j, const std::string& path) {
  using namespace json_detail;
  const std::size_t d = count(field(j, path, "d"), at(path, "d"), 1);
  const std::string mp = at(path, "mats");
  const Json& mats = array(field(j, path, "mats"), mp);
  if (mats.size() != d) throw SchemaError(mp, "expected " + std::to_string(d) + " matrices");
  std::vector<CMatrix> out;
  for (std::size_t i = 0; i < d; ++i) {
    out.push_back(matrix_from_json(mats[i], at(mp, i)));
    if (out[i].rows() != out[0].rows()) throw SchemaError(at(mp, i), "matrix size differs from mats/0");
  }
  try {
    return CommutingTuple::make(std::move(out));
  } catch (const InputError& e) {
    throw SchemaError(path, e.what());
  }
}

inline Json to_json(const CommutingTuple& t) {
  Json mats = Json::array();
  for (std::size_t i = 0; i < t.d(); ++i) mats.push_back(to_json(t[i]));
  return Json{{"d", t.d()}, {"mats", std::move(mats)}};
}

/// {"n": int, "d": int, "projections": [matrix], "unitaries": [matrix]}
inline BCLData bcl_from_json(const Json& j, const std::string& path) {
  using namespace json_detail;
  const std::size_t n = count(field(j, path, "n"), at(path, "n"), 1);
  const std::size_t d = count(field(j, path, "d"), at(path, "d"), 1);
  auto read_list = [&](const std::string& key) {
    const std::string p = at(path, key);
    const Json& list = array(field(j, path, key), p);
    if (list.size() != d) throw SchemaError(p, "expected " + std::to_string(d) + " matrices");
    std::vector<CMatrix> out;
    for (std::size_t i = 0; i < d; ++i) {
      out.push_back(matrix_from_json(list[i], at(p, i)));
      if (static_cast<std::size_t>(out.back().rows()) != n) throw SchemaError(at(p, i), "expected n x n");
    }
    return out;
  };
  auto projections = read_list("projections");
  auto unitaries = read_list("unitaries");
  try {
    return BCLData::make(std::move(projections), std::move(unitaries));
  } catch (const InputError& e) {
    throw SchemaError(path, e.what());
  }
}

/// {"n": int, "d": int, "numerator": [[poly]], "denominator": poly}
inline RationalMatrixFunction symbol_from_json(const Json& j, const std::string& path, const SymbolOptions& opt = {}) {
  using namespace json_detail;
  const std::size_t n = count(field(j, path, "n"), at(path, "n"), 1);
  const std::size_t d = count(field(j, path, "d"), at(path, "d"), 1);
  const std::string np = at(path, "numerator");
  const Json& rows = array(field(j, path, "numerator"), np);
  if (rows.size() != n) throw SchemaError(np, "expected " + std::to_string(n) + " rows");
  PolyMatrix f(n, d);
  for (std::size_t r = 0; r < n; ++r) {
    const Json& row = array(rows[r], at(np, r));
    if (row.size() != n) throw SchemaError(at(np, r), "expected " + std::to_string(n) + " entries");
    for (std::size_t c = 0; c < n; ++c) {
      MPoly p = poly_from_json(row[c], at(at(np, r), c));
      if (p.nvars() != d) throw SchemaError(at(at(np, r), c), "expected nvars = d");
      f.set(r, c, std::move(p));
    }
  }
  MPoly q = poly_from_json(field(j, path, "denominator"), at(path, "denominator"));
  if (q.nvars() != d) throw SchemaError(at(path, "denominator"), "expected nvars = d");
  try {
    return RationalMatrixFunction::make(std::move(f), std::move(q), opt);
  } catch (const InputError& e) {
    throw SchemaError(path, e.what());
  }
}

/// {"symbols": [symbol, ...]} sharing n and d.
inline SymbolFamily symbol_family_from_json(const Json& j, const std::string& path, const SymbolOptions& opt = {}) {
  using namespace json_detail;
  const std::string sp = at(path, "symbols");
  const Json& list = array(field(j, path, "symbols"), sp);
  if (list.empty()) throw SchemaError(sp, "expected at least one symbol");
  std::vector<RationalMatrixFunction> symbols;
  for (std::size_t i = 0; i < list.size(); ++i) symbols.push_back(symbol_from_json(list[i], at(sp, i), opt));
  const std::size_t n = symbols.front().n(), d = symbols.front().d();
  try {
    return SymbolFamily::make(n, d, std::move(symbols), opt);
  } catch (const InputError& e) {
    throw SchemaError(sp, e.what());
  }
}

/// {"nvars": int, "generators": [poly, ...]}
inline PolyIdeal ideal_from_json(const Json& j, const std::string& path) {
  using namespace json_detail;
  const std::size_t nvars = count(field(j, path, "nvars"), at(path, "nvars"), 1);
  const std::string gp = at(path, "generators");
  const Json& list = array(field(j, path, "generators"), gp);
  if (list.empty()) throw SchemaError(gp, "expected at least one generator");
  std::vector<MPoly> gens;
  for (std::size_t i = 0; i < list.size(); ++i) {
    gens.push_back(poly_from_json(list[i], at(gp, i)));
    if (gens.back().nvars() != nvars) throw SchemaError(at(gp, i), "expected nvars = " + std::to_string(nvars));
  }
  return PolyIdeal::make(nvars, std::move(gens));
}

}  // namespace jointspec
