#pragma once

#include <string>

#include <json.hpp>

#include "snf/equation.hpp"

namespace snf {

using json = nlohmann::json;

// Malformed input; the message names the offending location.
class ParseError : public Error {
 public:
  using Error::Error;
};

namespace detail {

double json_real(const json& v, const std::string& where);
mpq_class json_rational(const json& v, const std::string& where);
int json_index(const json& v, const std::string& where);
void expect_vars(const json& j, std::initializer_list<const char*> vars, const std::string& where);

template <Coefficient K>
K coefficient_from_json(const json& re, const json& im, const std::string& where) {
  if constexpr (coeff_traits<K>::exact) {
    return RationalComplex(json_rational(re, where + "[re]"), json_rational(im, where + "[im]"));
  } else {
    const Complex z(json_real(re, where + "[re]"), json_real(im, where + "[im]"));
    if (!coeff_traits<Complex>::is_finite(z)) throw ParseError(where + ": non-finite coefficient");
    return z;
  }
}

inline json rational_to_json(const mpq_class& q) { return to_string(q); }

}  // namespace detail

template <Coefficient K>
json coefficient_to_json(const K& c) {
  if constexpr (coeff_traits<K>::exact) {
    return json::array({detail::rational_to_json(c.real()), detail::rational_to_json(c.imag())});
  } else {
    return json::array({c.real(), c.imag()});
  }
}

template <Coefficient K>
json to_json(const Series2<K>& f) {
  json terms = json::array();
  for (const auto& [k, c] : f.terms()) {
    json row = json::array({k.i, k.j});
    const json v = coefficient_to_json(c);
    row.push_back(v[0]);
    row.push_back(v[1]);
    terms.push_back(std::move(row));
  }
  return {{"vars", {"x", "y"}}, {"order", f.order()}, {"terms", std::move(terms)}};
}

template <Coefficient K>
json to_json(const Series1<K>& f, const char* var = "y") {
  json terms = json::array();
  for (int j = 0; j <= f.order(); ++j) {
    if (detail::exact_zero(f[j])) continue;
    const json v = coefficient_to_json(f[j]);
    terms.push_back(json::array({j, v[0], v[1]}));
  }
  return {{"vars", {var}}, {"order", f.order()}, {"terms", std::move(terms)}};
}

// A missing "order" marks an exact polynomial; it is then stored at `default_order`.
template <Coefficient K>
Series2<K> series2_from_json(const json& j, int default_order, const std::string& where = "series") {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  detail::expect_vars(j, {"x", "y"}, where);
  const int order = j.contains("order") ? detail::json_index(j["order"], where + ".order") : default_order;
  if (order > kMaxOrder) throw ParseError(where + ".order: exceeds the cap " + std::to_string(kMaxOrder));
  if (!j.contains("terms") || !j["terms"].is_array()) throw ParseError(where + ".terms: expected an array");
  Series2<K> f(order);
  const json& terms = j["terms"];
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const std::string at = where + ".terms[" + std::to_string(t) + "]";
    const json& row = terms[t];
    if (!row.is_array() || row.size() != 4) throw ParseError(at + ": expected [i, j, re, im]");
    const int i = detail::json_index(row[0], at + "[0]");
    const int e = detail::json_index(row[1], at + "[1]");
    if (i + e > order) {
      if (!j.contains("order")) throw ParseError(at + ": degree exceeds the working order " + std::to_string(order));
      throw ParseError(at + ": degree exceeds the declared order");
    }
    f.set(i, e, f.coeff(i, e) + detail::coefficient_from_json<K>(row[2], row[3], at));
  }
  return f;
}

template <Coefficient K>
Series1<K> series1_from_json(const json& j, int default_order, const std::string& where = "series") {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  if (!j.contains("vars") || !j["vars"].is_array() || j["vars"].size() != 1 || !j["vars"][0].is_string())
    throw ParseError(where + ".vars: expected a single variable name");
  const int order = j.contains("order") ? detail::json_index(j["order"], where + ".order") : default_order;
  if (order > kMaxOrder) throw ParseError(where + ".order: exceeds the cap " + std::to_string(kMaxOrder));
  if (!j.contains("terms") || !j["terms"].is_array()) throw ParseError(where + ".terms: expected an array");
  Series1<K> f(order);
  const json& terms = j["terms"];
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const std::string at = where + ".terms[" + std::to_string(t) + "]";
    const json& row = terms[t];
    if (!row.is_array() || row.size() != 3) throw ParseError(at + ": expected [j, re, im]");
    const int e = detail::json_index(row[0], at + "[0]");
    if (e > order) throw ParseError(at + ": index exceeds the order");
    f.set(e, f[e] + detail::coefficient_from_json<K>(row[1], row[2], at));
  }
  return f;
}

template <Coefficient K>
PlanarEquation<K> equation_from_json(const json& j, int default_order, double tol = kDefaultTolZero) {
  if (!j.is_object() || !j.contains("A") || !j.contains("B"))
    throw ParseError("equation: expected an object with \"A\" and \"B\"");
  Series2<K> A = series2_from_json<K>(j["A"], default_order, "A");
  Series2<K> B = series2_from_json<K>(j["B"], default_order, "B");
  try {
    return PlanarEquation<K>(std::move(A), std::move(B), tol);
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("equation: ") + e.what());
  }
}

template <Coefficient K>
json to_json(const PlanarEquation<K>& eq) {
  return {{"A", to_json(eq.A())}, {"B", to_json(eq.B())}};
}

json complex_to_json(Complex z);

// Parses a whole document; syntax errors carry the byte offset.
json parse_document(const std::string& text, const std::string& source);
json read_json_file(const std::string& path);

}  // namespace snf
