#include "snf/json_io.hpp"

#include <fstream>
#include <sstream>

namespace snf {

namespace detail {

double json_real(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return json_rational(v, where).get_d();
  throw ParseError(where + ": expected a number or a rational string");
}

mpq_class json_rational(const json& v, const std::string& where) {
  if (v.is_number_integer()) return mpq_class(v.get<long>());
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ParseError(where + ": non-finite number");
    return RationalComplex::from_complex({d, 0.0}).real();
  }
  if (v.is_string()) {
    try {
      return RationalComplex::parse_rational(v.get<std::string>());
    } catch (const std::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  throw ParseError(where + ": expected a number or a rational string");
}

int json_index(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ParseError(where + ": expected a nonnegative integer");
  const long k = v.get<long>();
  if (k < 0 || k > kMaxOrder) throw ParseError(where + ": out of range [0, " + std::to_string(kMaxOrder) + "]");
  return static_cast<int>(k);
}

void expect_vars(const json& j, std::initializer_list<const char*> vars, const std::string& where) {
  if (!j.contains("vars")) return;
  const json& v = j["vars"];
  if (!v.is_array() || v.size() != vars.size()) throw ParseError(where + ".vars: expected " + std::to_string(vars.size()) + " names");
  std::size_t k = 0;
  for (const char* name : vars) {
    if (!v[k].is_string() || v[k].get<std::string>() != name)
      throw ParseError(where + ".vars[" + std::to_string(k) + "]: expected \"" + name + "\"");
    ++k;
  }
}

}  // namespace detail

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

json parse_document(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source + ": byte " + std::to_string(e.byte) + ": malformed JSON");
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_document(buf.str(), path);
}

}  // namespace snf
