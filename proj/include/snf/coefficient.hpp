#pragma once

#include <cmath>
#include <complex>
#include <concepts>
#include <string>

#include <gmpxx.h>

namespace snf {

using Complex = std::complex<double>;

// Complex number with arbitrary-precision rational real and imaginary parts.
class RationalComplex {
 public:
  RationalComplex() = default;
  RationalComplex(long v) : re_(v) {}  // NOLINT(google-explicit-constructor)
  RationalComplex(mpq_class re, mpq_class im);

  // Exact conversion: every finite double is a dyadic rational.
  static RationalComplex from_complex(Complex v);
  static RationalComplex from_ratio(long p, long q);
  // Accepts "p", "p/q", or a decimal literal such as "-1.25e-3".
  static mpq_class parse_rational(const std::string& text);

  const mpq_class& real() const noexcept { return re_; }
  const mpq_class& imag() const noexcept { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  mpq_class norm2() const { return re_ * re_ + im_ * im_; }
  double abs() const { return std::sqrt(norm2().get_d()); }
  Complex to_complex() const { return {re_.get_d(), im_.get_d()}; }

  RationalComplex& operator+=(const RationalComplex& o);
  RationalComplex& operator-=(const RationalComplex& o);
  RationalComplex& operator*=(const RationalComplex& o);
  RationalComplex& operator/=(const RationalComplex& o);

  friend RationalComplex operator+(RationalComplex a, const RationalComplex& b) { return a += b; }
  friend RationalComplex operator-(RationalComplex a, const RationalComplex& b) { return a -= b; }
  friend RationalComplex operator*(RationalComplex a, const RationalComplex& b) { return a *= b; }
  friend RationalComplex operator/(RationalComplex a, const RationalComplex& b) { return a /= b; }
  friend RationalComplex operator-(const RationalComplex& a) { return {-a.re_, -a.im_}; }
  friend bool operator==(const RationalComplex& a, const RationalComplex& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }

 private:
  mpq_class re_{0};
  mpq_class im_{0};
};

std::string to_string(const mpq_class& q);

template <class K>
struct coeff_traits;

template <>
struct coeff_traits<Complex> {
  static constexpr bool exact = false;
  static constexpr const char* backend = "float";
  static double abs(const Complex& v) { return std::abs(v); }
  static bool is_zero(const Complex& v, double tol) { return std::abs(v) <= tol; }
  static bool is_finite(const Complex& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }
  static Complex from_ratio(long p, long q) { return {double(p) / double(q), 0.0}; }
  static Complex from_complex(Complex v) { return v; }
  static Complex to_complex(const Complex& v) { return v; }
};

template <>
struct coeff_traits<RationalComplex> {
  static constexpr bool exact = true;
  static constexpr const char* backend = "exact";
  static double abs(const RationalComplex& v) { return v.abs(); }
  // Exact zero test; the tolerance is meaningless here.
  static bool is_zero(const RationalComplex& v, double /*tol*/) { return v.is_zero(); }
  static bool is_finite(const RationalComplex&) { return true; }
  static RationalComplex from_ratio(long p, long q) { return RationalComplex::from_ratio(p, q); }
  static RationalComplex from_complex(Complex v) { return RationalComplex::from_complex(v); }
  static Complex to_complex(const RationalComplex& v) { return v.to_complex(); }
};

template <class K>
concept Coefficient = requires(K a, K b) {
  { a + b } -> std::convertible_to<K>;
  { a - b } -> std::convertible_to<K>;
  { a * b } -> std::convertible_to<K>;
  { a / b } -> std::convertible_to<K>;
  { -a } -> std::convertible_to<K>;
  { coeff_traits<K>::abs(a) } -> std::convertible_to<double>;
};

// Default relative zero tolerance for floating predicates.
inline constexpr double kDefaultTolZero = 1e-9;

}  // namespace snf
