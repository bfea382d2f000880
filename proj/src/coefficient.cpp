#include "snf/coefficient.hpp"

#include <cctype>
#include <stdexcept>

namespace snf {

RationalComplex::RationalComplex(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {
  re_.canonicalize();
  im_.canonicalize();
}

RationalComplex RationalComplex::from_complex(Complex v) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
    throw std::invalid_argument("non-finite value cannot be represented exactly");
  }
  return {mpq_class(v.real()), mpq_class(v.imag())};
}

RationalComplex RationalComplex::from_ratio(long p, long q) {
  if (q == 0) throw std::invalid_argument("zero denominator");
  mpq_class r(p, q);
  r.canonicalize();
  return {r, 0};
}

mpq_class RationalComplex::parse_rational(const std::string& text) {
  auto fail = [&] { return std::invalid_argument("not a rational literal: '" + text + "'"); };
  if (text.empty()) throw fail();
  if (text.find('/') != std::string::npos) {
    mpq_class q;
    if (q.set_str(text, 10) != 0) throw fail();
    if (q.get_den() == 0) throw fail();
    q.canonicalize();
    return q;
  }
  // Decimal: [sign] digits [. digits] [e|E [sign] digits]
  std::size_t pos = 0;
  bool negative = false;
  if (text[pos] == '+' || text[pos] == '-') negative = text[pos++] == '-';
  std::string digits;
  long scale = 0;
  bool any = false;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
    digits += text[pos++];
    any = true;
  }
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      digits += text[pos++];
      --scale;
      any = true;
    }
  }
  if (!any) throw fail();
  if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
    ++pos;
    std::size_t used = 0;
    long exponent = 0;
    try {
      exponent = std::stol(text.substr(pos), &used);
    } catch (const std::exception&) {
      throw fail();
    }
    if (used == 0) throw fail();
    pos += used;
    scale += exponent;
  }
  if (pos != text.size()) throw fail();
  mpz_class numerator(digits, 10);
  mpz_class power;
  mpz_ui_pow_ui(power.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
  mpq_class q = scale < 0 ? mpq_class(numerator, power) : mpq_class(numerator * power);
  q.canonicalize();
  return negative ? mpq_class(-q) : q;
}

RationalComplex& RationalComplex::operator+=(const RationalComplex& o) {
  re_ += o.re_;
  im_ += o.im_;
  return *this;
}

RationalComplex& RationalComplex::operator-=(const RationalComplex& o) {
  re_ -= o.re_;
  im_ -= o.im_;
  return *this;
}

RationalComplex& RationalComplex::operator*=(const RationalComplex& o) {
  if (sgn(im_) == 0 && sgn(o.im_) == 0) {
    re_ *= o.re_;
    return *this;
  }
  mpq_class re = re_ * o.re_ - im_ * o.im_;
  mpq_class im = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

RationalComplex& RationalComplex::operator/=(const RationalComplex& o) {
  if (o.is_zero()) throw std::domain_error("division by exact zero");
  if (sgn(im_) == 0 && sgn(o.im_) == 0) {
    re_ /= o.re_;
    return *this;
  }
  mpq_class den = o.norm2();
  mpq_class re = (re_ * o.re_ + im_ * o.im_) / den;
  mpq_class im = (im_ * o.re_ - re_ * o.im_) / den;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

std::string to_string(const mpq_class& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

}  // namespace snf
