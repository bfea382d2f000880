#pragma once

#include <algorithm>
#include <array>
#include <span>
#include <string>
#include <vector>

#include "snf/coefficient.hpp"
#include "snf/errors.hpp"

namespace snf {

// Orders above this cap are rejected; factorials are tabulated up to it.
inline constexpr int kMaxOrder = 64;

namespace detail {

inline void check_order(int n) {
  if (n < 0 || n > kMaxOrder) {
    throw OrderError("truncation order " + std::to_string(n) + " outside [0, " +
                     std::to_string(kMaxOrder) + "]");
  }
}

inline int clamp_order(long n) { return static_cast<int>(std::min<long>(n, kMaxOrder)); }

template <class K>
bool exact_zero(const K& v) {
  if constexpr (coeff_traits<K>::exact) {
    return v.is_zero();
  } else {
    return v == K{};
  }
}

template <class K>
void check_finite(const K& v) {
  if (!coeff_traits<K>::is_finite(v)) throw std::invalid_argument("non-finite coefficient");
}

}  // namespace detail

inline double factorial(int n) {
  static const std::array<double, kMaxOrder + 1> table = [] {
    std::array<double, kMaxOrder + 1> t{};
    t[0] = 1.0;
    for (int k = 1; k <= kMaxOrder; ++k) t[k] = t[k - 1] * k;
    return t;
  }();
  if (n < 0 || n > kMaxOrder) throw OrderError("factorial argument outside the order cap");
  return table[static_cast<std::size_t>(n)];
}

// Univariate truncated power series: coefficients of z^0..z^order, dense.
template <Coefficient K>
class Series1 {
 public:
  Series1() : Series1(0) {}

  explicit Series1(int order) {
    detail::check_order(order);
    coeffs_.assign(static_cast<std::size_t>(order) + 1, K{});
  }

  // Coefficients past `order` are dropped; missing ones are zero.
  Series1(int order, std::vector<K> coeffs) : Series1(order) {
    for (std::size_t j = 0; j < coeffs.size() && j < coeffs_.size(); ++j) set(static_cast<int>(j), std::move(coeffs[j]));
  }

  static Series1 monomial(int power, K c, int order) {
    Series1 s(order);
    if (power <= order) s.set(power, std::move(c));
    return s;
  }

  int order() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }

  const K& operator[](int j) const {
    if (j < 0 || j > order()) throw OrderError("coefficient index " + std::to_string(j) + " beyond order");
    return coeffs_[static_cast<std::size_t>(j)];
  }

  void set(int j, K v) {
    if (j < 0 || j > order()) throw OrderError("coefficient index " + std::to_string(j) + " beyond order");
    detail::check_finite(v);
    coeffs_[static_cast<std::size_t>(j)] = std::move(v);
  }

  std::span<const K> coefficients() const noexcept { return coeffs_; }

  // Lowest index with a nonzero coefficient; order()+1 when all vanish.
  int valuation() const {
    for (int j = 0; j <= order(); ++j)
      if (!detail::exact_zero(coeffs_[static_cast<std::size_t>(j)])) return j;
    return order() + 1;
  }

  // Highest index with a nonzero coefficient; -1 for the zero series.
  int degree() const {
    for (int j = order(); j >= 0; --j)
      if (!detail::exact_zero(coeffs_[static_cast<std::size_t>(j)])) return j;
    return -1;
  }

  bool is_zero() const { return degree() < 0; }

  double max_abs() const {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, coeff_traits<K>::abs(c));
    return m;
  }

  friend bool operator==(const Series1& a, const Series1& b) { return a.coeffs_ == b.coeffs_; }

 private:
  std::vector<K> coeffs_;
};

template <Coefficient K>
Series1<K> jet(const Series1<K>& f, int n) {
  if (n < 0 || n > f.order())
    throw OrderError("jet order " + std::to_string(n) + " exceeds series order " + std::to_string(f.order()));
  Series1<K> r(n);
  for (int j = 0; j <= n; ++j) r.set(j, f[j]);
  return r;
}

template <Coefficient K>
Series1<K> operator+(const Series1<K>& f, const Series1<K>& g) {
  Series1<K> r(std::min(f.order(), g.order()));
  for (int j = 0; j <= r.order(); ++j) r.set(j, f[j] + g[j]);
  return r;
}

template <Coefficient K>
Series1<K> operator-(const Series1<K>& f, const Series1<K>& g) {
  Series1<K> r(std::min(f.order(), g.order()));
  for (int j = 0; j <= r.order(); ++j) r.set(j, f[j] - g[j]);
  return r;
}

template <Coefficient K>
Series1<K> operator-(const Series1<K>& f) {
  Series1<K> r(f.order());
  for (int j = 0; j <= r.order(); ++j) r.set(j, -f[j]);
  return r;
}

template <Coefficient K>
Series1<K> operator*(const K& c, const Series1<K>& f) {
  Series1<K> r(f.order());
  for (int j = 0; j <= r.order(); ++j) r.set(j, c * f[j]);
  return r;
}

namespace detail {

template <Coefficient K>
Series1<K> product_to(const Series1<K>& f, const Series1<K>& g, int n) {
  std::vector<K> acc(static_cast<std::size_t>(n) + 1, K{});
  const int df = std::min(f.degree(), n);
  for (int a = 0; a <= df; ++a) {
    if (exact_zero(f[a])) continue;
    const int top = std::min(n - a, g.order());
    for (int b = 0; b <= top; ++b) {
      if (exact_zero(g[b])) continue;
      acc[static_cast<std::size_t>(a + b)] += f[a] * g[b];
    }
  }
  return Series1<K>(n, std::move(acc));
}

template <Coefficient K>
Series1<K> unit_quotient_to(const Series1<K>& f, const Series1<K>& u, int n, double tol) {
  const K& u0 = u[0];
  if (coeff_traits<K>::is_zero(u0, tol * std::max(1.0, coeff_traits<K>::abs(u[std::min(1, u.order())]))))
    throw DivisionError("not a unit: constant term vanishes");
  std::vector<K> q(static_cast<std::size_t>(n) + 1, K{});
  for (int m = 0; m <= n; ++m) {
    K acc = m <= f.order() ? f[m] : K{};
    for (int k = 1; k <= std::min(m, u.order()); ++k) {
      if (exact_zero(u[k])) continue;
      acc -= u[k] * q[static_cast<std::size_t>(m - k)];
    }
    q[static_cast<std::size_t>(m)] = acc / u0;
  }
  return Series1<K>(n, std::move(q));
}

}  // namespace detail

// Cauchy product truncated at min(order f, order g).
template <Coefficient K>
Series1<K> operator*(const Series1<K>& f, const Series1<K>& g) {
  return detail::product_to(f, g, std::min(f.order(), g.order()));
}

// Product carried to the largest order the inputs determine:
// min(order f + val g, order g + val f), capped.
template <Coefficient K>
Series1<K> mul_tracked(const Series1<K>& f, const Series1<K>& g) {
  const long n = std::min<long>(long(f.order()) + g.valuation(), long(g.order()) + f.valuation());
  return detail::product_to(f, g, detail::clamp_order(n));
}

template <Coefficient K>
Series1<K> derive(const Series1<K>& f) {
  if (f.order() < 1) throw OrderError("cannot differentiate an order-0 series");
  Series1<K> r(f.order() - 1);
  for (int j = 1; j <= f.order(); ++j) r.set(j - 1, K(j) * f[j]);
  return r;
}

// Antiderivative with zero constant term; known one order further.
template <Coefficient K>
Series1<K> integrate(const Series1<K>& f) {
  Series1<K> r(f.order() + 1);
  for (int j = 0; j <= f.order(); ++j) r.set(j + 1, f[j] / K(j + 1));
  return r;
}

// exp(a) for a(0) = 0, from n E_n = sum_k k a_k E_{n-k}.
template <Coefficient K>
Series1<K> exp(const Series1<K>& a) {
  if (!detail::exact_zero(a[0]))
    throw std::invalid_argument("exp requires a series with zero constant term");
  const int n = a.order();
  std::vector<K> e(static_cast<std::size_t>(n) + 1, K{});
  e[0] = K(1);
  for (int m = 1; m <= n; ++m) {
    K acc{};
    for (int k = 1; k <= m; ++k) {
      if (detail::exact_zero(a[k])) continue;
      acc += K(k) * a[k] * e[static_cast<std::size_t>(m - k)];
    }
    e[static_cast<std::size_t>(m)] = acc / K(m);
  }
  return Series1<K>(n, std::move(e));
}

// y -> exp(int_0^y a) - 1
template <Coefficient K>
Series1<K> exp_integral_minus_one(const Series1<K>& a) {
  Series1<K> e = exp(integrate(a));
  e.set(0, K{});
  return e;
}

// q with q * u = f at min order; u(0) must be nonzero (relative tolerance in floating).
template <Coefficient K>
Series1<K> divide_by_unit(const Series1<K>& f, const Series1<K>& u, double tol = kDefaultTolZero) {
  return detail::unit_quotient_to(f, u, std::min(f.order(), u.order()), tol);
}

// As divide_by_unit, but keeps order min(order f, order u + val f).
template <Coefficient K>
Series1<K> divide_by_unit_tracked(const Series1<K>& f, const Series1<K>& u, double tol = kDefaultTolZero) {
  const long n = std::min<long>(f.order(), long(u.order()) + f.valuation());
  return detail::unit_quotient_to(f, u, detail::clamp_order(n), tol);
}

// f / z; f(0) must vanish. The result loses one order.
template <Coefficient K>
Series1<K> divide_by_variable(const Series1<K>& f, double tol = kDefaultTolZero) {
  if (f.order() < 1) throw OrderError("cannot divide an order-0 series by its variable");
  if (!coeff_traits<K>::is_zero(f[0], tol * std::max(1.0, coeff_traits<K>::abs(f[1]))))
    throw DivisionError("not divisible: constant coefficient is nonzero");
  Series1<K> r(f.order() - 1);
  for (int j = 1; j <= f.order(); ++j) r.set(j - 1, f[j]);
  return r;
}

template <Coefficient K>
K evaluate(const Series1<K>& f, const K& z) {
  K acc{};
  for (int j = f.order(); j >= 0; --j) acc = acc * z + f[j];
  return acc;
}

template <Coefficient To, Coefficient From>
Series1<To> convert(const Series1<From>& f) {
  Series1<To> r(f.order());
  for (int j = 0; j <= f.order(); ++j) {
    if constexpr (std::is_same_v<To, From>) {
      r.set(j, f[j]);
    } else {
      r.set(j, coeff_traits<To>::from_complex(coeff_traits<From>::to_complex(f[j])));
    }
  }
  return r;
}

}  // namespace snf
