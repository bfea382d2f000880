#pragma once

#include <compare>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "snf/series1.hpp"

namespace snf {

enum class Var { x, y };

inline const char* name(Var v) { return v == Var::x ? "x" : "y"; }
inline Var other(Var v) { return v == Var::x ? Var::y : Var::x; }

struct MultiIndex {
  int i = 0;  // exponent of x
  int j = 0;  // exponent of y

  constexpr int degree() const noexcept { return i + j; }
  constexpr int exponent(Var v) const noexcept { return v == Var::x ? i : j; }

  friend constexpr bool operator==(const MultiIndex&, const MultiIndex&) = default;
  // Graded: total degree first, then decreasing power of x (x^2, xy, y^2, ...).
  friend constexpr std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b) {
    if (auto c = a.degree() <=> b.degree(); c != 0) return c;
    return b.i <=> a.i;
  }
};

// J! = i! j!
inline double factorial(const MultiIndex& m) { return factorial(m.i) * factorial(m.j); }

namespace detail {

constexpr std::size_t tri_size(int n) { return static_cast<std::size_t>((n + 1) * (n + 2) / 2); }
constexpr std::size_t tri_index(int i, int j) {
  const int d = i + j;
  return static_cast<std::size_t>(d * (d + 1) / 2 + j);
}

}  // namespace detail

// Bivariate truncated power series: sparse table of coefficients of x^i y^j, i + j <= order.
template <Coefficient K>
class Series2 {
 public:
  using TermMap = std::map<MultiIndex, K>;

  Series2() : Series2(0) {}
  explicit Series2(int order) : order_(order) { detail::check_order(order); }

  static Series2 monomial(int i, int j, K c, int order) {
    Series2 s(order);
    if (i + j <= order) s.set(i, j, std::move(c));
    return s;
  }

  // Dense triangular layout (graded, tri_index) up to degree `order`.
  static Series2 from_dense(int order, std::vector<K> dense) {
    Series2 s(order);
    std::size_t k = 0;
    for (int d = 0; d <= order; ++d) {
      for (int j = 0; j <= d; ++j, ++k) {
        if (k >= dense.size()) return s;
        if (detail::exact_zero(dense[k])) continue;
        detail::check_finite(dense[k]);
        s.terms_.emplace_hint(s.terms_.end(), MultiIndex{d - j, j}, std::move(dense[k]));
      }
    }
    return s;
  }

  int order() const noexcept { return order_; }
  const TermMap& terms() const noexcept { return terms_; }

  K coeff(int i, int j) const {
    if (i < 0 || j < 0 || i + j > order_)
      throw OrderError("coefficient x^" + std::to_string(i) + " y^" + std::to_string(j) + " beyond order " +
                       std::to_string(order_));
    auto it = terms_.find({i, j});
    return it == terms_.end() ? K{} : it->second;
  }

  // Stores v; an exact zero erases the entry.
  void set(int i, int j, K v) {
    if (i < 0 || j < 0 || i + j > order_)
      throw OrderError("coefficient x^" + std::to_string(i) + " y^" + std::to_string(j) + " beyond order " +
                       std::to_string(order_));
    detail::check_finite(v);
    if (detail::exact_zero(v)) {
      terms_.erase({i, j});
    } else {
      terms_.insert_or_assign(MultiIndex{i, j}, std::move(v));
    }
  }

  bool is_zero() const noexcept { return terms_.empty(); }
  int valuation() const { return terms_.empty() ? order_ + 1 : terms_.begin()->first.degree(); }
  int degree() const { return terms_.empty() ? -1 : terms_.rbegin()->first.degree(); }

  double max_abs() const {
    double m = 0.0;
    for (const auto& [k, c] : terms_) m = std::max(m, coeff_traits<K>::abs(c));
    return m;
  }

  // Largest |coefficient| among monomials of total degree d. Floating tolerances are
  // taken relative to this, since coefficients typically grow geometrically with degree.
  double degree_max(int d) const {
    double m = 0.0;
    for (auto it = terms_.lower_bound({d, 0}); it != terms_.end() && it->first.degree() == d; ++it)
      m = std::max(m, coeff_traits<K>::abs(it->second));
    return m;
  }

  // max(1, |coefficients of degree <= 1|): the scale against which u(0,0) is judged.
  double low_scale() const { return std::max({1.0, degree_max(0), degree_max(1)}); }

  std::vector<K> dense(int n) const {
    std::vector<K> d(detail::tri_size(n), K{});
    for (const auto& [k, c] : terms_) {
      if (k.degree() > n) break;
      d[detail::tri_index(k.i, k.j)] = c;
    }
    return d;
  }

  // Equality at a common order: same order and same coefficients.
  friend bool operator==(const Series2& a, const Series2& b) { return a.order_ == b.order_ && a.terms_ == b.terms_; }

 private:
  int order_ = 0;
  TermMap terms_;
};

template <Coefficient K>
Series2<K> jet(const Series2<K>& f, int n) {
  if (n < 0 || n > f.order())
    throw OrderError("jet order " + std::to_string(n) + " exceeds series order " + std::to_string(f.order()));
  Series2<K> r(n);
  for (const auto& [k, c] : f.terms()) {
    if (k.degree() > n) break;
    r.set(k.i, k.j, c);
  }
  return r;
}

template <Coefficient K>
Series2<K> operator+(const Series2<K>& f, const Series2<K>& g) {
  const int n = std::min(f.order(), g.order());
  auto d = f.dense(n);
  for (const auto& [k, c] : g.terms()) {
    if (k.degree() > n) break;
    d[detail::tri_index(k.i, k.j)] += c;
  }
  return Series2<K>::from_dense(n, std::move(d));
}

template <Coefficient K>
Series2<K> operator-(const Series2<K>& f) {
  Series2<K> r(f.order());
  for (const auto& [k, c] : f.terms()) r.set(k.i, k.j, -c);
  return r;
}

template <Coefficient K>
Series2<K> operator-(const Series2<K>& f, const Series2<K>& g) {
  const int n = std::min(f.order(), g.order());
  auto d = f.dense(n);
  for (const auto& [k, c] : g.terms()) {
    if (k.degree() > n) break;
    d[detail::tri_index(k.i, k.j)] -= c;
  }
  return Series2<K>::from_dense(n, std::move(d));
}

template <Coefficient K>
Series2<K> operator*(const K& c, const Series2<K>& f) {
  Series2<K> r(f.order());
  if (detail::exact_zero(c)) return r;
  for (const auto& [k, v] : f.terms()) r.set(k.i, k.j, c * v);
  return r;
}

namespace detail {

template <Coefficient K>
Series2<K> product_to(const Series2<K>& f, const Series2<K>& g, int n) {
  std::vector<K> acc(tri_size(n), K{});
  for (const auto& [a, ca] : f.terms()) {
    if (a.degree() > n) break;
    for (const auto& [b, cb] : g.terms()) {
      if (a.degree() + b.degree() > n) break;
      acc[tri_index(a.i + b.i, a.j + b.j)] += ca * cb;
    }
  }
  return Series2<K>::from_dense(n, std::move(acc));
}

template <Coefficient K>
Series2<K> unit_quotient_to(const Series2<K>& f, const Series2<K>& u, int n, double tol) {
  const K u0 = u.coeff(0, 0);
  if (coeff_traits<K>::is_zero(u0, tol * u.low_scale()))
    throw DivisionError("not a unit: u(0,0) vanishes");
  const auto fd = f.dense(std::min(n, f.order()));
  std::vector<K> q(tri_size(n), K{});
  // Process in graded order so every q_{J-K} needed is already final.
  for (int d = 0; d <= n; ++d) {
    for (int j = 0; j <= d; ++j) {
      const int i = d - j;
      K acc = d <= f.order() ? fd[tri_index(i, j)] : K{};
      for (const auto& [k, c] : u.terms()) {
        if (k.degree() == 0) continue;
        if (k.degree() > d) break;
        if (k.i > i || k.j > j) continue;
        acc -= c * q[tri_index(i - k.i, j - k.j)];
      }
      q[tri_index(i, j)] = acc / u0;
    }
  }
  return Series2<K>::from_dense(n, std::move(q));
}

// Order to which f(phi) is determined when `var` is replaced by phi (phi(0,0) = 0).
template <Coefficient K>
int substitution_order(const Series2<K>& f, const Series2<K>& phi, Var var) {
  long n = f.order();
  const long vphi = std::max(1, phi.valuation());
  for (const auto& [k, c] : f.terms()) {
    const int e = k.exponent(var);
    if (e == 0) continue;
    n = std::min(n, long(phi.order()) + long(e - 1) * vphi + k.exponent(other(var)));
  }
  return clamp_order(n);
}

template <Coefficient K>
Series2<K> substitute_to(const Series2<K>& f, const Series2<K>& phi, Var var, int n, double tol) {
  const K c0 = phi.coeff(0, 0);
  if (!coeff_traits<K>::is_zero(c0, tol * phi.low_scale()))
    throw std::invalid_argument("substituted series must have zero constant term");
  Series2<K> p = jet(phi, std::min(n, phi.order()));
  p.set(0, 0, K{});
  // Group f by the power of `var`: f = sum_e c_e * var^e.
  std::vector<std::vector<K>> groups;
  for (const auto& [k, c] : f.terms()) {
    if (k.degree() > n) break;
    const int e = k.exponent(var);
    if (static_cast<int>(groups.size()) <= e) groups.resize(static_cast<std::size_t>(e) + 1);
    auto& g = groups[static_cast<std::size_t>(e)];
    if (g.empty()) g.assign(tri_size(n), K{});
    const int io = var == Var::x ? 0 : k.i;
    const int jo = var == Var::x ? k.j : 0;
    g[tri_index(io, jo)] = c;
  }
  std::vector<K> acc(tri_size(n), K{});
  Series2<K> power = Series2<K>::monomial(0, 0, K(1), n);
  for (std::size_t e = 0; e < groups.size(); ++e) {
    if (e > 0) power = product_to(power, p, n);
    if (groups[e].empty()) continue;
    const Series2<K> term = product_to(Series2<K>::from_dense(n, groups[e]), power, n);
    for (const auto& [k, c] : term.terms()) acc[tri_index(k.i, k.j)] += c;
  }
  return Series2<K>::from_dense(n, std::move(acc));
}

}  // namespace detail

// Cauchy product truncated at min(order f, order g).
template <Coefficient K>
Series2<K> operator*(const Series2<K>& f, const Series2<K>& g) {
  return detail::product_to(f, g, std::min(f.order(), g.order()));
}

// Product carried to min(order f + val g, order g + val f), capped.
template <Coefficient K>
Series2<K> mul_tracked(const Series2<K>& f, const Series2<K>& g) {
  const long n = std::min<long>(long(f.order()) + g.valuation(), long(g.order()) + f.valuation());
  return detail::product_to(f, g, detail::clamp_order(n));
}

template <Coefficient K>
Series2<K> derive(const Series2<K>& f, Var var) {
  if (f.order() < 1) throw OrderError("cannot differentiate an order-0 series");
  Series2<K> r(f.order() - 1);
  for (const auto& [k, c] : f.terms()) {
    const int e = k.exponent(var);
    if (e == 0) continue;
    if (var == Var::x) {
      r.set(k.i - 1, k.j, K(e) * c);
    } else {
      r.set(k.i, k.j - 1, K(e) * c);
    }
  }
  return r;
}

// f with `var` replaced by phi, truncated at min(order f, order phi).
template <Coefficient K>
Series2<K> substitute_fibered(const Series2<K>& f, const Series2<K>& phi, Var var,
                              double tol = kDefaultTolZero) {
  return detail::substitute_to(f, phi, var, std::min(f.order(), phi.order()), tol);
}

// As substitute_fibered, but carried to the largest order the inputs determine.
template <Coefficient K>
Series2<K> substitute_tracked(const Series2<K>& f, const Series2<K>& phi, Var var,
                              double tol = kDefaultTolZero) {
  return detail::substitute_to(f, phi, var, detail::substitution_order(f, phi, var), tol);
}

// f / var. Every coefficient free of `var` must vanish (relative tolerance in floating);
// those below tolerance (relative to their degree) are discarded. The quotient has order(f) - 1.
template <Coefficient K>
Series2<K> divide_exact(const Series2<K>& f, Var var, double tol = kDefaultTolZero) {
  if (f.order() < 1) throw OrderError("cannot divide an order-0 series by a variable");
  Series2<K> r(f.order() - 1);
  for (const auto& [k, c] : f.terms()) {
    if (k.exponent(var) == 0) {
      if (coeff_traits<K>::is_zero(c, tol * std::max(1.0, f.degree_max(k.degree())))) continue;
      std::ostringstream msg;
      msg << "not divisible by " << name(var) << ": coefficient of x^" << k.i << " y^" << k.j
          << " is nonzero (|c| = " << coeff_traits<K>::abs(c) << ")";
      throw DivisionError(msg.str());
    }
    if (var == Var::x) {
      r.set(k.i - 1, k.j, c);
    } else {
      r.set(k.i, k.j - 1, c);
    }
  }
  return r;
}

// q with q * u = f at min order, by graded recursive inversion; u(0,0) must be nonzero.
template <Coefficient K>
Series2<K> divide_by_unit(const Series2<K>& f, const Series2<K>& u, double tol = kDefaultTolZero) {
  return detail::unit_quotient_to(f, u, std::min(f.order(), u.order()), tol);
}

// As divide_by_unit, keeping order min(order f, order u + val f).
template <Coefficient K>
Series2<K> divide_by_unit_tracked(const Series2<K>& f, const Series2<K>& u, double tol = kDefaultTolZero) {
  const long n = std::min<long>(f.order(), long(u.order()) + f.valuation());
  return detail::unit_quotient_to(f, u, detail::clamp_order(n), tol);
}

// f(a x + b y, c x + d y); order is preserved.
template <Coefficient K>
Series2<K> linear_substitute(const Series2<K>& f, const K& a, const K& b, const K& c, const K& d) {
  const int n = f.order();
  Series2<K> lx(n), ly(n);
  if (n >= 1) {
    lx.set(1, 0, a);
    lx.set(0, 1, b);
    ly.set(1, 0, c);
    ly.set(0, 1, d);
  }
  std::vector<Series2<K>> px{Series2<K>::monomial(0, 0, K(1), n)};
  std::vector<Series2<K>> py{Series2<K>::monomial(0, 0, K(1), n)};
  for (int e = 1; e <= n; ++e) {
    px.push_back(px.back() * lx);
    py.push_back(py.back() * ly);
  }
  std::vector<K> acc(detail::tri_size(n), K{});
  for (const auto& [k, v] : f.terms()) {
    const Series2<K> term = v * (px[static_cast<std::size_t>(k.i)] * py[static_cast<std::size_t>(k.j)]);
    for (const auto& [m, w] : term.terms()) acc[detail::tri_index(m.i, m.j)] += w;
  }
  return Series2<K>::from_dense(n, std::move(acc));
}

// The univariate series s placed in variable `var`.
template <Coefficient K>
Series2<K> embed(const Series1<K>& s, Var var) {
  Series2<K> r(s.order());
  for (int e = 0; e <= s.order(); ++e) {
    if (detail::exact_zero(s[e])) continue;
    if (var == Var::x) {
      r.set(e, 0, s[e]);
    } else {
      r.set(0, e, s[e]);
    }
  }
  return r;
}

// Coefficient of var^e in f, as a series in the other variable (order drops by e).
template <Coefficient K>
Series1<K> coefficient_series(const Series2<K>& f, Var var, int e) {
  if (e < 0 || e > f.order()) throw OrderError("power beyond series order");
  Series1<K> r(f.order() - e);
  for (const auto& [k, c] : f.terms()) {
    if (k.exponent(var) == e) r.set(k.exponent(other(var)), c);
  }
  return r;
}

// f restricted to {var = 0}.
template <Coefficient K>
Series1<K> restrict_zero(const Series2<K>& f, Var var) {
  return coefficient_series(f, var, 0);
}

// f(s(y), y) as a series in y; s(0) must vanish.
template <Coefficient K>
Series1<K> compose_curve(const Series2<K>& f, const Series1<K>& s, double tol = kDefaultTolZero) {
  const Series2<K> g = substitute_tracked(f, embed(s, Var::y), Var::x, tol);
  return restrict_zero(g, Var::x);
}

template <Coefficient To, Coefficient From>
Series2<To> convert(const Series2<From>& f) {
  Series2<To> r(f.order());
  for (const auto& [k, c] : f.terms()) {
    if constexpr (std::is_same_v<To, From>) {
      r.set(k.i, k.j, c);
    } else {
      r.set(k.i, k.j, coeff_traits<To>::from_complex(coeff_traits<From>::to_complex(c)));
    }
  }
  return r;
}

// Truncation predicate: every coefficient of degree > d vanishes (relative tolerance in floating).
template <Coefficient K>
bool degree_at_most(const Series2<K>& f, int d, double tol = kDefaultTolZero) {
  const double scale = tol * std::max(1.0, f.max_abs());
  for (const auto& [k, c] : f.terms())
    if (k.degree() > d && !coeff_traits<K>::is_zero(c, scale)) return false;
  return true;
}

}  // namespace snf
