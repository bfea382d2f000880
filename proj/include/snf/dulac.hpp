#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "snf/equation.hpp"
#include "snf/norms.hpp"

namespace snf {

// x = s(y), tangent to the y-axis: s(0) = s'(0) = 0.
template <Coefficient K>
struct Separatrix {
  Series1<K> s;
  int order() const noexcept { return s.order(); }
};

// Bookkeeping of the coefficient recurrence for s.
//   S(n, j) = [y^j] s(y)^n
//   WA(p)   = [y^p] A(s(y), y)
//   WB(p)   = [y^p] Bhat(s(y), y),  Bhat = B - y
// and p s_p = WA(p) - sum_{m+n=p+1, 2<=n<p} n WB(m) s_n.
template <Coefficient K>
class SeparatrixRecurrenceState {
 public:
  explicit SeparatrixRecurrenceState(int n)
      : order_(n),
        S_(static_cast<std::size_t>(n + 1), std::vector<K>(static_cast<std::size_t>(n + 1), K{})),
        WA_(static_cast<std::size_t>(n + 1), K{}),
        WB_(static_cast<std::size_t>(n + 1), K{}),
        s_(n),
        max_read_(static_cast<std::size_t>(n + 1), -1) {
    S_[0][0] = K(1);
  }

  int order() const noexcept { return order_; }
  const K& S(int n, int j) const { return S_.at(static_cast<std::size_t>(n)).at(static_cast<std::size_t>(j)); }
  const K& WA(int p) const { return WA_.at(static_cast<std::size_t>(p)); }
  const K& WB(int p) const { return WB_.at(static_cast<std::size_t>(p)); }
  const Series1<K>& s() const noexcept { return s_; }
  // Largest index q such that s_q was read while computing s_p (-1: none).
  int max_read(int p) const { return max_read_.at(static_cast<std::size_t>(p)); }

  template <Coefficient L>
  friend SeparatrixRecurrenceState<L> run_separatrix_recurrence(const DiagonalizedEquation<L>&, int, double);

 private:
  int order_;
  std::vector<std::vector<K>> S_;
  std::vector<K> WA_;
  std::vector<K> WB_;
  Series1<K> s_;
  std::vector<int> max_read_;
};

template <Coefficient K>
SeparatrixRecurrenceState<K> run_separatrix_recurrence(const DiagonalizedEquation<K>& deq, int n,
                                                       double tol = kDefaultTolZero) {
  if (!is_prepared(deq, tol)) throw std::invalid_argument("separatrix: equation is not in prepared form");
  if (n < 0 || n > deq.order())
    throw OrderError("separatrix order " + std::to_string(n) + " exceeds equation order " +
                     std::to_string(deq.order()));
  SeparatrixRecurrenceState<K> st(n);
  auto& S = st.S_;
  std::vector<K> s(static_cast<std::size_t>(n + 1), K{});
  const auto& A = deq.A;
  const auto& B = deq.B;
  auto at = [](auto& v, int k) -> auto& { return v[static_cast<std::size_t>(k)]; };

  for (int p = 0; p <= n; ++p) {
    int& max_read = st.max_read_[static_cast<std::size_t>(p)];
    auto read_s = [&](int q) -> const K& {
      max_read = std::max(max_read, q);
      return at(s, q);
    };
    // Column p of S for n >= 2 only involves s_q with q <= p - 2.
    for (int k = 2; 2 * k <= p; ++k) {
      K acc{};
      for (int q = 2; q <= p - 2 * (k - 1); ++q) acc += read_s(q) * at(at(S, k - 1), p - q);
      at(at(S, k), p) = acc;
    }
    // S(1, j) = s_j; for j = p this is the unknown, whose coefficient a_{1,0} vanishes.
    auto s_power = [&](int k, int j) -> K {
      if (k == 1) return read_s(j);
      return at(at(S, k), j);
    };
    K wa{};
    for (const auto& [key, c] : A.terms()) {
      const int j = p - key.j;
      if (j < 0 || 2 * key.i > j) continue;
      if (key.i == 1 && key.j == 0) continue;
      if (key.i == 0 && j != 0) continue;
      wa += c * s_power(key.i, j);
    }
    at(st.WA_, p) = wa;
    if (p >= 2) {
      K rhs = wa;
      for (int k = 2; k < p; ++k) {
        const K& wb = at(st.WB_, p + 1 - k);
        if (detail::exact_zero(wb)) continue;
        rhs -= K(k) * wb * read_s(k);
      }
      at(s, p) = rhs / K(p);
    }
    at(at(S, 1), p) = at(s, p);
    // WB(p) needs s_p through the x-linear part of Bhat, so it is formed last.
    K wb{};
    for (const auto& [key, c] : B.terms()) {
      if (key.i == 0 && key.j == 1) continue;
      const int j = p - key.j;
      if (j < 0 || 2 * key.i > j) continue;
      if (key.i == 0 && j != 0) continue;
      wb += c * (key.i == 1 ? at(s, j) : at(at(S, key.i), j));
    }
    at(st.WB_, p) = wb;
  }
  st.s_ = Series1<K>(n, std::move(s));
  return st;
}

template <Coefficient K>
Separatrix<K> separatrix_recurrence(const DiagonalizedEquation<K>& deq, int n, double tol = kDefaultTolZero) {
  return {run_separatrix_recurrence(deq, n, tol).s()};
}

// A(s(y), y) - B(s(y), y) s'(y), to the order the data determine.
template <Coefficient K>
Series1<K> separatrix_residual(const Series2<K>& A, const Series2<K>& B, const Series1<K>& s,
                               double tol = kDefaultTolZero) {
  const Series1<K> as = compose_curve(A, s, tol);
  const Series1<K> bs = compose_curve(B, s, tol);
  return as - mul_tracked(bs, derive(s));
}

// Independent route: fix s_2..s_N one degree at a time by solving the degree-p
// coefficient of the residual, which is affine in the newest unknown.
template <Coefficient K>
Separatrix<K> separatrix_oracle(const DiagonalizedEquation<K>& deq, int n, double tol = kDefaultTolZero) {
  if (!is_prepared(deq, tol)) throw std::invalid_argument("separatrix: equation is not in prepared form");
  if (n < 0 || n > deq.order()) throw OrderError("separatrix order exceeds equation order");
  std::vector<K> s(static_cast<std::size_t>(n + 1), K{});
  for (int p = 2; p <= n; ++p) {
    const Series2<K> A = jet(deq.A, p);
    const Series2<K> B = jet(deq.B, p);
    auto residual_at = [&](const K& trial) {
      std::vector<K> c(s.begin(), s.begin() + p + 1);
      c[static_cast<std::size_t>(p)] = trial;
      return separatrix_residual(A, B, Series1<K>(p, std::move(c)), tol)[p];
    };
    const K r0 = residual_at(K{});
    // step of the residual's size, so the difference does not cancel in floating
    const K h = K(std::max(1.0, coeff_traits<K>::abs(r0)));
    const K slope = (residual_at(h) - r0) / h;
    if (coeff_traits<K>::is_zero(slope, tol)) throw Error("separatrix oracle: degenerate linear equation");
    s[static_cast<std::size_t>(p)] = -r0 / slope;
  }
  return {Series1<K>(n, std::move(s))};
}

// new x = x - s(y)
template <Coefficient K>
struct Shear {
  Series1<K> s;
};

// new x = alpha x / (1 + C(y))
template <Coefficient K>
struct FiberScale {
  K alpha;
  Series1<K> C;
};

struct IdentityChange {};

template <Coefficient K>
using FiberedChange = std::variant<IdentityChange, Shear<K>, FiberScale<K>>;

// Push the field A d/dx + B d/dy through (x, y) -> (phi(x, y), y):
//   A' = (phi_x A + phi_y B) o inverse,  B' = B o inverse.
template <Coefficient K>
std::pair<Series2<K>, Series2<K>> pushforward(const Series2<K>& A, const Series2<K>& B,
                                              const FiberedChange<K>& change, double tol = kDefaultTolZero) {
  const int top = kMaxOrder;
  const Series2<K> x = Series2<K>::monomial(1, 0, K(1), top);
  if (std::holds_alternative<IdentityChange>(change)) return {A, B};
  if (const auto* sh = std::get_if<Shear<K>>(&change)) {
    const Series2<K> inverse = x + embed(sh->s, Var::y);
    const Series2<K> Bn = substitute_tracked(B, inverse, Var::x, tol);
    const Series2<K> sp = embed(derive(sh->s), Var::y);
    const Series2<K> An = substitute_tracked(A, inverse, Var::x, tol) - mul_tracked(Bn, sp);
    return {An, Bn};
  }
  const auto& sc = std::get<FiberScale<K>>(change);
  if (coeff_traits<K>::is_zero(sc.alpha, tol)) throw DivisionError("fiber scale: alpha vanishes, map not invertible");
  if (!detail::exact_zero(sc.C[0])) throw DivisionError("fiber scale: C(0) must vanish");
  Series1<K> unit = sc.C;
  unit.set(0, K(1));
  const Series1<K> inv_unit = divide_by_unit_tracked(Series1<K>::monomial(0, K(1), top), unit, tol);
  const Series2<K> phi_x = sc.alpha * embed(inv_unit, Var::y);
  const Series2<K> phi_y =
      -sc.alpha * mul_tracked(mul_tracked(x, embed(derive(sc.C), Var::y)), embed(mul_tracked(inv_unit, inv_unit), Var::y));
  const Series2<K> inverse = (K(1) / sc.alpha) * mul_tracked(x, embed(unit, Var::y));
  const Series2<K> field = mul_tracked(phi_x, A) + mul_tracked(phi_y, B);
  return {substitute_tracked(field, inverse, Var::x, tol), substitute_tracked(B, inverse, Var::x, tol)};
}

// A1 = x (a0(y) + alpha x A2(x, y)), A2(0,0) = 1.
template <Coefficient K>
struct StraightenedPair {
  Series2<K> A1;
  Series2<K> B1;
  Series1<K> a0;
  K alpha;
  Series2<K> A2;
};

template <Coefficient K>
StraightenedPair<K> straighten(const DiagonalizedEquation<K>& deq, const Separatrix<K>& sep,
                               double tol = kDefaultTolZero) {
  using T = coeff_traits<K>;
  auto [A1, B1] = pushforward(deq.A, deq.B, FiberedChange<K>{Shear<K>{sep.s}}, tol);
  const Series1<K> on_axis = restrict_zero(A1, Var::x);
  bool vanishes = true;
  for (int j = 0; j <= on_axis.order(); ++j)
    vanishes = vanishes && T::is_zero(on_axis[j], tol * std::max(1.0, A1.degree_max(j)));
  if (!vanishes) {
    throw DivisionError("straighten: A1(0, y) does not vanish; the supplied curve is not a separatrix");
  }
  const Series2<K> reduced = divide_exact(A1, Var::x, tol);
  const Series1<K> a0 = restrict_zero(reduced, Var::x);
  const K alpha = reduced.order() >= 1 ? reduced.coeff(1, 0) : K{};
  if (T::is_zero(alpha, tol * std::max(1.0, A1.degree_max(2)))) {
    throw UnsupportedError("k >= 2 unsupported: the coefficient alpha of x^2 vanishes after straightening");
  }
  const Series2<K> rest = divide_exact(reduced - embed(a0, Var::y), Var::x, tol);
  return {std::move(A1), std::move(B1), a0, alpha, (K(1) / alpha) * rest};
}

namespace detail {

// a0(y) / B1(0, y), one factor of y cancelled from each.
template <Coefficient K>
Series1<K> c_integrand(const StraightenedPair<K>& sp, double tol) {
  using T = coeff_traits<K>;
  const Series1<K> b0 = restrict_zero(sp.B1, Var::x);
  if (b0.order() < 2 || sp.a0.order() < 1) throw OrderError("resolve_C: not enough order");
  const double scale = tol * std::max({1.0, T::abs(b0[0]), T::abs(b0[1])});
  if (!T::is_zero(b0[0], scale) || T::is_zero(b0[1], scale))
    throw std::invalid_argument("resolve_C: B1(0, y) must vanish to first order exactly");
  const Series1<K> num = divide_by_variable(sp.a0, tol);
  const Series1<K> den = divide_by_variable(b0, tol);
  return divide_by_unit_tracked(num, den, tol);
}

}  // namespace detail

// C(0) = 0, B1(0, y) C'(y) = (1 + C(y)) a0(y);  C = exp(int a0 / B1(0, .)) - 1.
template <Coefficient K>
Series1<K> resolve_C(const StraightenedPair<K>& sp, double tol = kDefaultTolZero) {
  return exp_integral_minus_one(detail::c_integrand(sp, tol));
}

template <Coefficient K>
Series1<K> c_ode_residual(const StraightenedPair<K>& sp, const Series1<K>& C) {
  const Series1<K> b0 = restrict_zero(sp.B1, Var::x);
  Series1<K> unit = C;
  unit.set(0, K(1));
  return mul_tracked(b0, derive(C)) - mul_tracked(unit, sp.a0);
}

template <Coefficient K>
using ChangeRecord = std::variant<LinearChange<K>, Shear<K>, FiberScale<K>>;

// x^2 dy = (y + r(x) + y R(x, y)) dx after the canonical coordinate changes.
template <Coefficient K>
struct DulacNormalForm {
  int k = 1;
  Series1<K> r;  // in x
  Series2<K> R;
  Series2<K> U;
  Series2<K> B_D;
  Series1<K> C;  // in y
  Separatrix<K> separatrix;
  K alpha;
  std::vector<ChangeRecord<K>> changes;
  int certified_order = 0;
  double residual_norm = 0.0;         // ||A' - x^2 U|| + ||B' - U B_D|| at certified_order
  double residual_scale = 0.0;        // ||A'|| + ||x^2 U|| + ||B'|| + ||U|| ||B_D|| at the same order
  double separatrix_residual = 0.0;   // factorial norm
  double c_ode_residual = 0.0;
  double u_formula_discrepancy = 0.0; // vs. the closed-form U composed with the inverse scale
  std::vector<std::string> warnings;

  // Residual against the size of the compared terms; the floating criterion.
  double relative_residual() const { return residual_norm / (1.0 + residual_scale); }

  // r(x) + y R(x, y) = B_D - y
  Series2<K> dulac_map_value() const {
    Series2<K> d = B_D;
    d.set(0, 1, B_D.coeff(0, 1) - K(1));
    return d;
  }
};

namespace detail {

template <class F>
auto run_stage(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const UnsupportedError& e) {
    throw UnsupportedError(std::string(stage) + ": " + e.what());
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

}  // namespace detail

// Canonical Dulac prenormalization at working order n. Results are certified at order n - 2.
template <Coefficient K>
DulacNormalForm<K> dulac_map(const PlanarEquation<K>& eq, int n, double tol = kDefaultTolZero) {
  using T = coeff_traits<K>;
  if (n > eq.order()) throw OrderError("requested order exceeds the equation's order");
  if (n < 4) throw OrderError("dulac_map needs working order >= 4");
  const PlanarEquation<K> e(jet(eq.A(), n), jet(eq.B(), n), tol);
  DulacNormalForm<K> out;

  const auto deq = detail::run_stage("diagonalize", [&] { return diagonalize(e, tol); });
  out.changes.emplace_back(deq.change);

  out.separatrix = detail::run_stage("separatrix", [&] { return separatrix_recurrence(deq, n, tol); });
  out.separatrix_residual = norm_factorial(separatrix_residual(deq.A, deq.B, out.separatrix.s, tol));
  out.changes.emplace_back(Shear<K>{out.separatrix.s});

  const auto sp = detail::run_stage("straighten", [&] { return straighten(deq, out.separatrix, tol); });
  out.alpha = sp.alpha;

  out.C = detail::run_stage("resolve_C", [&] { return resolve_C(sp, tol); });
  out.c_ode_residual = norm_factorial(c_ode_residual(sp, out.C));
  out.changes.emplace_back(FiberScale<K>{sp.alpha, out.C});

  const auto pushed = detail::run_stage("scale", [&] {
    return pushforward(sp.A1, sp.B1, FiberedChange<K>{FiberScale<K>{sp.alpha, out.C}}, tol);
  });
  const Series2<K>& Ap = pushed.first;
  const Series2<K>& Bp = pushed.second;

  detail::run_stage("factor", [&] {
    out.U = divide_exact(divide_exact(Ap, Var::x, tol), Var::x, tol);
    out.B_D = divide_by_unit_tracked(Bp, out.U, tol);
    out.r = restrict_zero(out.B_D, Var::y);
    Series2<K> rest = out.B_D - embed(out.r, Var::x);
    rest.set(0, 1, rest.coeff(0, 1) - K(1));
    out.R = divide_exact(rest, Var::y, tol);
    return 0;
  });

  out.certified_order = n - 2;
  const int c = out.certified_order;
  const Series2<K> x2 = Series2<K>::monomial(2, 0, K(1), kMaxOrder);
  out.residual_norm = norm_factorial(jet(Ap, c) - jet(mul_tracked(x2, out.U), c)) +
                      norm_factorial(jet(Bp, c) - jet(mul_tracked(out.U, out.B_D), c));
  out.residual_scale = norm_factorial(jet(Ap, c)) + norm_factorial(jet(mul_tracked(x2, out.U), c)) + norm_factorial(jet(Bp, c)) +
                       norm_factorial(jet(out.U, c)) * norm_factorial(jet(out.B_D, c));

  // Closed-form unit (a0/B1(0,y)) (B1(0,y) - B1)/(alpha x) + A2, evaluated at the old
  // coordinate x = x'(1 + C)/alpha and multiplied by 1 + C, must reproduce U.
  detail::run_stage("unit_cross_check", [&] {
    const Series1<K> ratio = detail::c_integrand(sp, tol);
    const Series2<K> b0 = embed(restrict_zero(sp.B1, Var::x), Var::y);
    const Series2<K> dq = (K(1) / sp.alpha) * divide_exact(b0 - sp.B1, Var::x, tol);
    const Series2<K> u_old = mul_tracked(embed(ratio, Var::y), dq) + sp.A2;
    Series1<K> unit = out.C;
    unit.set(0, K(1));
    const Series2<K> x = Series2<K>::monomial(1, 0, K(1), kMaxOrder);
    const Series2<K> inverse = (K(1) / sp.alpha) * mul_tracked(x, embed(unit, Var::y));
    const Series2<K> u_new = mul_tracked(embed(unit, Var::y), substitute_tracked(u_old, inverse, Var::x, tol));
    const int m = std::min(u_new.order(), out.U.order());
    out.u_formula_discrepancy = norm_factorial(jet(u_new, m) - jet(out.U, m));
    return 0;
  });

  const double scale = tol * std::max(1.0, norm_factorial(out.U));
  if (out.u_formula_discrepancy > scale)
    out.warnings.push_back("closed-form unit disagrees with the factorized unit");
  if (!T::is_zero(out.U.coeff(0, 0) - K(1), scale)) out.warnings.push_back("U(0,0) differs from 1");
  return out;
}

// Nonnegative comparison sequence for the separatrix coefficients: the same recurrence
// with every free coefficient replaced by M sigma^(m+n) (a_00, a_10, a_01, b_00 excluded,
// b_01 = 1 split off).
struct MajorantSequence {
  double M = 0.0;
  double sigma = 0.0;
  std::vector<double> s;  // s[0..N]
};

MajorantSequence majorant_sequence(double M, double sigma, int n);

struct DominatingPair {
  double M = 0.0;
  double sigma = 1.0;
};

struct RadiusBound {
  DominatingPair pair;
  int order = 0;
  // (max over the upper half of p <= N of sbar_p^(1/p))^-1; empty when the majorant vanishes.
  std::optional<double> estimate;
  bool dominated = false;  // |s_p| <= sbar_p for all p <= order
  std::vector<double> majorant;
};

// Coefficient bound read off a polynomial equation with sigma = 1. Empty when the data
// reach the truncation order (tail unknown).
template <Coefficient K>
std::optional<DominatingPair> derive_dominating_pair(const DiagonalizedEquation<K>& deq) {
  if (deq.A.degree() >= deq.order() || deq.B.degree() >= deq.order()) return std::nullopt;
  double m = 0.0;
  for (const auto& [k, c] : deq.A.terms()) m = std::max(m, coeff_traits<K>::abs(c));
  for (const auto& [k, c] : deq.B.terms()) {
    if (k.i == 0 && k.j == 1) continue;
    m = std::max(m, coeff_traits<K>::abs(c));
  }
  return DominatingPair{m, 1.0};
}

std::optional<double> radius_estimate(const std::vector<double>& majorant);

// Majorant-based radius estimate for the separatrix, with the domination verified
// against the computed coefficients.
template <Coefficient K>
RadiusBound radius_lower_bound(const DiagonalizedEquation<K>& deq, int n,
                               std::optional<DominatingPair> user = std::nullopt, double tol = kDefaultTolZero) {
  std::optional<DominatingPair> pair = user ? user : derive_dominating_pair(deq);
  if (!pair) {
    throw std::invalid_argument(
        "radius bound: equation reaches its truncation order; supply an explicit (M, sigma) bound");
  }
  RadiusBound out;
  out.pair = *pair;
  out.order = n;
  const MajorantSequence maj = majorant_sequence(pair->M, pair->sigma, n);
  out.majorant = maj.s;
  out.estimate = radius_estimate(maj.s);
  const Separatrix<K> sep = separatrix_recurrence(deq, n, tol);
  out.dominated = true;
  for (int p = 0; p <= n; ++p) {
    const double sp = coeff_traits<K>::abs(sep.s[p]);
    const double bar = maj.s[static_cast<std::size_t>(p)];
    if (sp > bar * (1.0 + 1e-12)) out.dominated = false;
  }
  return out;
}

}  // namespace snf
