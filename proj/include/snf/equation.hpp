#pragma once

#include <cmath>
#include <string>

#include "snf/series2.hpp"

namespace snf {

// [[a, b], [c, d]]
template <Coefficient K>
struct Mat2 {
  K a{}, b{}, c{}, d{};

  K det() const { return a * d - b * c; }
  K trace() const { return a + d; }
  Mat2 inverse() const {
    const K dt = det();
    return {d / dt, -b / dt, -c / dt, a / dt};
  }
  friend Mat2 operator*(const Mat2& l, const Mat2& r) {
    return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d, l.c * r.a + l.d * r.c, l.c * r.b + l.d * r.d};
  }
  friend bool operator==(const Mat2&, const Mat2&) = default;
};

// The differential equation A(x,y) dy = B(x,y) dx with a singular point at the origin.
// Tangent vector field: A d/dx + B d/dy.
template <Coefficient K>
class PlanarEquation {
 public:
  // Both series are cut to their common order. In floating, constant terms below
  // tolerance are cleared; larger ones are rejected.
  PlanarEquation(Series2<K> A, Series2<K> B, double tol = kDefaultTolZero) {
    const int n = std::min(A.order(), B.order());
    A_ = jet(A, n);
    B_ = jet(B, n);
    const double scale = tol * std::max(A_.low_scale(), B_.low_scale());
    if (!coeff_traits<K>::is_zero(A_.coeff(0, 0), scale) || !coeff_traits<K>::is_zero(B_.coeff(0, 0), scale))
      throw std::invalid_argument("the origin is not a singular point: A(0,0) or B(0,0) is nonzero");
    A_.set(0, 0, K{});
    B_.set(0, 0, K{});
  }

  const Series2<K>& A() const noexcept { return A_; }
  const Series2<K>& B() const noexcept { return B_; }
  int order() const noexcept { return A_.order(); }

  Mat2<K> jacobian() const {
    if (order() < 1) return {};
    return {A_.coeff(1, 0), A_.coeff(0, 1), B_.coeff(1, 0), B_.coeff(0, 1)};
  }

 private:
  Series2<K> A_;
  Series2<K> B_;
};

enum class Regime { Linearizable, PolynomialNormalizable, SaddleNode, Other, Unsupported };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::Linearizable: return "Linearizable";
    case Regime::PolynomialNormalizable: return "PolynomialNormalizable";
    case Regime::SaddleNode: return "SaddleNode";
    case Regime::Other: return "Other";
    case Regime::Unsupported: return "unsupported";
  }
  return "unsupported";
}

template <Coefficient K>
struct LinearPartData {
  Mat2<K> matrix;
  Complex lambda1;  // zero for a saddle-node
  Complex lambda2;  // nonzero unless the regime is Unsupported
  Complex lambda;   // lambda1 / lambda2
  Regime regime = Regime::Unsupported;
};

namespace detail {

// True when z lies within tol of a positive integer.
inline bool near_positive_integer(Complex z, double tol) {
  const double n = std::round(z.real());
  return n >= 1.0 && std::abs(z - Complex(n, 0.0)) <= tol * std::max(1.0, std::abs(z));
}

}  // namespace detail

// Classifies the linear part by lambda = lambda1/lambda2 (Poincare-Dulac taxonomy).
template <Coefficient K>
LinearPartData<K> linear_classify(const PlanarEquation<K>& eq, double tol = kDefaultTolZero) {
  using T = coeff_traits<K>;
  LinearPartData<K> out;
  out.matrix = eq.jacobian();
  const Mat2<K>& m = out.matrix;
  const K tr = m.trace();
  const K det = m.det();
  const Complex trc = T::to_complex(tr);
  const Complex detc = T::to_complex(det);
  const double scale = std::max({1.0, T::abs(m.a), T::abs(m.b), T::abs(m.c), T::abs(m.d)});

  bool nilpotent = false;
  bool saddle_node = false;
  if constexpr (T::exact) {
    nilpotent = tr.is_zero() && det.is_zero();
    saddle_node = !nilpotent && det.is_zero();
  } else {
    nilpotent = std::abs(trc) <= tol * scale && std::abs(detc) <= tol * scale * scale;
    saddle_node = !nilpotent && std::abs(detc) <= tol * std::norm(trc);
  }
  if (nilpotent) {
    out.regime = Regime::Unsupported;
    return out;
  }
  if (saddle_node) {
    out.lambda1 = 0.0;
    out.lambda2 = trc;
    out.lambda = 0.0;
    out.regime = Regime::SaddleNode;
    return out;
  }

  const Complex root = std::sqrt(trc * trc - 4.0 * detc);
  Complex e1 = 0.5 * (trc + root);
  Complex e2 = 0.5 * (trc - root);
  // lambda2 is the eigenvalue attached to the y-direction: the one closest to dB/dy.
  const Complex dyy = T::to_complex(m.d);
  if (std::abs(e1 - dyy) < std::abs(e2 - dyy)) std::swap(e1, e2);
  out.lambda1 = e1;
  out.lambda2 = e2;
  out.lambda = e1 / e2;
  const Complex l = out.lambda;
  const bool real = std::abs(l.imag()) <= tol * std::max(1.0, std::abs(l));
  if (real && l.real() < 0.0) {
    out.regime = Regime::Other;
  } else if (detail::near_positive_integer(l, tol) || detail::near_positive_integer(1.0 / l, tol)) {
    out.regime = Regime::PolynomialNormalizable;
  } else {
    out.regime = Regime::Linearizable;
  }
  return out;
}

// Old coordinates = P * new coordinates; the field is then divided by lambda2.
template <Coefficient K>
struct LinearChange {
  Mat2<K> P;
  K time_scale;  // 1 / lambda2
};

// A = o(|x,y|), B = y + o(|x,y|).
template <Coefficient K>
struct DiagonalizedEquation {
  Series2<K> A;
  Series2<K> B;
  LinearChange<K> change;
  double snapped = 0.0;  // largest linear-part residue cleared in floating (0 when exact)

  int order() const noexcept { return A.order(); }
};

namespace detail {

// Nonzero vector spanning the kernel of a rank-one 2x2 matrix.
template <Coefficient K>
std::pair<K, K> kernel_vector(const Mat2<K>& n) {
  using T = coeff_traits<K>;
  const double r1 = std::max(T::abs(n.a), T::abs(n.b));
  const double r2 = std::max(T::abs(n.c), T::abs(n.d));
  if (r1 >= r2 && r1 > 0.0) return {-n.b, n.a};
  if (r2 > 0.0) return {-n.d, n.c};
  throw UnsupportedError("linear part has no rank-one eigenspace");
}

// Scale v so that component `lead` (0 or 1) becomes 1, falling back to the other.
template <Coefficient K>
std::pair<K, K> normalize_vector(std::pair<K, K> v, int lead, double tol) {
  using T = coeff_traits<K>;
  const double size = std::max(T::abs(v.first), T::abs(v.second));
  const K& first = lead == 0 ? v.first : v.second;
  const K& second = lead == 0 ? v.second : v.first;
  const K pivot = !T::is_zero(first, tol * size) ? first : second;
  return {v.first / pivot, v.second / pivot};
}

}  // namespace detail

// Apply a linear change old = P * new to the vector field (A, B) and rescale time by c:
// (A', B') = c * P^{-1} (A, B)(P (x, y)).
template <Coefficient K>
std::pair<Series2<K>, Series2<K>> apply_linear_change(const Series2<K>& A, const Series2<K>& B,
                                                      const LinearChange<K>& ch) {
  const Mat2<K>& p = ch.P;
  const Series2<K> Ap = linear_substitute(A, p.a, p.b, p.c, p.d);
  const Series2<K> Bp = linear_substitute(B, p.a, p.b, p.c, p.d);
  const Mat2<K> q = p.inverse();
  return {ch.time_scale * (q.a * Ap + q.b * Bp), ch.time_scale * (q.c * Ap + q.d * Bp)};
}

// Moves the saddle-node to the prepared diagonal form: kernel eigenvector -> x-axis,
// lambda2-eigenvector -> y-axis, time divided by lambda2.
template <Coefficient K>
DiagonalizedEquation<K> diagonalize(const PlanarEquation<K>& eq, double tol = kDefaultTolZero) {
  using T = coeff_traits<K>;
  if (eq.order() < 1) throw OrderError("diagonalize needs order >= 1");
  const LinearPartData<K> lp = linear_classify(eq, tol);
  if (lp.regime != Regime::SaddleNode) {
    throw UnsupportedError(std::string("not a saddle-node (regime ") + to_string(lp.regime) +
                           "): exactly one nonzero eigenvalue is required");
  }
  const Mat2<K>& m = lp.matrix;
  const K lambda2 = m.trace();
  const Mat2<K> shifted{m.a - lambda2, m.b, m.c, m.d - lambda2};
  const auto v1 = detail::normalize_vector(detail::kernel_vector(m), 0, tol);
  const auto v2 = detail::normalize_vector(detail::kernel_vector(shifted), 1, tol);
  LinearChange<K> change{{v1.first, v2.first, v1.second, v2.second}, K(1) / lambda2};
  if (T::is_zero(change.P.det(), tol)) throw UnsupportedError("defective linear part");

  auto [A, B] = apply_linear_change(eq.A(), eq.B(), change);
  DiagonalizedEquation<K> out{std::move(A), std::move(B), change, 0.0};
  const K residues[] = {out.A.coeff(1, 0), out.A.coeff(0, 1), out.B.coeff(1, 0), out.B.coeff(0, 1) - K(1)};
  for (const K& r : residues) out.snapped = std::max(out.snapped, T::abs(r));
  if constexpr (T::exact) {
    if (out.snapped != 0.0) throw Error("internal: exact diagonalization left a nonzero residue");
  } else {
    if (out.snapped > std::sqrt(tol)) throw UnsupportedError("diagonalization is numerically unstable");
    out.A.set(1, 0, K{});
    out.A.set(0, 1, K{});
    out.B.set(1, 0, K{});
    out.B.set(0, 1, K(1));
  }
  return out;
}

// A = o(|x,y|) and B = y + o(|x,y|) within tolerance.
template <Coefficient K>
bool is_prepared(const DiagonalizedEquation<K>& deq, double tol = kDefaultTolZero) {
  using T = coeff_traits<K>;
  if (deq.A.order() != deq.B.order() || deq.order() < 1) return false;
  const double s = tol * std::max(deq.A.low_scale(), deq.B.low_scale());
  return T::is_zero(deq.A.coeff(0, 0), s) && T::is_zero(deq.A.coeff(1, 0), s) &&
         T::is_zero(deq.A.coeff(0, 1), s) && T::is_zero(deq.B.coeff(0, 0), s) &&
         T::is_zero(deq.B.coeff(1, 0), s) && T::is_zero(deq.B.coeff(0, 1) - K(1), s);
}

}  // namespace snf
