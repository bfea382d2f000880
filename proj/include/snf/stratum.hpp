#pragma once

#include <optional>

#include "snf/dulac.hpp"

namespace snf {

template <Coefficient K>
struct StratumReport {
  bool in_E1 = false;
  K A20;                       // coefficient of x^2 in the prepared A
  K a_straightened;            // coefficient of x in A1 / x after straightening
  bool identity_holds = false; // A20 == a_straightened
  std::optional<int> k;        // 1 on the stratum; empty means k >= 2 (unsupported)
};

// Tangency k = 1 iff A_{2,0} != 0. The coefficient is also recomputed after the
// separatrix is straightened, where it must reappear unchanged.
template <Coefficient K>
StratumReport<K> stratum_E1_test(const DiagonalizedEquation<K>& deq, double tol = kDefaultTolZero) {
  using T = coeff_traits<K>;
  if (deq.order() < 2) throw OrderError("stratum test needs order >= 2");
  StratumReport<K> out;
  out.A20 = deq.A.coeff(2, 0);
  const double scale = tol * std::max(1.0, deq.A.degree_max(2));
  out.in_E1 = !T::is_zero(out.A20, scale);
  if (out.in_E1) out.k = 1;

  const Separatrix<K> sep = separatrix_recurrence(deq, deq.order(), tol);
  const auto straightened = pushforward(deq.A, deq.B, FiberedChange<K>{Shear<K>{sep.s}}, tol);
  out.a_straightened = straightened.first.coeff(2, 0);
  if constexpr (T::exact) {
    out.identity_holds = out.a_straightened == out.A20;
  } else {
    out.identity_holds = T::abs(out.a_straightened - out.A20) <= scale;
  }
  return out;
}

// Membership in P_d: polynomial of degree <= d in both components, saddle-node, k = 1.
template <Coefficient K>
bool polynomial_family_check(const PlanarEquation<K>& eq, int d, double tol = kDefaultTolZero) {
  if (!degree_at_most(eq.A(), d, tol) || !degree_at_most(eq.B(), d, tol)) return false;
  if (eq.order() < 2) return false;
  try {
    return stratum_E1_test(diagonalize(eq, tol), tol).in_E1;
  } catch (const UnsupportedError&) {
    return false;
  }
}

}  // namespace snf
