#pragma once

#include "snf/series2.hpp"

namespace snf {

// sum over |J| <= order of |a_J| / J!  (evaluated on the truncation only)
template <Coefficient K>
double norm_factorial(const Series2<K>& f) {
  double n = 0.0;
  for (const auto& [k, c] : f.terms()) n += coeff_traits<K>::abs(c) / factorial(k);
  return n;
}

template <Coefficient K>
double norm_factorial(const Series1<K>& f) {
  double n = 0.0;
  for (int j = 0; j <= f.order(); ++j) n += coeff_traits<K>::abs(f[j]) / factorial(j);
  return n;
}

// sup_j |a_j|; bounds the factorial norm through ||f|| <= e ||f||_inf.
template <Coefficient K>
double norm_sup(const Series1<K>& f) {
  return f.max_abs();
}

}  // namespace snf
