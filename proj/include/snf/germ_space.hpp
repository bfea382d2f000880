#pragma once

#include <optional>
#include <vector>

#include "snf/series2.hpp"

namespace snf {

// Row k holds the coefficients of the p-jet of f_k in graded monomial order.
template <Coefficient K>
struct JetMatrix {
  int family_size = 0;
  int p = 0;
  int columns = 0;
  std::vector<K> entries;  // row-major

  const K& at(int row, int col) const {
    return entries[static_cast<std::size_t>(row) * static_cast<std::size_t>(columns) + static_cast<std::size_t>(col)];
  }
};

namespace detail {

template <Coefficient K>
std::vector<K> jet_row(const Series1<K>& f, int p) {
  const Series1<K> j = jet(f, p);
  const auto c = j.coefficients();
  return {c.begin(), c.end()};
}

template <Coefficient K>
std::vector<K> jet_row(const Series2<K>& f, int p) {
  return jet(f, p).dense(p);
}

template <class S>
struct series_coeff;
template <Coefficient K>
struct series_coeff<Series1<K>> {
  using type = K;
};
template <Coefficient K>
struct series_coeff<Series2<K>> {
  using type = K;
};

}  // namespace detail

template <class S>
using series_coeff_t = typename detail::series_coeff<S>::type;

template <class S>
JetMatrix<series_coeff_t<S>> jet_matrix(const std::vector<S>& family, int p) {
  if (family.empty()) throw std::invalid_argument("jet matrix of an empty family");
  JetMatrix<series_coeff_t<S>> m;
  m.family_size = static_cast<int>(family.size());
  m.p = p;
  for (const auto& f : family) {
    auto row = detail::jet_row(f, p);
    m.columns = static_cast<int>(row.size());
    m.entries.insert(m.entries.end(), std::make_move_iterator(row.begin()), std::make_move_iterator(row.end()));
  }
  return m;
}

// Rank by Gaussian elimination: exact pivots in the exact backend, complete pivoting
// with a relative threshold in floating.
template <Coefficient K>
int matrix_rank(std::vector<K> a, int rows, int cols, double tol = kDefaultTolZero) {
  using T = coeff_traits<K>;
  auto at = [&](int r, int c) -> K& {
    return a[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)];
  };
  double scale = 0.0;
  for (const auto& v : a) scale = std::max(scale, T::abs(v));
  const double threshold = tol * std::max(1.0, scale);
  int rank = 0;
  std::vector<int> colperm(static_cast<std::size_t>(cols));
  for (int c = 0; c < cols; ++c) colperm[static_cast<std::size_t>(c)] = c;
  for (int step = 0; step < std::min(rows, cols); ++step) {
    int pr = -1, pc = -1;
    double best = 0.0;
    for (int r = step; r < rows; ++r) {
      for (int c = step; c < cols; ++c) {
        const K& v = at(r, colperm[static_cast<std::size_t>(c)]);
        if constexpr (T::exact) {
          if (!v.is_zero()) {
            pr = r;
            pc = c;
            break;
          }
        } else {
          const double m = T::abs(v);
          if (m > best) {
            best = m;
            pr = r;
            pc = c;
          }
        }
      }
      if constexpr (T::exact) {
        if (pr >= 0) break;
      }
    }
    if (pr < 0) break;
    if constexpr (!T::exact) {
      if (best <= threshold) break;
    }
    std::swap(colperm[static_cast<std::size_t>(step)], colperm[static_cast<std::size_t>(pc)]);
    if (pr != step)
      for (int c = 0; c < cols; ++c) std::swap(at(step, c), at(pr, c));
    const int pcol = colperm[static_cast<std::size_t>(step)];
    const K pivot = at(step, pcol);
    for (int r = step + 1; r < rows; ++r) {
      if (detail::exact_zero(at(r, pcol))) continue;
      const K factor = at(r, pcol) / pivot;
      for (int c = step; c < cols; ++c) {
        const int cc = colperm[static_cast<std::size_t>(c)];
        at(r, cc) -= factor * at(step, cc);
      }
    }
    ++rank;
  }
  return rank;
}

template <class S>
int jet_rank(const std::vector<S>& family, int p, double tol = kDefaultTolZero) {
  if (family.empty()) throw std::invalid_argument("jet_rank of an empty family");
  for (const auto& f : family)
    if (p < 0 || p > f.order()) throw OrderError("jet order exceeds a family member's order");
  const auto m = jet_matrix(family, p);
  return matrix_rank(m.entries, m.family_size, m.columns, tol);
}

// free with the first p whose jets are independent; otherwise undetermined
// (finite jets cannot certify dependence of germs).
struct FreedomCertificate {
  bool free = false;
  std::optional<int> p;
  int max_p = 0;
};

template <class S>
FreedomCertificate freedom_certificate(const std::vector<S>& family, int max_p, double tol = kDefaultTolZero) {
  FreedomCertificate out;
  out.max_p = max_p;
  const int n = static_cast<int>(family.size());
  for (int p = 0; p <= max_p; ++p) {
    if (jet_rank(family, p, tol) == n) {
      out.free = true;
      out.p = p;
      return out;
    }
  }
  return out;
}

// Smallest N >= 1 with |a_j| <= N^j for every stored j >= 1. The constant term needs
// |a_0| <= 1 for any N; a violation is reported separately.
struct SchafkeCertificate {
  long min_n = 1;
  int order = 0;
  bool constant_term_ok = true;
};

namespace detail {

inline bool within_power(const Complex& a, long n, int j) {
  return std::abs(a) <= std::pow(static_cast<double>(n), j) * (1.0 + 1e-12);
}

inline bool within_power(const RationalComplex& a, long n, int j) {
  mpz_class bound;
  mpz_ui_pow_ui(bound.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(2 * j));
  return a.norm2() <= mpq_class(bound);
}

}  // namespace detail

template <Coefficient K>
bool in_schafke_set(const Series1<K>& f, long n) {
  for (int j = 0; j <= f.order(); ++j)
    if (!detail::within_power(f[j], n, j)) return false;
  return true;
}

template <Coefficient K>
SchafkeCertificate schafke_min_N(const Series1<K>& f) {
  SchafkeCertificate out;
  out.order = f.order();
  out.constant_term_ok = detail::within_power(f[0], 1, 0);
  double root = 1.0;
  for (int j = 1; j <= f.order(); ++j) root = std::max(root, std::pow(coeff_traits<K>::abs(f[j]), 1.0 / j));
  long n = std::max(1L, static_cast<long>(std::ceil(root * (1.0 - 1e-12))));
  auto member = [&](long m) {
    for (int j = 1; j <= f.order(); ++j)
      if (!detail::within_power(f[j], m, j)) return false;
    return true;
  };
  while (!member(n)) ++n;
  while (n > 1 && member(n - 1)) --n;
  out.min_n = n;
  return out;
}

// Least-squares polynomial fit of 1/z on K+ = {|z| <= 1, Im z >= eps} and 1 on
// K- = {|z| <= 1, Im z <= 0}.
enum class DuvalTarget { both, minus_only, plus_only };

struct DuvalSamples {
  std::vector<Complex> plus;
  std::vector<Complex> minus;
  std::vector<Complex> circle;  // unit circle, for the disc sup (maximum modulus)
};

// Deterministic boundary-weighted samples: three quarters on the boundary, the rest on
// an interior grid.
DuvalSamples duval_samples(double eps, int samples);

struct DuvalStage {
  int n = 0;
  double eps = 0.0;
  int degree = 0;
  Series1<Complex> P;
  double sup_plus = 0.0;
  double sup_minus = 0.0;
  double sup_disc = 0.0;
  double rms = 0.0;  // root-mean-square residual over the fitted samples
  double condition = 1.0;
  bool reliable = true;
};

DuvalStage duval_stage(int n, double eps, int degree, int samples, DuvalTarget target = DuvalTarget::both);

// Same, on a precomputed sample set.
DuvalStage duval_stage(int n, double eps, int degree, const DuvalSamples& samples,
                       DuvalTarget target = DuvalTarget::both);

}  // namespace snf
