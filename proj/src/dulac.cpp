#include "snf/dulac.hpp"

#include <cmath>
#include <stdexcept>

namespace snf {

MajorantSequence majorant_sequence(double M, double sigma, int n) {
  if (!(M >= 0.0) || !std::isfinite(M)) throw std::invalid_argument("majorant: M must be finite and >= 0");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("majorant: sigma must be finite and > 0");
  detail::check_order(n);
  const auto N = static_cast<std::size_t>(n + 1);
  std::vector<double> pw(2 * N, 1.0);
  for (std::size_t k = 1; k < pw.size(); ++k) pw[k] = pw[k - 1] * sigma;
  std::vector<std::vector<double>> S(N, std::vector<double>(N, 0.0));
  std::vector<double> s(N, 0.0), wb(N, 0.0);
  S[0][0] = 1.0;
  auto power = [&](int k, int j) { return k == 1 ? s[static_cast<std::size_t>(j)] : S[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]; };
  auto coeff = [&](int k, int m) { return M * pw[static_cast<std::size_t>(k + m)]; };

  for (int p = 0; p <= n; ++p) {
    const auto up = static_cast<std::size_t>(p);
    for (int k = 2; 2 * k <= p; ++k) {
      double acc = 0.0;
      for (int q = 2; q <= p - 2 * (k - 1); ++q) acc += s[static_cast<std::size_t>(q)] * S[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(p - q)];
      S[static_cast<std::size_t>(k)][up] = acc;
    }
    // [y^p] Abar(sbar, y), every a_{k,m} = M sigma^(k+m) except a_00, a_10, a_01.
    double wa = 0.0;
    for (int m = 0; m <= p; ++m) {
      const int j = p - m;
      if (j == 0 && m >= 2) wa += coeff(0, m);
      for (int k = m == 0 ? 2 : 1; 2 * k <= j; ++k) wa += coeff(k, m) * power(k, j);
    }
    if (p >= 2) {
      double acc = wa;
      for (int k = 2; k < p; ++k) acc += k * wb[static_cast<std::size_t>(p + 1 - k)] * s[static_cast<std::size_t>(k)];
      s[up] = acc / p;
    }
    S[1][up] = s[up];
    // [y^p] Bhat(sbar, y), every b_{k,m} = M sigma^(k+m) except b_00 and b_01.
    double b = 0.0;
    for (int m = 0; m <= p; ++m) {
      const int j = p - m;
      if (j == 0 && m >= 2) b += coeff(0, m);
      for (int k = 1; 2 * k <= j; ++k) b += coeff(k, m) * power(k, j);
    }
    wb[up] = b;
  }
  return {M, sigma, std::move(s)};
}

std::optional<double> radius_estimate(const std::vector<double>& majorant) {
  if (majorant.empty()) return std::nullopt;
  const int n = static_cast<int>(majorant.size()) - 1;
  double worst = 0.0;
  for (int p = std::max(2, (n + 1) / 2); p <= n; ++p) {
    const double v = majorant[static_cast<std::size_t>(p)];
    if (v > 0.0) worst = std::max(worst, std::pow(v, 1.0 / p));
  }
  if (worst == 0.0) return std::nullopt;
  return 1.0 / worst;
}

}  // namespace snf
