#include "snf/germ_space.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace snf {

namespace {

constexpr int kMaxDuvalDegree = 64;
constexpr int kMaxDuvalSamples = 200000;
constexpr double kConditionLimit = 1e12;

void arc(std::vector<Complex>& out, double from, double to, int count) {
  for (int k = 0; k < count; ++k) {
    const double t = count == 1 ? 0.5 : static_cast<double>(k) / (count - 1);
    out.push_back(std::polar(1.0, from + t * (to - from)));
  }
}

void segment(std::vector<Complex>& out, Complex a, Complex b, int count) {
  for (int k = 0; k < count; ++k) {
    const double t = count == 1 ? 0.5 : static_cast<double>(k) / (count - 1);
    out.push_back(a + t * (b - a));
  }
}

// Grid points of [-1, 1] x [lo, hi] inside the closed unit disc, about `count` of them.
void interior(std::vector<Complex>& out, double lo, double hi, int count) {
  if (count <= 0) return;
  const double area = 0.5 * std::numbers::pi * (hi - lo);
  const double h = std::sqrt(area / count);
  for (double y = lo + 0.5 * h; y < hi; y += h)
    for (double x = -1.0 + 0.5 * h; x < 1.0; x += h)
      if (x * x + y * y <= 1.0) out.emplace_back(x, y);
}

double sup_error(const Series1<Complex>& p, const std::vector<Complex>& pts, bool reciprocal) {
  double m = 0.0;
  for (const Complex& z : pts) {
    const Complex target = reciprocal ? 1.0 / z : Complex(1.0);
    m = std::max(m, std::abs(evaluate(p, z) - target));
  }
  return m;
}

}  // namespace

DuvalSamples duval_samples(double eps, int samples) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("duval: eps must lie in (0, 1)");
  if (samples < 16 || samples > kMaxDuvalSamples) throw std::invalid_argument("duval: sample count out of range");
  DuvalSamples s;
  const int half = samples / 2;
  const int boundary = 3 * half / 4;

  // K+: arc above Im z = eps, closed by the chord Im z = eps.
  const double t0 = std::asin(eps);
  const double arc_plus = std::numbers::pi - 2.0 * t0;
  const double chord = 2.0 * std::cos(t0);
  const int n_arc_plus = static_cast<int>(std::lround(boundary * arc_plus / (arc_plus + chord)));
  arc(s.plus, t0, std::numbers::pi - t0, n_arc_plus);
  segment(s.plus, Complex(-std::cos(t0), eps), Complex(std::cos(t0), eps), boundary - n_arc_plus);
  interior(s.plus, eps, 1.0, half - boundary);

  // K-: lower half disc.
  const double arc_minus = std::numbers::pi;
  const int n_arc_minus = static_cast<int>(std::lround(boundary * arc_minus / (arc_minus + 2.0)));
  arc(s.minus, std::numbers::pi, 2.0 * std::numbers::pi, n_arc_minus);
  segment(s.minus, Complex(-1.0, 0.0), Complex(1.0, 0.0), boundary - n_arc_minus);
  interior(s.minus, -1.0, 0.0, half - boundary);

  arc(s.circle, 0.0, 2.0 * std::numbers::pi, std::max(samples, 512));
  return s;
}

DuvalStage duval_stage(int n, double eps, int degree, const DuvalSamples& samples, DuvalTarget target) {
  if (degree < 0 || degree > kMaxDuvalDegree) throw std::invalid_argument("duval: degree out of range");
  std::vector<Complex> pts, values;
  if (target != DuvalTarget::minus_only) {
    for (const Complex& z : samples.plus) {
      pts.push_back(z);
      values.push_back(1.0 / z);
    }
  }
  if (target != DuvalTarget::plus_only) {
    for (const Complex& z : samples.minus) {
      pts.push_back(z);
      values.push_back(1.0);
    }
  }
  const auto rows = static_cast<Eigen::Index>(pts.size());
  const Eigen::Index cols = degree + 1;
  Eigen::MatrixXcd V(rows, cols);
  Eigen::VectorXcd b(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    Complex zp = 1.0;
    for (Eigen::Index c = 0; c < cols; ++c) {
      V(r, c) = zp;
      zp *= pts[static_cast<std::size_t>(r)];
    }
    b(r) = values[static_cast<std::size_t>(r)];
  }
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(V, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXcd coeffs = svd.solve(b);
  const auto& sv = svd.singularValues();

  DuvalStage st;
  st.n = n;
  st.eps = eps;
  st.degree = degree;
  st.condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
  std::vector<Complex> c(static_cast<std::size_t>(cols));
  bool finite = true;
  for (Eigen::Index k = 0; k < cols; ++k) {
    c[static_cast<std::size_t>(k)] = coeffs(k);
    finite = finite && std::isfinite(coeffs(k).real()) && std::isfinite(coeffs(k).imag());
  }
  st.reliable = finite && st.condition < kConditionLimit;
  if (!finite) return st;
  st.P = Series1<Complex>(degree, std::move(c));
  st.rms = rows > 0 ? (V * coeffs - b).norm() / std::sqrt(static_cast<double>(rows)) : 0.0;
  st.sup_plus = sup_error(st.P, samples.plus, true);
  st.sup_minus = sup_error(st.P, samples.minus, false);
  double disc = 0.0;
  for (const Complex& z : samples.circle) disc = std::max(disc, std::abs(evaluate(st.P, z)));
  st.sup_disc = disc;
  return st;
}

DuvalStage duval_stage(int n, double eps, int degree, int samples, DuvalTarget target) {
  return duval_stage(n, eps, degree, duval_samples(eps, samples), target);
}

}  // namespace snf
