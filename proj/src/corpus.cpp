#include "snf/corpus.hpp"

#include "snf/stratum.hpp"

namespace snf {

namespace {

// Plain modulo keeps the stream identical across standard libraries.
long uniform(std::mt19937_64& rng, long lo, long hi) {
  return lo + static_cast<long>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

constexpr double kMaxPreparedCoefficient = 64.0;

}  // namespace

RationalComplex random_unit_rational(std::mt19937_64& rng) {
  for (;;) {
    const long p = uniform(rng, -8, 8);
    const long q = uniform(rng, -8, 8);
    if (p * p + q * q <= 64) return {mpq_class(p, 8), mpq_class(q, 8)};
  }
}

ExactEquation random_e1_equation(std::mt19937_64& rng, int degree, int order) {
  if (degree < 2 || degree > order) throw std::invalid_argument("corpus: need 2 <= degree <= order");
  for (;;) {
    const RationalComplex u1 = random_unit_rational(rng), u2 = random_unit_rational(rng);
    const RationalComplex v1 = random_unit_rational(rng), v2 = random_unit_rational(rng);
    const RationalComplex trace = v1 * u1 + v2 * u2;
    if (trace.norm2() < mpq_class(1, 16)) continue;

    Series2<RationalComplex> A(order), B(order);
    A.set(1, 0, u1 * v1);
    A.set(0, 1, u1 * v2);
    B.set(1, 0, u2 * v1);
    B.set(0, 1, u2 * v2);
    for (int d = 2; d <= degree; ++d) {
      for (int j = 0; j <= d; ++j) {
        if (uniform(rng, 0, 1) == 1) A.set(d - j, j, random_unit_rational(rng));
        if (uniform(rng, 0, 1) == 1) B.set(d - j, j, random_unit_rational(rng));
      }
    }
    ExactEquation eq(A, B);
    try {
      const auto deq = diagonalize(eq);
      if (deq.A.coeff(2, 0).is_zero()) continue;
      if (std::max(deq.A.max_abs(), deq.B.max_abs()) > kMaxPreparedCoefficient) continue;
    } catch (const UnsupportedError&) {
      continue;
    }
    return eq;
  }
}

std::vector<ExactEquation> random_e1_corpus(int count, int degree, int order, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ExactEquation> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) out.push_back(random_e1_equation(rng, degree, order));
  return out;
}

}  // namespace snf
