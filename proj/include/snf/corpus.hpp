#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "snf/equation.hpp"

namespace snf {

using ExactEquation = PlanarEquation<RationalComplex>;

// Gaussian rational (p + q i)/8 with p^2 + q^2 <= 64.
RationalComplex random_unit_rational(std::mt19937_64& rng);

// Polynomial saddle-node of degree <= `degree` with A_20 != 0 after diagonalization.
// The linear part is u v^T with v.u != 0; every coefficient lies in the closed unit disc.
ExactEquation random_e1_equation(std::mt19937_64& rng, int degree, int order);

std::vector<ExactEquation> random_e1_corpus(int count, int degree, int order, std::uint64_t seed);

}  // namespace snf
