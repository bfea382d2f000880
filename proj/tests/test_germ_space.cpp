#include <doctest.h>

#include "snf/germ_space.hpp"
#include "test_support.hpp"

using namespace snf;
using namespace snf::test;

namespace {

template <Coefficient K>
Series1<K> poly(std::vector<long> c, int order) {
  Series1<K> f(order);
  for (std::size_t j = 0; j < c.size(); ++j) f.set(static_cast<int>(j), K(c[j]));
  return f;
}

// rows x cols matrix with an identity block in a random column subset and random fill elsewhere;
// its rank is `rows`.
std::vector<Q> full_rank_block(std::mt19937_64& rng, int rows, int cols) {
  std::vector<int> pivots(static_cast<std::size_t>(cols));
  for (int c = 0; c < cols; ++c) pivots[static_cast<std::size_t>(c)] = c;
  std::shuffle(pivots.begin(), pivots.end(), rng);
  pivots.resize(static_cast<std::size_t>(rows));
  std::vector<Q> m(static_cast<std::size_t>(rows * cols));
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const bool pivot_col = std::find(pivots.begin(), pivots.end(), c) != pivots.end();
      m[static_cast<std::size_t>(r * cols + c)] =
          pivot_col ? Q(c == pivots[static_cast<std::size_t>(r)] ? 1 : 0) : Q(uniform(rng, -3, 3));
    }
  return m;
}

}  // namespace

TEST_CASE_TEMPLATE("jet_rank examples", K, C, Q) {
  const std::vector<Series1<K>> pair{poly<K>({1, 1}, 4), poly<K>({1, 1, 1}, 4)};
  CHECK(jet_rank(pair, 1) == 1);
  CHECK(jet_rank(pair, 2) == 2);
  const std::vector<Series1<K>> prop{poly<K>({0, 1}, 5), poly<K>({0, 2}, 5)};
  for (int p = 0; p <= 5; ++p) CHECK(jet_rank(prop, p) == (p == 0 ? 0 : 1));
  const std::vector<Series1<K>> basis{poly<K>({1}, 2), poly<K>({0, 1}, 2), poly<K>({0, 0, 1}, 2)};
  CHECK(jet_rank(basis, 2) == 3);
  CHECK(jet_rank(basis, 1) == 2);

  const std::vector<Series2<K>> bivariate{mono<K>(1, 0, 1, 3), mono<K>(0, 1, 1, 3), mono<K>(1, 0, 1, 3) + mono<K>(0, 1, 1, 3)};
  CHECK(jet_rank(bivariate, 3) == 2);
  const auto m = jet_matrix(bivariate, 1);
  CHECK(m.columns == 3);
  CHECK(m.at(2, 1) == K(1));
  CHECK(m.at(2, 2) == K(1));
  CHECK(m.at(0, 0) == K(0));
}

TEST_CASE("jet_rank errors") {
  CHECK_THROWS_AS(jet_rank(std::vector<Series1<Q>>{}, 0), std::invalid_argument);
  CHECK_THROWS_AS(jet_rank(std::vector<Series1<Q>>{poly<Q>({1}, 2)}, 3), OrderError);
}

TEST_CASE_TEMPLATE("freedom examples", K, C, Q) {
  const auto a = freedom_certificate(std::vector<Series1<K>>{poly<K>({1, 1}, 4), poly<K>({1, 1, 1}, 4)}, 4);
  CHECK(a.free);
  CHECK(a.p == 2);
  const auto b = freedom_certificate(std::vector<Series1<K>>{poly<K>({0, 1}, 6), poly<K>({0, 2}, 6)}, 6);
  CHECK_FALSE(b.free);
  CHECK_FALSE(b.p.has_value());
  CHECK(b.max_p == 6);
}

TEST_CASE_TEMPLATE("freedom agrees with the complete coefficient rank", K, C, Q) {
  std::mt19937_64 rng(2718);
  const int order = 8;
  int free_count = 0;
  for (int t = 0; t < 100; ++t) {
    const int n = static_cast<int>(uniform(rng, 1, 5));
    const int r = static_cast<int>(uniform(rng, 1, n));
    // family = L * G with L (n x r) and G (r x 9) both of full rank r
    auto L = full_rank_block(rng, r, n);  // stored transposed: r x n
    auto G = full_rank_block(rng, r, order + 1);
    std::vector<Series1<K>> family;
    for (int k = 0; k < n; ++k) {
      std::vector<K> c(static_cast<std::size_t>(order + 1), K{});
      for (int i = 0; i < r; ++i)
        for (int j = 0; j <= order; ++j) {
          const Q v = L[static_cast<std::size_t>(i * n + k)] * G[static_cast<std::size_t>(i * (order + 1) + j)];
          if constexpr (coeff_traits<K>::exact) {
            c[static_cast<std::size_t>(j)] += v;
          } else {
            c[static_cast<std::size_t>(j)] += v.to_complex();
          }
        }
      family.emplace_back(order, std::move(c));
    }
    CHECK(jet_rank(family, order) == r);
    int previous = 0;
    for (int p = 0; p <= order; ++p) {
      const int rank = jet_rank(family, p);
      CHECK(rank >= previous);
      CHECK(rank <= n);
      previous = rank;
    }
    const auto cert = freedom_certificate(family, order);
    CHECK(cert.free == (r == n));
    if (cert.free) {
      ++free_count;
      REQUIRE(cert.p.has_value());
      CHECK(jet_rank(family, *cert.p) == n);
      if (*cert.p > 0) CHECK(jet_rank(family, *cert.p - 1) < n);
    }
  }
  CHECK(free_count > 10);
  CHECK(free_count < 90);
}

TEST_CASE_TEMPLATE("schafke examples", K, C, Q) {
  std::vector<long> powers;
  for (int j = 0; j <= 10; ++j) powers.push_back(1L << j);
  const auto f = poly<K>(powers, 10);
  auto cert = schafke_min_N(f);
  CHECK(cert.min_n == 2);
  CHECK(cert.order == 10);
  CHECK(cert.constant_term_ok);
  CHECK(in_schafke_set(f, 2));
  CHECK_FALSE(in_schafke_set(f, 1));

  CHECK(schafke_min_N(poly<K>({0, 1}, 6)).min_n == 1);
  const auto bad = schafke_min_N(poly<K>({5, 1}, 3));
  CHECK_FALSE(bad.constant_term_ok);
  CHECK(bad.min_n == 1);
  CHECK_FALSE(in_schafke_set(poly<K>({5, 1}, 3), 100));
}

TEST_CASE("schafke minimality on random series") {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 200; ++t) {
    Series1<Q> f(static_cast<int>(uniform(rng, 1, 12)));
    for (int j = 1; j <= f.order(); ++j)
      f.set(j, Q(mpq_class(uniform(rng, -400, 400), uniform(rng, 1, 7)), mpq_class(uniform(rng, -50, 50), 3)));
    const auto cert = schafke_min_N(f);
    CHECK(cert.min_n >= 1);
    CHECK(in_schafke_set(f, cert.min_n));
    CHECK(in_schafke_set(f, cert.min_n + 5));
    if (cert.min_n >= 2) CHECK_FALSE(in_schafke_set(f, cert.min_n - 1));
  }
  // |a_2| = 9 = 3^2 exactly sits on the boundary
  CHECK(schafke_min_N(poly<Q>({0, 0, 9}, 2)).min_n == 3);
  CHECK(schafke_min_N(poly<C>({0, 0, 9}, 2)).min_n == 3);
}

TEST_CASE("duval: a constant target is reproduced exactly") {
  for (int degree : {0, 3, 8}) {
    const auto st = duval_stage(1, 0.3, degree, 400, DuvalTarget::minus_only);
    CHECK(st.sup_minus <= 1e-12);
    CHECK(std::abs(st.P[0] - 1.0) <= 1e-12);
    for (int j = 1; j <= st.P.order(); ++j) CHECK(std::abs(st.P[j]) <= 1e-12);
    CHECK(st.reliable);
  }
}

TEST_CASE("duval: degree 0 cannot fit 1/z on K+") {
  const auto st = duval_stage(1, 0.5, 0, 800);
  // i and i/2 lie in K+, where 1/z takes the values -i and -2i
  CHECK(st.sup_plus >= 0.5);
  CHECK(st.P.order() == 0);
}

TEST_CASE("duval: samples and invariants") {
  const auto s = duval_samples(0.3, 1000);
  CHECK_FALSE(s.plus.empty());
  CHECK_FALSE(s.minus.empty());
  for (const auto& z : s.plus) {
    CHECK(std::abs(z) <= 1.0 + 1e-12);
    CHECK(z.imag() >= 0.3 - 1e-12);
  }
  for (const auto& z : s.minus) {
    CHECK(std::abs(z) <= 1.0 + 1e-12);
    CHECK(z.imag() <= 1e-12);
  }
  const auto st = duval_stage(2, 0.3, 6, s);
  double plus = 0.0, minus = 0.0, disc = 0.0;
  for (const auto& z : s.plus) plus = std::max(plus, std::abs(evaluate(st.P, z) - 1.0 / z));
  for (const auto& z : s.minus) minus = std::max(minus, std::abs(evaluate(st.P, z) - 1.0));
  for (const auto& z : s.circle) disc = std::max(disc, std::abs(evaluate(st.P, z)));
  CHECK(st.sup_plus == doctest::Approx(plus).epsilon(1e-12));
  CHECK(st.sup_minus == doctest::Approx(minus).epsilon(1e-12));
  CHECK(st.sup_disc == doctest::Approx(disc).epsilon(1e-12));
  CHECK(st.n == 2);
  CHECK(st.degree == 6);
  CHECK_THROWS(duval_stage(1, 1.5, 4, 100));
  CHECK_THROWS(duval_stage(1, 0.0, 4, 100));
}

TEST_CASE("duval: least-squares error falls with degree on a fixed sample set") {
  const auto s = duval_samples(0.3, 2000);
  const auto lo = duval_stage(1, 0.3, 10, s);
  const auto hi = duval_stage(1, 0.3, 30, s);
  CHECK(hi.sup_plus <= lo.sup_plus);
  CHECK(hi.rms <= lo.rms);
  double previous = std::numeric_limits<double>::infinity();
  for (int d : {2, 5, 10, 20}) {
    const auto st = duval_stage(1, 0.3, d, s);
    CHECK(st.rms <= previous * (1 + 1e-9));
    previous = st.rms;
  }
}
