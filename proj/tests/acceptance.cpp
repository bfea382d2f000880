// Acceptance gate: one PASS/FAIL line per criterion; nonzero exit if any fails.
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "snf/cli.hpp"
#include "snf/corpus.hpp"
#include "snf/norms.hpp"
#include "snf/stratum.hpp"

using namespace snf;
using Q = RationalComplex;
using C = Complex;

namespace {

constexpr int kCorpusSize = 200;
constexpr int kDegree = 4;
constexpr int kOrder = 16;
constexpr int kMajorantOrder = 30;
constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("[%s] %d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  std::array<char, 512> buf{};
  std::snprintf(buf.data(), buf.size(), f, args...);
  return buf.data();
}

PlanarEquation<Q> cut(const PlanarEquation<Q>& eq, int n) { return {jet(eq.A(), n), jet(eq.B(), n)}; }

template <Coefficient K>
PlanarEquation<K> as(const PlanarEquation<Q>& eq) {
  return {convert<K>(eq.A()), convert<K>(eq.B())};
}

std::string run_binary(const std::string& args, int& status) {
  FILE* pipe = ::popen((std::string(SNF_CLI_PATH) + " " + args + " 2>/dev/null").c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed");
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
  const int st = ::pclose(pipe);
  status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return out;
}

Q rational(std::mt19937_64& rng) { return random_unit_rational(rng); }

}  // namespace

int main() {
  std::printf("corpus: %d random E1 equations, degree <= %d, seed %llu\n", kCorpusSize, kDegree,
              static_cast<unsigned long long>(kSeed));
  const auto wide = random_e1_corpus(kCorpusSize, kDegree, kMajorantOrder, kSeed);
  std::vector<PlanarEquation<Q>> corpus;
  for (const auto& eq : wide) corpus.push_back(cut(eq, kOrder));

  report(1, "separatrix correctness", [&] {
    int bad_exact = 0, bad_float = 0;
    double worst_float = 0.0, slowest = 0.0;
    for (const auto& eq : corpus) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto deq = diagonalize(eq);
      const auto s = separatrix_recurrence(deq, kOrder).s;
      if (!jet(separatrix_residual(deq.A, deq.B, s), kOrder).is_zero()) ++bad_exact;
      slowest = std::max(slowest, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());

      const auto fdeq = diagonalize(as<C>(eq));
      const auto fs = separatrix_recurrence(fdeq, kOrder).s;
      const double res = norm_factorial(jet(separatrix_residual(fdeq.A, fdeq.B, fs), kOrder));
      const double rel = res / (1.0 + norm_factorial(fdeq.A));
      worst_float = std::max(worst_float, rel);
      if (rel > 1e-9) ++bad_float;
    }
    return Outcome{bad_exact == 0 && bad_float == 0 && slowest < 1.0,
                   fmt("exact nonzero residuals %d/%d; float residual/(1+|A|) worst %.2e (limit 1e-9); slowest exact instance %.3f s",
                       bad_exact, kCorpusSize, worst_float, slowest)};
  });

  report(2, "recurrence matches oracle", [&] {
    int bad = 0;
    for (const auto& eq : corpus) {
      const auto deq = diagonalize(eq);
      if (!(separatrix_recurrence(deq, kOrder).s == separatrix_oracle(deq, kOrder).s)) ++bad;
    }
    return Outcome{bad == 0, fmt("%d/%d disagreements (exact, order %d)", bad, kCorpusSize, kOrder)};
  });

  report(3, "hand-checkable separatrix values", [&] {
    const int n = 8;
    const PlanarEquation<Q> eq(Series2<Q>::monomial(2, 0, Q(1), n) + Series2<Q>::monomial(0, 2, Q(1), n),
                               Series2<Q>::monomial(0, 1, Q(1), n));
    const auto s = separatrix_recurrence(diagonalize(eq), n).s;
    const bool ok = s[2] == Q::from_ratio(1, 2) && s[3] == Q(0) && s[4] == Q::from_ratio(1, 16);
    return Outcome{ok, "s2 = " + to_string(s[2].real()) + ", s3 = " + to_string(s[3].real()) +
                           ", s4 = " + to_string(s[4].real())};
  });

  report(4, "Dulac conjugacy identity", [&] {
    const int n = 14;  // certified at n - 2 = 12
    int bad_exact = 0, bad_norm = 0, bad_rel = 0, over_abs = 0;
    double worst_rel = 0.0, worst_abs = 0.0;
    for (const auto& eq : corpus) {
      const auto dm = dulac_map(eq, n);
      if (dm.certified_order < 12 || dm.residual_norm != 0.0) ++bad_exact;
      if (!dm.r[0].is_zero() || !dm.r[1].is_zero() || !dm.R.coeff(0, 0).is_zero() || !(dm.U.coeff(0, 0) == Q(1)))
        ++bad_norm;

      const auto fm = dulac_map(as<C>(eq), n);
      worst_rel = std::max(worst_rel, fm.relative_residual());
      worst_abs = std::max(worst_abs, fm.residual_norm);
      if (fm.relative_residual() > kResidualThreshold || fm.certified_order < 12) ++bad_rel;
      if (fm.residual_norm > kResidualThreshold) ++over_abs;
      if (std::abs(fm.r[0]) != 0.0 || std::abs(fm.r[1]) > 1e-9 || std::abs(fm.R.coeff(0, 0)) > 1e-9 ||
          std::abs(fm.U.coeff(0, 0) - 1.0) > 1e-9)
        ++bad_norm;
    }
    return Outcome{bad_exact == 0 && bad_norm == 0 && bad_rel == 0,
                   fmt("exact: %d/%d nonzero residuals at order 12; normalization violations %d; "
                       "float relative residual worst %.2e (limit 1e-8, %d over); "
                       "float absolute residual worst %.2e, above 1e-8 on %d/%d (coefficients of the compared terms reach this size)",
                       bad_exact, kCorpusSize, bad_norm, worst_rel, bad_rel, worst_abs, over_abs, kCorpusSize)};
  });

  report(5, "fixed-point exactness", [&] {
    std::mt19937_64 rng(kSeed + 5);
    int bad = 0;
    const int trials = 100;
    for (int t = 0; t < trials; ++t) {
      const int n = 4 + static_cast<int>(rng() % 9);
      Series1<Q> r(n);
      for (int j = 2; j <= n; ++j)
        if (rng() % 2) r.set(j, rational(rng));
      Series2<Q> R(n);
      for (int d = 1; d < n; ++d)
        for (int j = 0; j <= d; ++j)
          if (rng() % 2) R.set(d - j, j, rational(rng));
      const auto y = Series2<Q>::monomial(0, 1, Q(1), n);
      const PlanarEquation<Q> eq(Series2<Q>::monomial(2, 0, Q(1), n), y + embed(r, Var::x) + y * R);
      const auto dm = dulac_map(eq, n);
      if (!(dm.r == jet(r, dm.r.order())) || !(dm.R == jet(R, dm.R.order()))) ++bad;
    }
    return Outcome{bad == 0, fmt("%d/%d inputs of the form (x^2, y + r + yR) changed", bad, trials)};
  });

  report(6, "stratum consistency", [&] {
    int bad = 0, not_e1 = 0;
    for (const auto& eq : corpus) {
      const auto st = stratum_E1_test(diagonalize(eq));
      if (!st.in_E1) ++not_e1;
      if (!(st.A20 == st.a_straightened) || !st.identity_holds) ++bad;
    }
    return Outcome{bad == 0 && not_e1 == 0,
                   fmt("A20 != straightened coefficient on %d/%d; outside E1: %d", bad, kCorpusSize, not_e1)};
  });

  report(7, "norm suite", [&] {
    std::mt19937_64 rng(kSeed + 7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto draw = [&](int n) {
      Series1<C> f(n);
      const double scale = std::pow(10.0, u(rng) * 3);
      for (int j = 0; j <= n; ++j) f.set(j, scale * C(u(rng), u(rng)));
      return f;
    };
    constexpr double slack = 1e-12;
    int bad[4] = {0, 0, 0, 0};
    const int trials = 1000;
    for (int t = 0; t < trials; ++t) {
      const int n = static_cast<int>(rng() % 33);
      const auto f = draw(n), g = draw(n);
      const double nf = norm_factorial(f), ng = norm_factorial(g);
      if (norm_factorial(f + g) > (nf + ng) * (1 + slack)) ++bad[0];
      if (norm_factorial(f * g) > nf * ng * (1 + slack)) ++bad[1];
      if (norm_factorial(jet(f, static_cast<int>(rng() % (n + 1)))) > nf * (1 + slack)) ++bad[2];
      if (nf > std::numbers::e * norm_sup(f) * (1 + slack)) ++bad[3];
    }
    return Outcome{bad[0] + bad[1] + bad[2] + bad[3] == 0,
                   fmt("violations on %d series: triangle %d, submultiplicative %d, jet %d, e*sup %d", trials, bad[0],
                       bad[1], bad[2], bad[3])};
  });

  report(8, "majorant domination", [&] {
    int bad = 0;
    double tightest = 0.0;
    for (const auto& eq : wide) {
      const auto deq = diagonalize(as<C>(eq));
      const auto pair = derive_dominating_pair(deq);
      if (!pair) throw std::runtime_error("no dominating pair for a polynomial input");
      const auto s = separatrix_recurrence(deq, kMajorantOrder).s;
      const auto bar = majorant_sequence(pair->M, 1.0, kMajorantOrder).s;
      for (int p = 0; p <= kMajorantOrder; ++p) {
        const double sp = std::abs(s[p]);
        const double b = bar[static_cast<std::size_t>(p)];
        if (sp > b * (1 + 1e-9)) ++bad;
        if (b > 0) tightest = std::max(tightest, sp / b);
      }
    }
    return Outcome{bad == 0, fmt("%d coefficients above the majorant (p <= %d, M = max|coeff|, sigma = 1); largest |s_p|/sbar_p %.3g",
                                 bad, kMajorantOrder, tightest)};
  });

  report(9, "jet freedom", [&] {
    std::mt19937_64 rng(kSeed + 9);
    int disagree = 0, false_free = 0;
    const int trials = 100;
    for (int t = 0; t < trials; ++t) {
      const int n = 1 + static_cast<int>(rng() % 5);
      const int degree = static_cast<int>(rng() % 9);
      const int r = 1 + static_cast<int>(rng() % static_cast<unsigned>(std::min(n, degree + 1)));
      // family = L G: rows of G are r independent polynomials (a shifted monomial each),
      // L has an identity block, so the complete coefficient matrix has rank r.
      std::vector<Series1<Q>> basis;
      for (int i = 0; i < r; ++i) {
        Series1<Q> g(degree);
        g.set(i, Q(1));
        for (int j = r; j <= degree; ++j)
          if (rng() % 2) g.set(j, rational(rng));
        basis.push_back(std::move(g));
      }
      std::vector<Series1<Q>> family;
      for (int k = 0; k < n; ++k) {
        Series1<Q> f(degree);
        if (k < r) {
          f = basis[static_cast<std::size_t>(k)];
        } else {
          for (int i = 0; i < r; ++i) f = f + rational(rng) * basis[static_cast<std::size_t>(i)];
        }
        family.push_back(std::move(f));
      }
      std::shuffle(family.begin(), family.end(), rng);
      const auto exact = freedom_certificate(family, degree);
      std::vector<Series1<C>> fl;
      for (const auto& f : family) fl.push_back(convert<C>(f));
      const auto floating = freedom_certificate(fl, degree);
      const bool truth = r == n;
      if (exact.free != truth || floating.free != truth) ++disagree;
      if ((exact.free && !truth) || (floating.free && !truth)) ++false_free;
    }
    return Outcome{disagree == 0 && false_free == 0,
                   fmt("%d/%d disagreements with the complete-matrix rank, %d false free verdicts", disagree, trials,
                       false_free)};
  });

  report(10, "Duval demo sanity", [&] {
    const auto samples = duval_samples(0.3, 2000);
    std::string detail = "sup_plus at degrees 5/10/20/40:";
    double previous = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (int d : {5, 10, 20, 40}) {
      const auto st = duval_stage(1, 0.3, d, samples);
      detail += fmt(" %.4f", st.sup_plus);
      if (st.sup_plus > previous) ok = false;
      previous = st.sup_plus;
    }
    return Outcome{ok, detail};
  });

  report(11, "end-to-end determinism", [&] {
    const json doc = to_json(corpus.front());
    bool ok = true;
    for (Backend b : {Backend::floating, Backend::exact}) {
      RunConfig cfg;
      cfg.backend = b;
      const std::string a = render(cmd_normalize(doc, cfg).report, OutputStyle::json);
      const std::string c = render(cmd_normalize(doc, cfg).report, OutputStyle::json);
      ok = ok && a == c;
    }
    const auto path = std::filesystem::temp_directory_path() / ("snf_accept_" + std::to_string(::getpid()) + ".json");
    std::ofstream(path) << doc.dump() << "\n";
    int s1 = -1, s2 = -1;
    const std::string o1 = run_binary("normalize " + path.string(), s1);
    const std::string o2 = run_binary("normalize " + path.string(), s2);
    std::filesystem::remove(path);
    const bool cli_ok = s1 == 0 && s2 == 0 && !o1.empty() && o1 == o2;
    return Outcome{ok && cli_ok, fmt("library reports identical: %s; CLI output identical: %s (%zu bytes, exit %d)",
                                     ok ? "yes" : "no", cli_ok ? "yes" : "no", o1.size(), s1)};
  });

  std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
