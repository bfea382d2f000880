#include "snf/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "snf/corpus.hpp"
#include "snf/norms.hpp"
#include "snf/stratum.hpp"

namespace snf {

void validate(const RunConfig& config) {
  if (config.order < 2 || config.order > kMaxOrder)
    throw std::invalid_argument("--order must lie in [2, " + std::to_string(kMaxOrder) + "]");
  if (!(config.tol_zero > 0.0)) throw std::invalid_argument("--tol must be positive");
  if (config.degree && *config.degree < 1) throw std::invalid_argument("--degree must be positive");
}

const char* to_string(Backend b) { return b == Backend::exact ? "exact" : "float"; }

std::string render(const json& report, OutputStyle style) {
  return (style == OutputStyle::pretty ? report.dump(2) : report.dump()) + "\n";
}

namespace {

json error_block(const std::string& kind, const std::string& message, const std::string& stage = {}) {
  json e = {{"kind", kind}, {"message", message}};
  if (!stage.empty()) e["stage"] = stage;
  return {{"error", std::move(e)}};
}

CommandResult failure(int code, const std::string& kind, const std::string& message, const std::string& stage = {}) {
  return {code, error_block(kind, message, stage), {message}};
}

json optional_number(std::optional<double> v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

// An explicit "order" below the configured one lowers the working order; above it, the
// input is cut.
template <Coefficient K>
PlanarEquation<K> load_equation(const json& doc, const RunConfig& config, std::vector<std::string>& warnings) {
  PlanarEquation<K> eq = equation_from_json<K>(doc, config.order, config.tol_zero);
  if (eq.order() > config.order) return PlanarEquation<K>(jet(eq.A(), config.order), jet(eq.B(), config.order));
  if (eq.order() < config.order)
    warnings.push_back("working order lowered to the input order " + std::to_string(eq.order()));
  return eq;
}

template <Coefficient K>
json matrix_json(const Mat2<K>& m) {
  return json::array({json::array({coefficient_to_json(m.a), coefficient_to_json(m.b)}),
                      json::array({coefficient_to_json(m.c), coefficient_to_json(m.d)})});
}

struct Classification {
  json block;
  Regime regime = Regime::Unsupported;
  bool in_E1 = false;
};

template <Coefficient K>
Classification classify(const PlanarEquation<K>& eq, const RunConfig& config) {
  Classification out;
  const auto lp = linear_classify(eq, config.tol_zero);
  out.regime = lp.regime;
  json b;
  b["linear_part"] = matrix_json(lp.matrix);
  b["lambda"] = complex_to_json(lp.lambda);
  b["lambda1"] = complex_to_json(lp.lambda1);
  b["lambda2"] = complex_to_json(lp.lambda2);
  b["regime"] = to_string(lp.regime);
  b["in_E1"] = false;
  b["k"] = nullptr;
  b["A20"] = nullptr;
  if (lp.regime == Regime::SaddleNode) {
    if (eq.order() < 2) throw OrderError("classification of a saddle-node needs order >= 2");
    const auto deq = diagonalize(eq, config.tol_zero);
    const auto st = stratum_E1_test(deq, config.tol_zero);
    out.in_E1 = st.in_E1;
    b["in_E1"] = st.in_E1;
    b["A20"] = coefficient_to_json(st.A20);
    if (st.k) {
      b["k"] = *st.k;
    } else {
      b["k"] = ">=2 unsupported";
    }
    b["A20_after_straightening"] = coefficient_to_json(st.a_straightened);
    b["A20_identity"] = st.identity_holds;
  }
  if (config.degree) b["P_d"] = {{"d", *config.degree}, {"member", polynomial_family_check(eq, *config.degree, config.tol_zero)}};
  out.block = std::move(b);
  return out;
}

std::string category(const Classification& c) {
  if (c.regime == Regime::SaddleNode) return c.in_E1 ? "SaddleNode/E1" : "unsupported";
  return to_string(c.regime);
}

template <Coefficient K>
json change_json(const ChangeRecord<K>& change) {
  return std::visit(
      [](const auto& ch) -> json {
        using T = std::decay_t<decltype(ch)>;
        if constexpr (std::is_same_v<T, LinearChange<K>>) {
          return {{"kind", "linear"}, {"P", matrix_json(ch.P)}, {"time_scale", coefficient_to_json(ch.time_scale)}};
        } else if constexpr (std::is_same_v<T, Shear<K>>) {
          return {{"kind", "shear"}, {"s", to_json(ch.s, "y")}};
        } else {
          return {{"kind", "scale"}, {"alpha", coefficient_to_json(ch.alpha)}, {"C", to_json(ch.C, "y")}};
        }
      },
      change);
}

template <Coefficient K>
json radius_json(const DiagonalizedEquation<K>& deq, int n, const RunConfig& config, std::vector<std::string>& warnings) {
  const auto pair = derive_dominating_pair(deq);
  if (!pair) {
    warnings.push_back("radius bound skipped: the input reaches its truncation order, so no (M, sigma) is known");
    return nullptr;
  }
  const RadiusBound rb = radius_lower_bound(deq, n, pair, config.tol_zero);
  if (!rb.dominated) warnings.push_back("majorant does not dominate the computed separatrix");
  return {{"M", rb.pair.M}, {"sigma", rb.pair.sigma}, {"estimate", optional_number(rb.estimate)},
          {"dominated", rb.dominated}, {"order", rb.order}};
}

template <Coefficient K>
bool near(const K& v, const K& target, double tol) {
  if constexpr (coeff_traits<K>::exact) {
    return v == target;
  } else {
    return coeff_traits<K>::abs(v - target) <= tol;
  }
}

template <Coefficient K>
CommandResult classify_impl(const json& doc, const RunConfig& config) {
  std::vector<std::string> warnings;
  const auto eq = load_equation<K>(doc, config, warnings);
  const Classification c = classify(eq, config);
  CommandResult out;
  out.report = {{"backend", to_string(config.backend)}, {"order", eq.order()}, {"classification", c.block},
                {"warnings", warnings}};
  if (c.regime == Regime::Unsupported || (c.regime == Regime::SaddleNode && !c.in_E1)) {
    out.exit_code = kExitOutOfClass;
    out.diagnostics.push_back(c.regime == Regime::Unsupported ? "out of class: nilpotent linear part"
                                                              : "out of class: saddle-node with k >= 2");
  }
  return out;
}

template <Coefficient K>
CommandResult normalize_impl(const json& doc, const RunConfig& config) {
  using T = coeff_traits<K>;
  std::vector<std::string> warnings;
  const auto eq = load_equation<K>(doc, config, warnings);
  const Classification c = classify(eq, config);
  CommandResult out;
  out.report = {{"backend", to_string(config.backend)}, {"order", eq.order()}, {"classification", c.block}};
  if (!c.in_E1) {
    out.exit_code = kExitOutOfClass;
    out.report["error"] = {{"kind", "out_of_class"}, {"message", "normalization needs a saddle-node with k = 1"}};
    out.diagnostics.push_back("out of class: normalization needs a saddle-node with k = 1");
    return out;
  }
  const int n = eq.order();
  if (n < 4) return failure(kExitUsage, "usage", "normalize needs working order >= 4");

  DulacNormalForm<K> dm;
  try {
    dm = dulac_map(eq, n, config.tol_zero);
  } catch (const StageError& e) {
    out.exit_code = kExitResidual;
    out.report.update(error_block("stage", e.what(), e.stage()));
    out.diagnostics.push_back(e.what());
    return out;
  }
  for (const auto& w : dm.warnings) warnings.push_back(w);

  json changes = json::array();
  for (const auto& ch : dm.changes) changes.push_back(change_json(ch));
  const auto deq = diagonalize(eq, config.tol_zero);
  out.report["dulac"] = {{"k", dm.k},
                         {"separatrix", to_json(dm.separatrix.s, "y")},
                         {"C", to_json(dm.C, "y")},
                         {"alpha", coefficient_to_json(dm.alpha)},
                         {"r", to_json(dm.r, "x")},
                         {"R", to_json(dm.R)},
                         {"U", to_json(dm.U)},
                         {"residual_norm", dm.residual_norm},
                         {"certified_order", dm.certified_order},
                         {"changes", std::move(changes)},
                         {"radius_bound", radius_json(deq, n, config, warnings)}};
  out.report["norms"] = {{"A", norm_factorial(eq.A())},
                         {"B", norm_factorial(eq.B())},
                         {"D", norm_factorial(dm.dulac_map_value())}};

  const double low = config.tol_zero;
  const bool r_ok = near(dm.r[0], K{}, low) && (dm.r.order() < 1 || near(dm.r[1], K{}, low));
  const bool R_ok = near(dm.R.coeff(0, 0), K{}, low);
  const bool U_ok = near(dm.U.coeff(0, 0), K(1), low);
  const bool certified = T::exact ? dm.residual_norm == 0.0 : dm.relative_residual() <= kResidualThreshold;
  out.report["diagnostics"] = {
      {"residuals",
       {{"conjugacy", dm.residual_norm},
        {"conjugacy_relative", dm.relative_residual()},
        {"separatrix", dm.separatrix_residual},
        {"c_ode", dm.c_ode_residual},
        {"unit_formula", dm.u_formula_discrepancy}}},
      {"normalization", {{"r0_r1_vanish", r_ok}, {"R00_vanishes", R_ok}, {"U00_is_one", U_ok}}},
      {"certified", certified && r_ok && R_ok && U_ok},
      {"warnings", warnings}};
  if (!(certified && r_ok && R_ok && U_ok)) {
    out.exit_code = kExitResidual;
    out.diagnostics.push_back("residual certification failed");
  }
  return out;
}

template <Coefficient K>
CommandResult separatrix_impl(const json& doc, const RunConfig& config) {
  std::vector<std::string> warnings;
  const auto eq = load_equation<K>(doc, config, warnings);
  const auto lp = linear_classify(eq, config.tol_zero);
  if (lp.regime != Regime::SaddleNode)
    return failure(kExitOutOfClass, "out_of_class", "separatrix needs a saddle-node linear part");
  const auto deq = diagonalize(eq, config.tol_zero);
  const int n = deq.order();
  const auto sep = separatrix_recurrence(deq, n, config.tol_zero);
  const auto oracle = separatrix_oracle(deq, n, config.tol_zero);
  bool agree = true;
  for (int p = 0; p <= n; ++p) agree = agree && near(sep.s[p], oracle.s[p], config.tol_zero * std::max(1.0, coeff_traits<K>::abs(oracle.s[p])));
  const double residual = norm_factorial(jet(separatrix_residual(deq.A, deq.B, sep.s, config.tol_zero), n));
  CommandResult out;
  out.report = {{"backend", to_string(config.backend)},
                {"order", n},
                {"separatrix", to_json(sep.s, "y")},
                {"residual", residual},
                {"oracle_agrees", agree},
                {"radius_bound", radius_json(deq, n, config, warnings)},
                {"warnings", warnings}};
  if (!agree) out.exit_code = kExitResidual;
  return out;
}

bool is_univariate(const json& s) { return s.is_object() && s.contains("vars") && s["vars"].is_array() && s["vars"].size() == 1; }

template <Coefficient K>
CommandResult norms_impl(const json& doc, const RunConfig& config) {
  CommandResult out;
  out.report = {{"backend", to_string(config.backend)}};
  if (doc.is_object() && doc.contains("A") && doc.contains("B")) {
    std::vector<std::string> warnings;
    const auto eq = load_equation<K>(doc, config, warnings);
    out.report["A"] = {{"factorial", norm_factorial(eq.A())}, {"order", eq.order()}};
    out.report["B"] = {{"factorial", norm_factorial(eq.B())}, {"order", eq.order()}};
  } else if (is_univariate(doc)) {
    const auto f = series1_from_json<K>(doc, config.order);
    out.report["factorial"] = norm_factorial(f);
    out.report["sup"] = norm_sup(f);
    out.report["order"] = f.order();
  } else {
    const auto f = series2_from_json<K>(doc, config.order);
    out.report["factorial"] = norm_factorial(f);
    out.report["order"] = f.order();
  }
  return out;
}

template <class S>
CommandResult jets_family(const std::vector<S>& family, int max_p, const RunConfig& config) {
  int min_order = kMaxOrder;
  for (const auto& f : family) min_order = std::min(min_order, f.order());
  if (max_p > min_order) return failure(kExitUsage, "usage", "max_p exceeds the smallest order in the family");
  json ranks = json::array();
  for (int p = 0; p <= max_p; ++p) ranks.push_back(jet_rank(family, p, config.tol_zero));
  const auto cert = freedom_certificate(family, max_p, config.tol_zero);
  CommandResult out;
  out.report = {{"backend", to_string(config.backend)}, {"family_size", family.size()}, {"ranks", ranks},
                {"free", cert.free}};
  if (cert.p) {
    out.report["p"] = *cert.p;
  } else {
    out.report["p"] = "undetermined up to " + std::to_string(max_p);
  }
  return out;
}

template <Coefficient K>
CommandResult jets_impl(const json& doc, const RunConfig& config) {
  if (!doc.is_object() || !doc.contains("family") || !doc["family"].is_array() || doc["family"].empty())
    throw ParseError("jets: expected {\"family\": [series, ...], \"max_p\": p}");
  const json& fam = doc["family"];
  const bool uni = is_univariate(fam[0]);
  int default_p = kMaxOrder;
  if (uni) {
    std::vector<Series1<K>> family;
    for (std::size_t k = 0; k < fam.size(); ++k) {
      family.push_back(series1_from_json<K>(fam[k], config.order, "family[" + std::to_string(k) + "]"));
      default_p = std::min(default_p, family.back().order());
    }
    const int p = doc.contains("max_p") ? detail::json_index(doc["max_p"], "max_p") : default_p;
    return jets_family(family, p, config);
  }
  std::vector<Series2<K>> family;
  for (std::size_t k = 0; k < fam.size(); ++k) {
    family.push_back(series2_from_json<K>(fam[k], config.order, "family[" + std::to_string(k) + "]"));
    default_p = std::min(default_p, family.back().order());
  }
  const int p = doc.contains("max_p") ? detail::json_index(doc["max_p"], "max_p") : default_p;
  return jets_family(family, p, config);
}

template <Coefficient K>
CommandResult schafke_impl(const json& doc, const RunConfig& config) {
  const auto f = series1_from_json<K>(doc, config.order);
  const auto cert = schafke_min_N(f);
  CommandResult out;
  out.report = {{"backend", to_string(config.backend)}, {"minN", cert.min_n}, {"order", cert.order},
                {"constant_term_ok", cert.constant_term_ok}};
  if (!cert.constant_term_ok)
    out.report["constant_violation"] = "|a_0| > 1 = N^0: no N admits this series";
  return out;
}

template <template <class> class F>
CommandResult dispatch(const json& doc, const RunConfig& config) {
  try {
    validate(config);
    if (config.backend == Backend::exact) return F<RationalComplex>::run(doc, config);
    return F<Complex>::run(doc, config);
  } catch (const ParseError& e) {
    return failure(kExitUsage, "parse", e.what());
  } catch (const std::invalid_argument& e) {
    return failure(kExitUsage, "usage", e.what());
  } catch (const UnsupportedError& e) {
    return failure(kExitOutOfClass, "out_of_class", e.what());
  } catch (const StageError& e) {
    return failure(kExitResidual, "stage", e.what(), e.stage());
  } catch (const Error& e) {
    return failure(kExitResidual, "computation", e.what());
  }
}

#define SNF_COMMAND(name, impl)                                                     \
  template <class K>                                                                \
  struct name {                                                                     \
    static CommandResult run(const json& d, const RunConfig& c) { return impl<K>(d, c); } \
  };

SNF_COMMAND(Classify, classify_impl)
SNF_COMMAND(Normalize, normalize_impl)
SNF_COMMAND(SeparatrixCmd, separatrix_impl)
SNF_COMMAND(Norms, norms_impl)
SNF_COMMAND(Jets, jets_impl)
SNF_COMMAND(Schafke, schafke_impl)

#undef SNF_COMMAND

}  // namespace

CommandResult cmd_classify(const json& equation, const RunConfig& config) { return dispatch<Classify>(equation, config); }
CommandResult cmd_normalize(const json& equation, const RunConfig& config) { return dispatch<Normalize>(equation, config); }
CommandResult cmd_separatrix(const json& equation, const RunConfig& config) {
  return dispatch<SeparatrixCmd>(equation, config);
}
CommandResult cmd_norms(const json& doc, const RunConfig& config) { return dispatch<Norms>(doc, config); }
CommandResult cmd_jets(const json& doc, const RunConfig& config) { return dispatch<Jets>(doc, config); }
CommandResult cmd_schafke(const json& series, const RunConfig& config) { return dispatch<Schafke>(series, config); }

CommandResult cmd_duval(const DuvalOptions& options) {
  try {
    const DuvalSamples samples = duval_samples(options.eps, options.samples);
    json rows = json::array();
    int n = 0;
    for (int degree : options.degrees) {
      const DuvalStage st = duval_stage(++n, options.eps, degree, samples, options.target);
      rows.push_back({{"n", st.n},
                      {"eps", st.eps},
                      {"degree", st.degree},
                      {"sup_plus", st.sup_plus},
                      {"sup_minus", st.sup_minus},
                      {"sup_disc", st.sup_disc},
                      {"rms", st.rms},
                      {"condition", optional_number(st.condition)},
                      {"reliable", st.reliable}});
    }
    return {kExitOk, {{"samples", options.samples}, {"stages", std::move(rows)}}, {}};
  } catch (const std::invalid_argument& e) {
    return failure(kExitUsage, "usage", e.what());
  }
}

CommandResult cmd_batch(const std::filesystem::path& dir, const RunConfig& config) {
  namespace fs = std::filesystem;
  try {
    validate(config);
  } catch (const std::invalid_argument& e) {
    return failure(kExitUsage, "usage", e.what());
  }
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return failure(kExitUsage, "usage", dir.string() + ": not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir, ec))
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  if (ec) return failure(kExitUsage, "usage", dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });

  json items = json::array();
  json failures = json::array();
  std::map<std::string, int> counts;
  double max_residual = 0.0;
  for (const auto& file : files) {
    const std::string name = file.filename().string();
    json doc;
    try {
      doc = read_json_file(file.string());
    } catch (const ParseError& e) {
      failures.push_back({{"file", name}, {"error", e.what()}});
      ++counts["error"];
      continue;
    }
    CommandResult cls = cmd_classify(doc, config);
    if (cls.exit_code == kExitUsage || cls.exit_code == kExitResidual) {
      failures.push_back({{"file", name}, {"error", cls.report["error"]["message"]}});
      ++counts["error"];
      continue;
    }
    Classification c;
    c.regime = Regime::Unsupported;
    const std::string regime = cls.report["classification"]["regime"];
    for (Regime r : {Regime::Linearizable, Regime::PolynomialNormalizable, Regime::SaddleNode, Regime::Other})
      if (regime == to_string(r)) c.regime = r;
    c.in_E1 = cls.report["classification"]["in_E1"];
    const std::string cat = category(c);
    ++counts[cat];
    json item = {{"file", name}, {"category", cat}};
    if (c.in_E1) {
      CommandResult norm = cmd_normalize(doc, config);
      item["exit_code"] = norm.exit_code;
      if (norm.report.contains("diagnostics")) {
        const double res = config.backend == Backend::exact
                               ? norm.report["diagnostics"]["residuals"]["conjugacy"].get<double>()
                               : norm.report["diagnostics"]["residuals"]["conjugacy_relative"].get<double>();
        max_residual = std::max(max_residual, res);
      }
      if (norm.exit_code != kExitOk) {
        const json& err = norm.report.contains("error") ? norm.report["error"]["message"] : json("residual certification failed");
        failures.push_back({{"file", name}, {"error", err}});
      }
      item["report"] = std::move(norm.report);
    } else {
      item["exit_code"] = cls.exit_code;
      item["report"] = std::move(cls.report);
    }
    items.push_back(std::move(item));
  }
  json summary = {{"files", files.size()}, {"counts", counts}, {"max_residual", max_residual},
                  {"failures", failures}};
  return {kExitOk, {{"summary", std::move(summary)}, {"items", std::move(items)}}, {}};
}

CommandResult cmd_gen_corpus(const std::filesystem::path& dir, int count, const RunConfig& config) {
  namespace fs = std::filesystem;
  if (count < 0) return failure(kExitUsage, "usage", "--count must be nonnegative");
  const int degree = config.degree.value_or(3);
  if (degree < 2 || degree > kMaxOrder) return failure(kExitUsage, "usage", "--degree must lie in [2, 64]");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) return failure(kExitUsage, "usage", dir.string() + ": " + ec.message());
  const auto corpus = random_e1_corpus(count, degree, degree, config.seed);
  json names = json::array();
  for (int k = 0; k < count; ++k) {
    std::ostringstream name;
    name << "eq_" << std::setw(4) << std::setfill('0') << k << ".json";
    json doc = to_json(corpus[static_cast<std::size_t>(k)]);
    // Polynomials: no truncation order, so readers use their own working order.
    doc["A"].erase("order");
    doc["B"].erase("order");
    std::ofstream out(dir / name.str());
    if (!out) return failure(kExitUsage, "usage", (dir / name.str()).string() + ": cannot write");
    out << doc.dump() << "\n";
    names.push_back(name.str());
  }
  return {kExitOk, {{"count", count}, {"degree", degree}, {"seed", config.seed}, {"files", std::move(names)}}, {}};
}

}  // namespace snf
