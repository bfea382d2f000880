#include <doctest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sys/wait.h>

#include "snf/cli.hpp"
#include "test_support.hpp"

using namespace snf;
using namespace snf::test;
namespace fs = std::filesystem;

namespace {

// Polynomial equation from [i, j, re] triples for A and B.
json equation(std::vector<std::array<long, 3>> a, std::vector<std::array<long, 3>> b) {
  auto side = [](const std::vector<std::array<long, 3>>& t) {
    json terms = json::array();
    for (const auto& [i, j, c] : t) terms.push_back({i, j, c, 0});
    return json{{"vars", {"x", "y"}}, {"terms", terms}};
  };
  return {{"A", side(a)}, {"B", side(b)}};
}

const json kX2Y = equation({{2, 0, 1}}, {{0, 1, 1}});
const json kX3Y = equation({{3, 0, 1}}, {{0, 1, 1}});
const json kDiag21 = equation({{1, 0, 2}}, {{0, 1, 1}});
const json kX2Y2 = equation({{2, 0, 1}, {0, 2, 1}}, {{0, 1, 1}});

RunConfig exact(int order = 16) {
  RunConfig c;
  c.backend = Backend::exact;
  c.order = order;
  return c;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("snf_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

struct Run {
  int status = -1;
  std::string out;
};

Run run_cli(const std::string& args) {
  Run r;
  const std::string cmd = std::string(SNF_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int st = ::pclose(pipe);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

}  // namespace

TEST_CASE_TEMPLATE("series JSON round trip", K, C, Q) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const auto f = random_series2<K>(rng, static_cast<int>(uniform(rng, 0, 8)));
    const json j = json::parse(to_json(f).dump());
    CHECK(series2_from_json<K>(j, 3) == f);
    const auto g = random_series1<K>(rng, static_cast<int>(uniform(rng, 0, 8)));
    CHECK(series1_from_json<K>(json::parse(to_json(g, "x").dump()), 3) == g);
  }
  const json eq = to_json(PlanarEquation<K>(mono<K>(2, 0, 1, 5), mono<K>(0, 1, 1, 5)));
  const auto back = equation_from_json<K>(eq, 9);
  CHECK(back.order() == 5);
  CHECK(back.A() == mono<K>(2, 0, 1, 5));
}

TEST_CASE("exact coefficients are written as fraction strings") {
  const auto f = Series1<Q>::monomial(2, q(-3, 4), 3);
  const json j = to_json(f, "y");
  CHECK(j["terms"][0] == json::array({2, "-3/4", "0"}));
  const json in = {{"vars", {"y"}}, {"terms", {{1, "5/7", 2}, {1, 0.5, "1/3"}}}};
  const auto g = series1_from_json<Q>(in, 4);
  CHECK(g.order() == 4);
  CHECK(g[1] == Q(mpq_class(17, 14), mpq_class(7, 3)));
}

TEST_CASE("parse errors name the location") {
  json bad = kX2Y;
  bad["B"]["terms"][0][2] = "x";
  try {
    (void)equation_from_json<Q>(bad, 8);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("B.terms[0]") != std::string::npos);
  }
  CHECK_THROWS_AS(series2_from_json<C>(json{{"vars", {"x", "y"}}, {"order", 2}, {"terms", {{3, 0, 1, 0}}}}, 8), ParseError);
  CHECK_THROWS_AS(series2_from_json<C>(json{{"vars", {"y", "x"}}, {"terms", json::array()}}, 8), ParseError);
  CHECK_THROWS_AS(equation_from_json<C>(equation({{0, 0, 1}}, {{0, 1, 1}}), 8), ParseError);
  try {
    (void)parse_document("{\"A\": [1, 2", "input");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("byte") != std::string::npos);
  }
}

TEST_CASE("config validation") {
  RunConfig c;
  CHECK_NOTHROW(validate(c));
  c.order = 1;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c.order = 65;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c.order = 16;
  c.tol_zero = 0;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  CHECK(cmd_classify(kX2Y, c).exit_code == kExitUsage);
}

TEST_CASE("classify examples") {
  for (const RunConfig& cfg : {RunConfig{}, exact()}) {
    auto r = cmd_classify(kX2Y, cfg);
    CHECK(r.exit_code == kExitOk);
    CHECK(r.report["classification"]["regime"] == "SaddleNode");
    CHECK(r.report["classification"]["in_E1"] == true);
    CHECK(r.report["classification"]["k"] == 1);

    r = cmd_classify(kX3Y, cfg);
    CHECK(r.exit_code == kExitOutOfClass);
    CHECK(r.report["classification"]["regime"] == "SaddleNode");
    CHECK(r.report["classification"]["in_E1"] == false);
    CHECK(r.report["classification"]["k"] == ">=2 unsupported");

    r = cmd_classify(kDiag21, cfg);
    CHECK(r.exit_code == kExitOk);
    CHECK(r.report["classification"]["regime"] == "PolynomialNormalizable");
  }
  auto cfg = exact();
  cfg.degree = 2;
  CHECK(cmd_classify(kX2Y2, cfg).report["classification"]["P_d"]["member"] == true);
  cfg.degree = 1;
  CHECK(cmd_classify(kX2Y2, cfg).report["classification"]["P_d"]["member"] == false);
}

TEST_CASE("normalize examples") {
  for (const RunConfig& cfg : {RunConfig{}, exact()}) {
    auto r = cmd_normalize(kX2Y, cfg);
    CHECK(r.exit_code == kExitOk);
    CHECK(r.report["dulac"]["r"]["terms"].empty());
    CHECK(r.report["dulac"]["R"]["terms"].empty());
    CHECK(r.report["diagnostics"]["certified"] == true);

    r = cmd_normalize(equation({{2, 0, 1}}, {{0, 1, 1}, {2, 0, 1}}), cfg);
    CHECK(r.exit_code == kExitOk);
    const json& rt = r.report["dulac"]["r"]["terms"];
    REQUIRE(rt.size() == 1);
    CHECK(rt[0][0] == 2);
    CHECK(r.report["dulac"]["R"]["terms"].empty());

    r = cmd_normalize(kX3Y, cfg);
    CHECK(r.exit_code == kExitOutOfClass);
    CHECK(r.report.contains("error"));
    CHECK_FALSE(r.report.contains("dulac"));
  }
  auto r = cmd_normalize(kX2Y2, exact(14));
  CHECK(r.exit_code == kExitOk);
  CHECK(r.report["dulac"]["certified_order"] == 12);
  CHECK(r.report["dulac"]["residual_norm"] == 0.0);
  for (const char* key : {"conjugacy", "conjugacy_relative", "separatrix", "c_ode", "unit_formula"})
    CHECK(r.report["diagnostics"]["residuals"].contains(key));
  CHECK(r.report["norms"].contains("D"));
}

TEST_CASE("other commands") {
  auto r = cmd_separatrix(kX2Y2, exact(8));
  CHECK(r.exit_code == kExitOk);
  CHECK(r.report["oracle_agrees"] == true);
  CHECK(r.report["separatrix"]["terms"][0] == json::array({2, "1/2", "0"}));

  const json family = {{"family",
                        {{{"vars", {"z"}}, {"terms", {{0, 1, 0}, {1, 1, 0}}}},
                         {{"vars", {"z"}}, {"terms", {{0, 1, 0}, {1, 1, 0}, {2, 1, 0}}}}}},
                       {"max_p", 3}};
  r = cmd_jets(family, exact(4));
  CHECK(r.report["free"] == true);
  CHECK(r.report["p"] == 2);
  CHECK(r.report["ranks"] == json::array({1, 1, 2, 2}));

  r = cmd_schafke({{"vars", {"z"}}, {"terms", {{0, 5, 0}, {1, 1, 0}}}}, RunConfig{});
  CHECK(r.report["constant_term_ok"] == false);
  CHECK(r.report.contains("constant_violation"));

  r = cmd_norms({{"vars", {"z"}}, {"order", 3}, {"terms", {{2, 4, 0}}}}, RunConfig{});
  CHECK(r.report["factorial"].get<double>() == doctest::Approx(2.0));

  DuvalOptions d;
  d.degrees = {2, 4};
  d.samples = 400;
  r = cmd_duval(d);
  CHECK(r.report["stages"].size() == 2);
}

TEST_CASE("batch over the classify examples") {
  TempDir dir("batch3");
  write(dir.path / "a.json", kX2Y.dump());
  write(dir.path / "b.json", kX3Y.dump());
  write(dir.path / "c.json", kDiag21.dump());
  write(dir.path / "notes.txt", "ignored");
  const auto r = cmd_batch(dir.path, exact());
  CHECK(r.exit_code == kExitOk);
  const json& s = r.report["summary"];
  CHECK(s["files"] == 3);
  CHECK(s["counts"] == json{{"SaddleNode/E1", 1}, {"unsupported", 1}, {"PolynomialNormalizable", 1}});
  CHECK(s["failures"].empty());
  CHECK(r.report["items"][0]["file"] == "a.json");
  CHECK(r.report["items"][2]["file"] == "c.json");

  write(dir.path / "d.json", "{ not json");
  const auto bad = cmd_batch(dir.path, exact());
  CHECK(bad.exit_code == kExitOk);
  CHECK(bad.report["summary"]["counts"]["error"] == 1);
  CHECK(bad.report["summary"]["failures"].size() == 1);
}

TEST_CASE("batch edge cases") {
  TempDir dir("empty");
  const auto r = cmd_batch(dir.path, RunConfig{});
  CHECK(r.exit_code == kExitOk);
  CHECK(r.report["summary"]["files"] == 0);
  CHECK(r.report["summary"]["counts"].empty());
  CHECK(r.report["items"].empty());
  CHECK(cmd_batch(dir.path / "missing", RunConfig{}).exit_code == kExitUsage);
}

TEST_CASE("generated degree-3 corpus normalizes with certified residuals") {
  TempDir dir("corpus");
  RunConfig cfg = exact();
  cfg.seed = 7;
  const auto gen = cmd_gen_corpus(dir.path, 100, cfg);
  REQUIRE(gen.exit_code == kExitOk);
  CHECK(gen.report["files"].size() == 100);
  for (const RunConfig& c : {cfg, RunConfig{}}) {
    const auto r = cmd_batch(dir.path, c);
    CHECK(r.report["summary"]["counts"] == json{{"SaddleNode/E1", 100}});
    CHECK(r.report["summary"]["failures"].empty());
    int certified = 0;
    for (const auto& item : r.report["items"]) certified += item["report"]["diagnostics"]["certified"].get<bool>();
    CHECK(certified == 100);
  }
  TempDir again("corpus2");
  cmd_gen_corpus(again.path, 100, cfg);
  for (int k : {0, 50, 99}) {
    char name[16];
    std::snprintf(name, sizeof name, "eq_%04d.json", k);
    CHECK(read_json_file((dir.path / name).string()) == read_json_file((again.path / name).string()));
  }
}

TEST_CASE("render") {
  const json j = {{"a", 1}};
  CHECK(render(j, OutputStyle::json) == "{\"a\":1}\n");
  CHECK(render(j, OutputStyle::pretty) == "{\n  \"a\": 1\n}\n");
}

TEST_CASE("binary: exit codes and determinism") {
  TempDir dir("bin");
  write(dir.path / "x2y2.json", kX2Y2.dump());
  write(dir.path / "x3y.json", kX3Y.dump());
  write(dir.path / "broken.json", "{\"A\": ");
  const std::string eq = (dir.path / "x2y2.json").string();

  const auto a = run_cli("normalize " + eq);
  const auto b = run_cli("normalize " + eq);
  CHECK(a.status == 0);
  CHECK_FALSE(a.out.empty());
  CHECK(a.out == b.out);
  const auto e1 = run_cli("normalize --backend exact --order 14 " + eq);
  const auto e2 = run_cli("normalize --backend exact --order 14 " + eq);
  CHECK(e1.status == 0);
  CHECK(e1.out == e2.out);
  CHECK(json::parse(e1.out)["dulac"]["certified_order"] == 12);

  CHECK(run_cli("classify " + (dir.path / "x3y.json").string()).status == 2);
  CHECK(run_cli("normalize " + (dir.path / "broken.json").string()).status == 1);
  CHECK(run_cli("normalize --order 99 " + eq).status == 1);
  CHECK(run_cli("frobnicate").status == 1);
  CHECK(run_cli("classify - < " + eq).status == 0);
  const auto pretty = run_cli("classify --pretty " + eq);
  CHECK(pretty.out.find("\n  ") != std::string::npos);
}
