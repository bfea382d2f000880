// snf: saddle-node normal forms from the command line. Reports go to stdout as JSON,
// diagnostics to stderr.
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "snf/cli.hpp"

namespace {

snf::json read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    return snf::parse_document(buf.str(), "<stdin>");
  }
  return snf::read_json_file(path);
}

int emit(const snf::CommandResult& r, snf::OutputStyle style) {
  for (const auto& d : r.diagnostics) std::cerr << "snf: " << d << "\n";
  std::cout << snf::render(r.report, style);
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Saddle-node normal forms: classification, Dulac normal form, germ-space diagnostics"};
  app.require_subcommand(1);

  snf::RunConfig config;
  std::string backend = "float";
  bool pretty = false;
  int degree = 0;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--order", config.order, "working truncation order (2..64)")->capture_default_str();
    cmd->add_option("--tol", config.tol_zero, "relative zero tolerance for floating predicates")->capture_default_str();
    cmd->add_option("--backend", backend, "coefficient backend")
        ->check(CLI::IsMember({"float", "exact"}))
        ->capture_default_str();
    cmd->add_flag("--pretty", pretty, "indented output");
    cmd->add_flag("--json", [&](std::int64_t) { pretty = false; }, "compact JSON output (default)");
    cmd->add_option("--degree", degree, "P_d membership degree (classify) or corpus degree (gen-corpus)");
  };

  std::string input = "-";
  auto input_cmd = [&](const char* name, const char* help) {
    CLI::App* cmd = app.add_subcommand(name, help);
    add_common(cmd);
    cmd->add_option("input", input, "JSON file, or - for stdin")->capture_default_str();
    return cmd;
  };
  CLI::App* classify = input_cmd("classify", "linear-part regime, E1 membership and tangency order");
  CLI::App* normalize = input_cmd("normalize", "full Dulac normal form with residual certification");
  CLI::App* separatrix = input_cmd("separatrix", "center-manifold separatrix and radius estimate");
  CLI::App* norms = input_cmd("norms", "factorial norms of a series or an equation");
  CLI::App* jets = input_cmd("jets", "jet ranks and freedom certificate of a family");
  CLI::App* schafke = input_cmd("schafke", "smallest N with the series in M_N");

  snf::DuvalOptions duval;
  std::string target = "both";
  CLI::App* duval_cmd = app.add_subcommand("duval-demo", "least-squares approximation on the split disc");
  duval_cmd->add_option("--eps", duval.eps, "strip width, in (0, 1)")->capture_default_str();
  duval_cmd->add_option("--degrees", duval.degrees, "polynomial degrees, one stage each")->delimiter(',');
  duval_cmd->add_option("--samples", duval.samples, "sample count")->capture_default_str();
  duval_cmd->add_option("--target", target, "fit both pieces or one")
      ->check(CLI::IsMember({"both", "minus", "plus"}))
      ->capture_default_str();
  duval_cmd->add_flag("--pretty", pretty, "indented output");

  std::string dir;
  CLI::App* batch = app.add_subcommand("batch", "classify and normalize every *.json file in a directory");
  add_common(batch);
  batch->add_option("dir", dir, "corpus directory")->required();

  int count = 100;
  CLI::App* gen = app.add_subcommand("gen-corpus", "write random polynomial E1 equations");
  add_common(gen);
  gen->add_option("dir", dir, "output directory")->required();
  gen->add_option("--count", count, "number of equations")->capture_default_str();
  gen->add_option("--seed", config.seed, "random seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? snf::kExitOk : snf::kExitUsage;
  }

  config.backend = backend == "exact" ? snf::Backend::exact : snf::Backend::floating;
  config.output = pretty ? snf::OutputStyle::pretty : snf::OutputStyle::json;
  if (degree > 0) config.degree = degree;

  if (duval_cmd->parsed()) {
    duval.target = target == "minus" ? snf::DuvalTarget::minus_only
                   : target == "plus" ? snf::DuvalTarget::plus_only
                                      : snf::DuvalTarget::both;
    return emit(snf::cmd_duval(duval), config.output);
  }
  if (batch->parsed()) return emit(snf::cmd_batch(dir, config), config.output);
  if (gen->parsed()) return emit(snf::cmd_gen_corpus(dir, count, config), config.output);

  snf::json doc;
  try {
    doc = read_input(input);
  } catch (const snf::ParseError& e) {
    std::cerr << "snf: " << e.what() << "\n";
    return snf::kExitUsage;
  }
  if (classify->parsed()) return emit(snf::cmd_classify(doc, config), config.output);
  if (normalize->parsed()) return emit(snf::cmd_normalize(doc, config), config.output);
  if (separatrix->parsed()) return emit(snf::cmd_separatrix(doc, config), config.output);
  if (norms->parsed()) return emit(snf::cmd_norms(doc, config), config.output);
  if (jets->parsed()) return emit(snf::cmd_jets(doc, config), config.output);
  if (schafke->parsed()) return emit(snf::cmd_schafke(doc, config), config.output);
  return snf::kExitUsage;
}
