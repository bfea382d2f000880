#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "snf/germ_space.hpp"
#include "snf/json_io.hpp"

namespace snf {

enum class Backend { floating, exact };
enum class OutputStyle { json, pretty };

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitOutOfClass = 2, kExitResidual = 3 };

struct RunConfig {
  int order = 16;
  double tol_zero = kDefaultTolZero;
  Backend backend = Backend::floating;
  OutputStyle output = OutputStyle::json;
  std::optional<int> degree;  // P_d membership check in classify; corpus degree
  std::uint64_t seed = 1;
};

// Throws std::invalid_argument unless 2 <= order <= 64 and tol_zero > 0.
void validate(const RunConfig& config);

const char* to_string(Backend b);

struct CommandResult {
  int exit_code = kExitOk;
  json report;
  std::vector<std::string> diagnostics;  // for stderr
};

// Floating residual threshold, relative to the size of the compared terms.
inline constexpr double kResidualThreshold = 1e-8;

CommandResult cmd_classify(const json& equation, const RunConfig& config);
CommandResult cmd_normalize(const json& equation, const RunConfig& config);
CommandResult cmd_separatrix(const json& equation, const RunConfig& config);
// Factorial norms of a series (univariate or bivariate) or of both sides of an equation.
CommandResult cmd_norms(const json& doc, const RunConfig& config);
// {"family": [series, ...], "max_p": p}
CommandResult cmd_jets(const json& doc, const RunConfig& config);
CommandResult cmd_schafke(const json& series, const RunConfig& config);

struct DuvalOptions {
  double eps = 0.3;
  std::vector<int> degrees{5, 10, 20, 40};
  int samples = 2000;
  DuvalTarget target = DuvalTarget::both;
};

CommandResult cmd_duval(const DuvalOptions& options);

// Every *.json file in `dir`, in lexicographic order of file name.
CommandResult cmd_batch(const std::filesystem::path& dir, const RunConfig& config);

// Writes `count` random polynomial E1 equations (exact rational coefficients).
CommandResult cmd_gen_corpus(const std::filesystem::path& dir, int count, const RunConfig& config);

// Compact JSON, or indented for `pretty`; always newline-terminated.
std::string render(const json& report, OutputStyle style);

}  // namespace snf
