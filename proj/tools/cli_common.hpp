#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "revhyp/io.hpp"

namespace revhyp::cli {

using json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1";
inline constexpr const char* kToolVersion = "0.1.0";

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  int jobs = 0;  // 0 -> all cores
  std::string out;
  std::string csv;
  bool expect_holds = false;

  std::uint64_t effective_seed() const;
  int effective_jobs() const;
};

// exit codes: 0 ok, 2 validation error, 3 violated verdict under
// --expect-holds, 64 usage error
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitViolated = 3;
inline constexpr int kExitUsage = 64;

struct CommandOutcome {
  json results;
  bool violated = false;
};

/// Runs a command body, wraps the outcome in the versioned report envelope
/// and writes it to --out (or stdout); validation failures become
/// machine-readable error reports with exit code 2.
int run_command(GlobalOptions& opts, const std::string& command, const json& params,
                const std::function<CommandOutcome()>& body);

/// Deferred exit code plumbing: CLI11 callbacks record the code here and
/// main() returns it after parsing.
int& exit_code_slot();

std::vector<double> parse_double_list(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);

void register_space(CLI::App& app, GlobalOptions& opts);
void register_chains(CLI::App& app, GlobalOptions& opts);
void register_logsob(CLI::App& app, GlobalOptions& opts);
void register_sv(CLI::App& app, GlobalOptions& opts);
void register_hyper(CLI::App& app, GlobalOptions& opts);
void register_mixing(CLI::App& app, GlobalOptions& opts);
void register_correlated(CLI::App& app, GlobalOptions& opts);
void register_arrow(CLI::App& app, GlobalOptions& opts);
void register_nicd(CLI::App& app, GlobalOptions& opts);

}  // namespace revhyp::cli
