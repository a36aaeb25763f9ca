#include "cli_common.hpp"

#include <chrono>
#include <iostream>
#include <random>
#include <sstream>

#include "revhyp/generator.hpp"
#include "revhyp/parallel.hpp"

namespace revhyp::cli {

std::uint64_t GlobalOptions::effective_seed() const {
  if (seed) return *seed;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

int GlobalOptions::effective_jobs() const { return jobs > 0 ? jobs : default_jobs(); }

int& exit_code_slot() {
  static int code = kExitOk;
  return code;
}

namespace {

void write_report(const GlobalOptions& opts, const json& report) {
  std::string text = report.dump(2) + "\n";
  if (opts.out.empty())
    std::cout << text;
  else
    io::write_text_file(opts.out, text);
}

}  // namespace

int run_command(GlobalOptions& opts, const std::string& command, const json& params,
                const std::function<CommandOutcome()>& body) {
  auto start = std::chrono::steady_clock::now();
  if (!opts.seed) opts.seed = opts.effective_seed();  // fresh seed, echoed below
  json report;
  report["schema_version"] = kSchemaVersion;
  report["command"] = command;
  report["params"] = params;
  report["seed"] = *opts.seed;

  auto finish = [&](int code) {
    auto elapsed = std::chrono::steady_clock::now() - start;
    report["meta"] = {
        {"tool_version", kToolVersion},
        {"runtime_ms",
         std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count()},
        {"workers", opts.effective_jobs()},
    };
    write_report(opts, report);
    return code;
  };

  try {
    CommandOutcome outcome = body();
    report["results"] = std::move(outcome.results);
    if (outcome.violated && opts.expect_holds) return finish(kExitViolated);
    return finish(kExitOk);
  } catch (const GeneratorValidationError& e) {
    json violations = json::array();
    for (const auto& v : e.report().violations)
      violations.push_back({{"axiom", v.axiom}, {"magnitude", v.magnitude}});
    report["error"] = {{"type", "generator-validation"},
                       {"message", e.what()},
                       {"violations", violations}};
    return finish(kExitValidation);
  } catch (const std::exception& e) {
    report["error"] = {{"type", "validation"}, {"message", e.what()}};
    return finish(kExitValidation);
  }
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stod(item));
  if (out.empty()) throw CLI::ValidationError("expected a comma-separated list of numbers");
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stoi(item));
  if (out.empty()) throw CLI::ValidationError("expected a comma-separated list of integers");
  return out;
}

}  // namespace revhyp::cli
