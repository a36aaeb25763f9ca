#include <iostream>

#include "cli_common.hpp"

namespace cli = revhyp::cli;

int main(int argc, char** argv) {
  CLI::App app{
      "revhyp: reversible Markov semigroups, p-logSob constants, reverse "
      "hypercontractivity, mixing bounds and their downstream experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key-value config file merged under explicit flags");

  cli::GlobalOptions opts;
  app.add_option("--seed", opts.seed, "64-bit seed (omitted: drawn fresh and echoed)")
      ->configurable(true);
  app.add_option("--jobs", opts.jobs, "worker count (0: all cores)")->configurable(true);
  app.add_option("--out", opts.out, "report destination (default: stdout)");
  app.add_option("--csv-out", opts.csv, "CSV destination for sweep commands");
  app.add_flag("--expect-holds", opts.expect_holds,
               "exit 3 when an inequality verdict is 'violated'");

  cli::register_space(app, opts);
  cli::register_chains(app, opts);
  cli::register_logsob(app, opts);
  cli::register_sv(app, opts);
  cli::register_hyper(app, opts);
  cli::register_mixing(app, opts);
  cli::register_correlated(app, opts);
  cli::register_arrow(app, opts);
  cli::register_nicd(app, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    // missing/invalid option values inside a chosen subcommand are validation
    // failures (exit 2, with a machine-readable error object); unknown flags
    // and a missing subcommand are usage errors (64)
    bool ran_subcommand = !app.get_subcommands().empty();
    if (ran_subcommand &&
        (dynamic_cast<const CLI::RequiredError*>(&e) ||
         dynamic_cast<const CLI::ValidationError*>(&e) ||
         dynamic_cast<const CLI::ConversionError*>(&e))) {
      cli::json err{{"schema_version", cli::kSchemaVersion},
                    {"error", {{"type", "validation"}, {"message", e.what()}}}};
      std::cout << err.dump(2) << "\n";
      return cli::kExitValidation;
    }
    return cli::kExitUsage;
  }
  return cli::exit_code_slot();
}
