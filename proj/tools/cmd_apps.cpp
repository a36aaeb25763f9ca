#include <cmath>
#include <memory>

#include "cli_common.hpp"
#include "revhyp/nicd.hpp"
#include "revhyp/social_choice.hpp"

namespace revhyp::cli {

namespace {

CubeFunction load_cube(const std::string& path, const std::optional<double>& bias_override) {
  io::json j = io::read_json_file(path);
  if (bias_override) j["bias"] = *bias_override;
  return io::cube_from_json(j);
}

Protocol protocol_from(const std::string& name, int m, int n, int dict_coord) {
  if (name == "plurality") return Protocol::plurality(m, n);
  if (name == "dictator") return Protocol::dictator(m, n, dict_coord);
  throw CLI::ValidationError("--protocol must be plurality|dictator");
}

}  // namespace

void register_arrow(CLI::App& app, GlobalOptions& opts) {
  auto* group = app.add_subcommand("arrow", "Boolean influence and paradox machinery");
  group->require_subcommand(1);

  {
    struct Args {
      std::string fn;
      int i = 1;  // voters count from 1; voter 1 is the least significant bit
      int degree = 0;
      std::optional<double> bias;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = group->add_subcommand("influence", "influences of a voter");
    cmd->add_option("--fn", args->fn, "cube function file")->required();
    cmd->add_option("--i", args->i, "voter index (1-based)")->required();
    cmd->add_option("--degree", args->degree, "low-degree cutoff (0: skip)");
    cmd->add_option("--bias", args->bias, "override the file's bias");
    cmd->callback([args, &opts] {
      json params{{"fn", args->fn}, {"i", args->i}, {"degree", args->degree}};
      if (args->bias) params["bias"] = *args->bias;
      exit_code_slot() = run_command(opts, "arrow influence", params, [&] {
        CubeFunction f = load_cube(args->fn, args->bias);
        if (args->i < 1 || args->i > f.n())
          throw std::invalid_argument("voter index out of range");
        int i = args->i - 1;
        json results{{"influence", influence(f, i)},
                     {"variance_influence", variance_influence(f, i)}};
        if (args->degree > 0)
          results["low_degree_influence"] = low_degree_influence(f, i, args->degree);
        return CommandOutcome{results};
      });
    });
  }

  {
    struct Args {
      std::string f1, f2, f3, law;
      long mc = 0;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = group->add_subcommand("px", "paradox probability of an IIA triple");
    cmd->add_option("--f1", args->f1, "f^{a>b} file")->required();
    cmd->add_option("--f2", args->f2, "f^{b>c} file")->required();
    cmd->add_option("--f3", args->f3, "f^{c>a} file")->required();
    cmd->add_option("--law", args->law, "ranking law file")->required();
    cmd->add_option("--mc", args->mc, "Monte Carlo trials (0: exact)");
    cmd->callback([args, &opts] {
      json params{{"f1", args->f1}, {"f2", args->f2}, {"f3", args->f3},
                  {"law", args->law}, {"mc", args->mc}};
      exit_code_slot() = run_command(opts, "arrow px", params, [&] {
        CubeFunction f1 = load_cube(args->f1, std::nullopt);
        CubeFunction f2 = load_cube(args->f2, std::nullopt);
        CubeFunction f3 = load_cube(args->f3, std::nullopt);
        RankingDistribution law = io::law_from_json(io::read_json_file(args->law));
        json results{{"alpha", law.alpha()}};
        if (args->mc > 0) {
          results["px"] = paradox_probability_mc(f1, f2, f3, law, args->mc,
                                                 opts.effective_seed(), opts.effective_jobs());
          results["exact"] = false;
        } else {
          results["px"] = paradox_probability(f1, f2, f3, law);
          results["exact"] = true;
        }
        return CommandOutcome{results};
      });
    });
  }

  {
    struct Args {
      std::string fab, fbc, law;
      int i = 1, j = 2;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = group->add_subcommand("pivotal", "exact pivotal-intersection check");
    cmd->add_option("--f1", args->fab, "f^{a>b} file")->required();
    cmd->add_option("--f2", args->fbc, "f^{b>c} file")->required();
    cmd->add_option("--law", args->law, "ranking law file")->required();
    cmd->add_option("--i", args->i, "pivotal voter for f1 (1-based)");
    cmd->add_option("--j", args->j, "pivotal voter for f2 (1-based)");
    cmd->callback([args, &opts] {
      json params{{"f1", args->fab}, {"f2", args->fbc}, {"law", args->law},
                  {"i", args->i},    {"j", args->j}};
      exit_code_slot() = run_command(opts, "arrow pivotal", params, [&] {
        CubeFunction fab = load_cube(args->fab, std::nullopt);
        CubeFunction fbc = load_cube(args->fbc, std::nullopt);
        RankingDistribution law = io::law_from_json(io::read_json_file(args->law));
        PivotalCheck check =
            pivotal_intersection_exact(fab, args->i - 1, fbc, args->j - 1, law);
        json results{{"inf_i", check.inf_i},
                     {"inf_j", check.inf_j},
                     {"eps", check.eps},
                     {"prob_intersection", check.prob_intersection},
                     {"bound", check.bound},
                     {"holds", check.holds}};
        return CommandOutcome{results, !check.holds};
      });
    });
  }

  {
    struct Args {
      double eps = 0.1, alpha = 0.25, C = 1.0;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = group->add_subcommand("delta", "delta(eps) evaluator");
    cmd->add_option("--eps", args->eps)->required();
    cmd->add_option("--alpha", args->alpha)->required();
    cmd->add_option("--C", args->C, "explicit constant")->required();
    cmd->callback([args, &opts] {
      json params{{"eps", args->eps}, {"alpha", args->alpha}, {"C", args->C}};
      exit_code_slot() = run_command(opts, "arrow delta", params, [&] {
        DeltaForEpsilon d = delta_for_epsilon(args->eps, args->alpha, args->C);
        return CommandOutcome{
            json{{"log_delta", d.log_delta}, {"delta", io::json_number(d.delta)}}};
      });
    });
  }
}

void register_nicd(CLI::App& app, GlobalOptions& opts) {
  auto* group = app.add_subcommand("nicd", "correlation distillation with m-sided dice");
  group->require_subcommand(1);

  {
    struct Args {
      int m = 2, n = 5;
      std::string ks = "2";
      double rho = 0.5;
      std::string protocol = "plurality";
      int dict_coord = 0;
      long trials = 100000;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = group->add_subcommand("simulate", "Monte Carlo agreement sweep over k");
    cmd->add_option("--m", args->m)->required();
    cmd->add_option("--n", args->n)->required();
    cmd->add_option("--k", args->ks, "player count or comma list")->required();
    cmd->add_option("--rho", args->rho)->required();
    cmd->add_option("--protocol", args->protocol, "plurality|dictator");
    cmd->add_option("--dict-coord", args->dict_coord, "dictator coordinate (0-based)");
    cmd->add_option("--trials", args->trials);
    cmd->callback([args, &opts] {
      json params{{"m", args->m},       {"n", args->n},
                  {"k", args->ks},      {"rho", args->rho},
                  {"protocol", args->protocol}, {"trials", args->trials}};
      exit_code_slot() = run_command(opts, "nicd simulate", params, [&] {
        std::vector<int> ks = parse_int_list(args->ks);
        json rows = json::array();
        io::CsvWriter csv({"k", "estimate", "ci_lo", "ci_hi", "envelope"});
        if (args->protocol == "plurality") {
          auto sweep = plurality_lower_sweep(args->m, args->rho, ks, args->n, args->trials,
                                             opts.effective_seed(), opts.effective_jobs());
          for (const auto& r : sweep) {
            csv.row({static_cast<double>(r.k), r.estimate, r.lo, r.hi, r.envelope});
            rows.push_back({{"k", r.k}, {"estimate", r.estimate}, {"ci_lo", r.lo},
                            {"ci_hi", r.hi}, {"envelope", io::json_number(r.envelope)}});
          }
        } else {
          for (std::size_t i = 0; i < ks.size(); ++i) {
            NicdConfig cfg{args->m, args->n, ks[i], args->rho, args->trials,
                           derive_seed(opts.effective_seed(), i)};
            std::vector<Protocol> protocols(
                static_cast<std::size_t>(ks[i]),
                protocol_from(args->protocol, args->m, args->n, args->dict_coord));
            AgreementResult r = agreement_probability_mc(cfg, protocols, opts.effective_jobs());
            csv.row({static_cast<double>(ks[i]), r.estimate, r.ci->lo, r.ci->hi,
                     std::numeric_limits<double>::quiet_NaN()});
            rows.push_back({{"k", ks[i]}, {"estimate", r.estimate}, {"ci_lo", r.ci->lo},
                            {"ci_hi", r.ci->hi}, {"envelope", json(nullptr)}});
          }
        }
        if (!opts.csv.empty()) io::write_text_file(opts.csv, csv.str());
        json results{{"rows", rows}};
        if (!opts.csv.empty()) results["csv"] = opts.csv;
        return CommandOutcome{results};
      });
    });
  }

  {
    struct Args {
      int m = 2, n = 3, k = 2;
      double rho = 0.5;
      std::string protocol = "plurality";
      int dict_coord = 0;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = group->add_subcommand("exact", "exact agreement probability");
    cmd->add_option("--m", args->m)->required();
    cmd->add_option("--n", args->n)->required();
    cmd->add_option("--k", args->k)->required();
    cmd->add_option("--rho", args->rho)->required();
    cmd->add_option("--protocol", args->protocol, "plurality|dictator");
    cmd->add_option("--dict-coord", args->dict_coord);
    cmd->callback([args, &opts] {
      json params{{"m", args->m}, {"n", args->n}, {"k", args->k},
                  {"rho", args->rho}, {"protocol", args->protocol}};
      exit_code_slot() = run_command(opts, "nicd exact", params, [&] {
        NicdConfig cfg{args->m, args->n, args->k, args->rho, 1, opts.effective_seed()};
        std::vector<Protocol> protocols(
            static_cast<std::size_t>(args->k),
            protocol_from(args->protocol, args->m, args->n, args->dict_coord));
        AgreementResult r = agreement_probability(cfg, protocols, opts.effective_jobs());
        json results{{"agreement", r.estimate}, {"exact", r.exact}};
        if (r.exact) results["holder_upper_bound"] = holder_upper_bound(cfg, protocols);
        return CommandOutcome{results};
      });
    });
  }

  {
    struct Args {
      int m = 2, n = 6;
      double rho = 0.25;
      std::string ks = "2,4,8,16,32,64";
      int coord = 0;
      std::string faces = "0";
    };
    auto args = std::make_shared<Args>();
    auto* cmd = group->add_subcommand("power-bound", "||T_t f||_k^k vs the k^{-beta} envelope");
    cmd->add_option("--m", args->m)->required();
    cmd->add_option("--n", args->n)->required();
    cmd->add_option("--rho", args->rho)->required();
    cmd->add_option("--ks", args->ks, "k sweep");
    cmd->add_option("--coord", args->coord, "indicator coordinate (0-based)");
    cmd->add_option("--faces", args->faces, "faces defining the indicator");
    cmd->callback([args, &opts] {
      json params{{"m", args->m}, {"n", args->n}, {"rho", args->rho},
                  {"ks", args->ks}, {"coord", args->coord}, {"faces", args->faces}};
      exit_code_slot() = run_command(opts, "nicd power-bound", params, [&] {
        std::vector<int> faces = parse_int_list(args->faces);
        std::size_t total = 1;
        for (int i = 0; i < args->n; ++i) total *= static_cast<std::size_t>(args->m);
        std::vector<std::uint8_t> indicator(total, 0);
        for (std::size_t x = 0; x < total; ++x) {
          std::size_t digit = x;
          for (int i = 0; i < args->coord; ++i) digit /= static_cast<std::size_t>(args->m);
          digit %= static_cast<std::size_t>(args->m);
          for (int face : faces)
            if (static_cast<std::size_t>(face) == digit) indicator[x] = 1;
        }
        PowerBoundCheck check =
            power_bound_check(args->m, args->n, indicator, args->rho, parse_int_list(args->ks));
        json rows = json::array();
        for (const auto& r : check.rows)
          rows.push_back({{"k", r.k}, {"lhs", r.lhs}, {"envelope", r.envelope}});
        json results{{"beta", check.beta},
                     {"calibration_c", check.calibration_c},
                     {"k_dominating", check.k_dominating},
                     {"rows", rows}};
        return CommandOutcome{results};
      });
    });
  }
}

}  // namespace revhyp::cli
