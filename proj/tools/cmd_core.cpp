#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <sstream>

#include "cli_common.hpp"
#include "revhyp/chains.hpp"
#include "revhyp/logsob.hpp"
#include "revhyp/rng.hpp"

namespace revhyp::cli {

namespace {

Generator load_generator(const std::string& path) {
  return io::generator_from_json(io::read_json_file(path));
}

RealFunction load_function(const std::string& path, SpacePtr space) {
  if (path.size() > 4 && path.substr(path.size() - 4) == ".csv")
    return io::function_from_csv(io::read_text_file(path), std::move(space));
  return io::function_from_json(io::read_json_file(path), std::move(space));
}

std::uint64_t fnv1a(const std::vector<double>& values) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (double v : values) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    for (int b = 0; b < 8; ++b) {
      hash ^= (bits >> (8 * b)) & 0xff;
      hash *= 0x100000001b3ULL;
    }
  }
  return hash;
}

json estimate_to_json(const ConstantEstimate& est) {
  json j;
  j["p"] = est.p;
  j["c_hat"] = io::json_number(est.c_hat);
  j["method"] = est.method == EstimateMethod::grid_2pt      ? "grid-2pt"
                : est.method == EstimateMethod::multistart  ? "multistart"
                                                            : "exhaustive";
  j["restarts"] = est.restarts;
  j["unbounded"] = est.unbounded;
  if (est.witness) j["witness"] = est.witness->values();
  char digest[32];
  std::snprintf(digest, sizeof(digest), "0x%016llx",
                static_cast<unsigned long long>(fnv1a(est.restart_best)));
  j["trace_digest"] = digest;
  return j;
}

ChainSpec chain_spec_from_cli(const std::string& kind_name, int n, int m, int r,
                              const std::string& weights, const std::string& graph,
                              int segments, int width, int height, double beta, double h,
                              const std::string& boundary, const std::string& rates,
                              double lambda, int trunc) {
  ChainSpec spec;
  spec.kind = chain_kind_from_string(kind_name);
  spec.n = n;
  spec.m = m;
  spec.r = r;
  if (!weights.empty()) spec.weights = parse_double_list(weights);
  spec.graph = graph;
  spec.segments = segments;
  spec.width = width;
  spec.height = height;
  spec.beta = beta;
  spec.h = h;
  if (boundary == "free")
    spec.boundary = IsingBoundary::free_bc;
  else if (boundary == "plus")
    spec.boundary = IsingBoundary::plus;
  else if (boundary == "minus")
    spec.boundary = IsingBoundary::minus;
  else
    throw CLI::ValidationError("--boundary must be free|plus|minus");
  if (rates == "metropolis")
    spec.rates = GlauberRates::metropolis;
  else if (rates == "heat-bath")
    spec.rates = GlauberRates::heat_bath;
  else
    throw CLI::ValidationError("--rates must be metropolis|heat-bath");
  spec.lambda = lambda;
  spec.trunc = trunc;
  return spec;
}

}  // namespace

void register_space(CLI::App& app, GlobalOptions& opts) {
  auto* group = app.add_subcommand("space", "finite probability spaces");
  group->require_subcommand(1);

  {
    struct Args {
      int m = 2;
      std::string weights, labels, file;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = group->add_subcommand("make", "write a space file");
    cmd->add_option("--m", args->m, "uniform space size");
    cmd->add_option("--weights", args->weights, "comma-separated weights");
    cmd->add_option("--labels", args->labels, "comma-separated labels");
    cmd->add_option("--file", args->file, "space file to write")->required();
    cmd->callback([args, &opts] {
      json params{{"m", args->m}, {"weights", args->weights}, {"file", args->file}};
      exit_code_slot() = run_command(opts, "space make", params, [&] {
        SpacePtr space;
        if (!args->weights.empty()) {
          std::vector<double> mu = parse_double_list(args->weights);
          std::vector<std::string> labels;
          if (!args->labels.empty()) {
            std::stringstream ss(args->labels);
            std::string item;
            while (std::getline(ss, item, ',')) labels.push_back(item);
          } else {
            for (std::size_t i = 0; i < mu.size(); ++i) labels.push_back(std::to_string(i));
          }
          space = make_space(std::move(labels), std::move(mu));
        } else {
          space = uniform_space(static_cast<std::size_t>(args->m));
        }
        io::write_text_file(args->file, io::space_to_json(*space).dump(2) + "\n");
        return CommandOutcome{json{{"points", space->size()}, {"file", args->file}}};
      });
    });
  }

  {
    auto file = std::make_shared<std::string>();
    auto* cmd = group->add_subcommand("validate", "validate a space file");
    cmd->add_option("--file", *file, "space file")->required();
    cmd->callback([file, &opts] {
      exit_code_slot() = run_command(opts, "space validate", json{{"file", *file}}, [&] {
        SpacePtr space = io::space_from_json(io::read_json_file(*file));
        return CommandOutcome{json{{"valid", true}, {"points", space->size()}}};
      });
    });
  }
}

void register_chains(CLI::App& app, GlobalOptions& opts) {
  auto* group = app.add_subcommand("chains", "the chain zoo");
  group->require_subcommand(1);

  struct ChainArgs {
    std::string kind;
    int n = 0, m = 2, r = 0;
    std::string weights;
    std::string graph = "doubled-line";
    int segments = 0;
    int width = 0, height = 0;
    double beta = 0.0, h = 0.0;
    std::string boundary = "free", rates = "metropolis";
    double lambda = 0.0;
    int trunc = 0;
  };
  auto add_chain_options = [](CLI::App* cmd, ChainArgs& args) {
    cmd->add_option("kind", args.kind, "chain kind")->required();
    cmd->add_option("--n", args.n, "size parameter");
    cmd->add_option("--m", args.m, "faces / factor size");
    cmd->add_option("--r", args.r, "bernoulli-laplace subset size");
    cmd->add_option("--weights", args.weights, "factor weights");
    cmd->add_option("--graph", args.graph, "spanning-tree preset");
    cmd->add_option("--segments", args.segments, "doubled-line segments");
    cmd->add_option("--width", args.width, "ising box width");
    cmd->add_option("--height", args.height, "ising box height");
    cmd->add_option("--beta", args.beta, "ising inverse temperature");
    cmd->add_option("--field", args.h, "ising external field");
    cmd->add_option("--boundary", args.boundary, "free|plus|minus");
    cmd->add_option("--rates", args.rates, "metropolis|heat-bath");
    cmd->add_option("--lambda", args.lambda, "queue arrival rate");
    cmd->add_option("--trunc", args.trunc, "queue truncation");
  };
  auto spec_of = [](const ChainArgs& a) {
    return chain_spec_from_cli(a.kind, a.n, a.m, a.r, a.weights, a.graph, a.segments,
                               a.width, a.height, a.beta, a.h, a.boundary, a.rates,
                               a.lambda, a.trunc);
  };

  {
    auto args = std::make_shared<ChainArgs>();
    auto out = std::make_shared<std::string>();
    auto* cmd = group->add_subcommand("build", "build an explicit generator");
    add_chain_options(cmd, *args);
    cmd->add_option("--out", *out, "generator file to write")->required();
    cmd->callback([args, out, spec_of, &opts] {
      ChainSpec spec = spec_of(*args);
      json params = io::chain_spec_to_json(spec);
      params["out"] = *out;
      exit_code_slot() = run_command(opts, "chains build", params, [&] {
        Generator g = build(spec);
        io::write_text_file(*out, io::generator_to_json(g).dump(2) + "\n");
        json results{{"states", g.size()},
                     {"file", *out},
                     {"spectral_gap", io::json_number(spectral_gap(g).gap)},
                     {"spec", io::chain_spec_to_json(spec)}};
        auto bounds = known_constant_bounds(spec);
        if (bounds) {
          json b{{"p", bounds->p}};
          b["lower"] = bounds->lower ? json(*bounds->lower) : json(nullptr);
          b["upper"] = bounds->upper ? json(*bounds->upper) : json(nullptr);
          if (!bounds->note.empty()) b["note"] = bounds->note;
          results["known_bounds"] = b;
        }
        return CommandOutcome{results};
      });
    });
  }

  {
    auto args = std::make_shared<ChainArgs>();
    struct SampleArgs {
      double t = 10.0;
      long jumps = -1;
      std::string observables;
    };
    auto sample = std::make_shared<SampleArgs>();
    auto* cmd = group->add_subcommand("sample", "sample a trajectory");
    add_chain_options(cmd, *args);
    cmd->add_option("--t", sample->t, "time horizon");
    cmd->add_option("--jumps", sample->jumps, "jump cap (-1: none)");
    cmd->add_option("--observables", sample->observables, "comma-separated observables");
    cmd->callback([args, sample, spec_of, &opts] {
      ChainSpec spec = spec_of(*args);
      json params = io::chain_spec_to_json(spec);
      params["t"] = sample->t;
      params["jumps"] = sample->jumps;
      params["observables"] = sample->observables;
      exit_code_slot() = run_command(opts, "chains sample", params, [&] {
        std::vector<std::string> observables;
        std::stringstream ss(sample->observables);
        std::string item;
        while (std::getline(ss, item, ','))
          if (!item.empty()) observables.push_back(item);
        TrajectorySampler sampler(spec, opts.effective_seed());
        TrajectorySummary summary = sampler.run(sample->t, sample->jumps, observables);
        json results{{"jumps", summary.jumps},
                     {"t_end", summary.t_end},
                     {"final_state", summary.final_state},
                     {"spec", io::chain_spec_to_json(spec)}};
        if (!summary.time_average.empty()) {
          json ta;
          for (const auto& [name, value] : summary.time_average)
            ta[name] = io::json_number(value);
          results["time_average"] = ta;
        }
        if (!summary.refresh_counts.empty()) results["refresh_counts"] = summary.refresh_counts;
        if (!summary.occupation.empty()) results["occupation"] = summary.occupation;
        return CommandOutcome{results};
      });
    });
  }

  {
    auto args = std::make_shared<ChainArgs>();
    auto* cmd = group->add_subcommand("bounds", "literature logSob bounds");
    add_chain_options(cmd, *args);
    cmd->callback([args, spec_of, &opts] {
      ChainSpec spec = spec_of(*args);
      exit_code_slot() =
          run_command(opts, "chains bounds", io::chain_spec_to_json(spec), [&] {
            spec.validate();
            auto bounds = known_constant_bounds(spec);
            json results;
            results["has_bound"] = bounds.has_value();
            if (bounds) {
              results["p"] = bounds->p;
              results["lower"] = bounds->lower ? json(*bounds->lower) : json(nullptr);
              results["upper"] = bounds->upper ? json(*bounds->upper) : json(nullptr);
              if (!bounds->note.empty()) results["note"] = bounds->note;
            }
            return CommandOutcome{results};
          });
    });
  }
}

void register_logsob(CLI::App& app, GlobalOptions& opts) {
  auto* group = app.add_subcommand("logsob", "p-logSob functionals and constants");
  group->require_subcommand(1);

  {
    struct Args {
      std::string gen;
      double p = 1.0;
      int restarts = 0;
      int iters = 0;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = group->add_subcommand("estimate", "estimate the optimal constant");
    cmd->add_option("--gen", args->gen, "generator file")->required();
    cmd->add_option("--p", args->p, "exponent")->required();
    cmd->add_option("--restarts", args->restarts, "multistart restarts (0: 2|Omega|)");
    cmd->add_option("--iters", args->iters, "optimizer iteration cap");
    cmd->callback([args, &opts] {
      json params{{"gen", args->gen}, {"p", args->p}, {"restarts", args->restarts}};
      exit_code_slot() = run_command(opts, "logsob estimate", params, [&] {
        Generator g = load_generator(args->gen);
        EstimateBudget budget;
        budget.restarts = args->restarts;
        budget.max_iters = args->iters;
        ConstantEstimate est = estimate_constant(g, args->p, budget, opts.effective_seed(),
                                                 opts.effective_jobs());
        return CommandOutcome{estimate_to_json(est)};
      });
    });
  }

  {
    struct Args {
      std::string gen, grid = "0,0.5,1,1.5,2";
      int restarts = 0, witnesses = 32;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = group->add_subcommand("audit-monotone", "monotonicity audit over a p-grid");
    cmd->add_option("--gen", args->gen, "generator file")->required();
    cmd->add_option("--grid", args->grid, "comma-separated p grid");
    cmd->add_option("--restarts", args->restarts, "restarts per estimate");
    cmd->add_option("--witnesses", args->witnesses, "pointwise audit witnesses");
    cmd->callback([args, &opts] {
      json params{{"gen", args->gen}, {"grid", args->grid}, {"witnesses", args->witnesses}};
      exit_code_slot() = run_command(opts, "logsob audit-monotone", params, [&] {
        Generator g = load_generator(args->gen);
        EstimateBudget budget;
        budget.restarts = args->restarts;
        MonotonicityAudit audit =
            monotonicity_audit(g, parse_double_list(args->grid), budget,
                               opts.effective_seed(), opts.effective_jobs(), args->witnesses);
        json estimates = json::array();
        for (const auto& est : audit.estimates) estimates.push_back(estimate_to_json(est));
        json results{{"estimates", estimates},
                     {"pointwise_checks", audit.pointwise_checks},
                     {"pointwise_violations", audit.pointwise_violations},
                     {"worst_excess", io::json_number(audit.worst_excess)},
                     {"pointwise_ok", audit.pointwise_ok}};
        return CommandOutcome{results, !audit.pointwise_ok};
      });
    });
  }

  {
    struct Args {
      std::string gen, fn;
      double p = 1.0;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = group->add_subcommand("evaluate", "evaluate both sides at a witness");
    cmd->add_option("--gen", args->gen, "generator file")->required();
    cmd->add_option("--fn", args->fn, "function file (JSON or CSV)")->required();
    cmd->add_option("--p", args->p, "exponent")->required();
    cmd->callback([args, &opts] {
      json params{{"gen", args->gen}, {"fn", args->fn}, {"p", args->p}};
      exit_code_slot() = run_command(opts, "logsob evaluate", params, [&] {
        Generator g = load_generator(args->gen);
        RealFunction f = load_function(args->fn, g.space());
        LogSobEvaluation ev = logsob_evaluate(g, args->p, f);
        json results{{"p", ev.p},
                     {"entropy_side", ev.entropy_side},
                     {"dirichlet_side", ev.dirichlet_side}};
        results["ratio"] = ev.ratio ? json(*ev.ratio) : json(nullptr);
        return CommandOutcome{results};
      });
    });
  }

  {
    auto gen = std::make_shared<std::string>();
    auto* cmd = group->add_subcommand("poincare", "Poincare constant via the spectral gap");
    cmd->add_option("--gen", *gen, "generator file")->required();
    cmd->callback([gen, &opts] {
      exit_code_slot() = run_command(opts, "logsob poincare", json{{"gen", *gen}}, [&] {
        Generator g = load_generator(*gen);
        SpectralGapResult gap = spectral_gap(g);
        json results{{"gap", io::json_number(gap.gap)},
                     {"reducible", gap.reducible},
                     {"poincare_constant", io::json_number(poincare_constant(g))},
                     {"zero_logsob_constant", io::json_number(2.0 * poincare_constant(g))}};
        return CommandOutcome{results};
      });
    });
  }
}

void register_sv(CLI::App& app, GlobalOptions& opts) {
  auto* group = app.add_subcommand("sv", "generalized Stroock-Varopoulos checks");
  group->require_subcommand(1);

  {
    struct Args {
      std::string gen, fn;
      double p = 2.0, q = 0.5;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = group->add_subcommand("check", "compare the two Dirichlet quantities");
    cmd->add_option("--gen", args->gen, "generator file")->required();
    cmd->add_option("--g", args->fn, "positive witness file")->required();
    cmd->add_option("--p", args->p, "larger exponent")->required();
    cmd->add_option("--q", args->q, "smaller exponent")->required();
    cmd->callback([args, &opts] {
      json params{{"gen", args->gen}, {"g", args->fn}, {"p", args->p}, {"q", args->q}};
      exit_code_slot() = run_command(opts, "sv check", params, [&] {
        Generator g = load_generator(args->gen);
        RealFunction witness = load_function(args->fn, g.space());
        SvCheck check = sv_check(g, witness, args->p, args->q);
        return CommandOutcome{
            json{{"lhs", check.lhs}, {"rhs", check.rhs}, {"holds", check.holds}},
            !check.holds};
      });
    });
  }

  {
    struct Args {
      int states = 4;
      long trials = 1000;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = group->add_subcommand("sweep", "randomized audit over generators/witnesses");
    cmd->add_option("--states", args->states, "space size");
    cmd->add_option("--trials", args->trials, "instances");
    cmd->callback([args, &opts] {
      json params{{"states", args->states}, {"trials", args->trials}};
      exit_code_slot() = run_command(opts, "sv sweep", params, [&] {
        Rng rng(opts.effective_seed());
        long violations = 0;
        double worst = 0.0;
        for (long i = 0; i < args->trials; ++i) {
          std::vector<double> mu(static_cast<std::size_t>(args->states));
          double sum = 0.0;
          for (double& w : mu) sum += (w = rng.uniform(0.2, 1.0));
          for (double& w : mu) w /= sum;
          std::vector<std::string> labels(mu.size());
          for (std::size_t k = 0; k < mu.size(); ++k) labels[k] = std::to_string(k);
          auto space = make_space(std::move(labels), std::move(mu));
          Eigen::MatrixXd L =
              Eigen::MatrixXd::Zero(args->states, args->states);
          for (int x = 0; x < args->states; ++x)
            for (int y = x + 1; y < args->states; ++y) {
              double w = rng.uniform(0.05, 0.5);
              L(x, y) -= w / space->mu(static_cast<std::size_t>(x));
              L(y, x) -= w / space->mu(static_cast<std::size_t>(y));
            }
          for (int x = 0; x < args->states; ++x) L(x, x) = -L.row(x).sum() + L(x, x);
          Generator g = validate_generator(std::move(L), space);
          std::vector<double> v(space->size());
          for (double& x : v) x = std::exp(rng.uniform(-1.5, 1.5));
          RealFunction witness(space, std::move(v));
          double q = rng.uniform(0.3, 1.95);
          double p = rng.uniform(q + 0.02, 2.0);
          SvCheck check = sv_check(g, witness, p, q);
          worst = std::min(worst, check.lhs - check.rhs);
          if (!check.holds) ++violations;
        }
        json results{{"trials", args->trials},
                     {"violations", violations},
                     {"worst_margin", worst}};
        return CommandOutcome{results, violations > 0};
      });
    });
  }
}

}  // namespace revhyp::cli
