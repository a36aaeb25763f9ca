#include <cmath>
#include <memory>

#include "cli_common.hpp"
#include "revhyp/hypercon.hpp"
#include "revhyp/mixing.hpp"

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

Direction direction_from(const std::string& name) {
  if (name == "rev" || name == "reverse") return Direction::reverse;
  if (name == "fwd" || name == "forward") return Direction::forward;
  throw CLI::ValidationError("--dir must be rev|fwd");
}

json verdict_to_json(const InequalityVerdict& v) {
  json j;
  j["status"] = v.status == VerdictStatus::violated ? "violated" : "no-counterexample-found";
  j["deficit"] = v.deficit;
  j["restarts"] = v.restarts;
  if (v.witness) j["witness"] = v.witness->values();
  return j;
}

}  // namespace

void register_hyper(CLI::App& app, GlobalOptions& opts) {
  auto* group = app.add_subcommand("hyper", "forward/reverse hypercontractivity");
  group->require_subcommand(1);

  {
    struct Args {
      std::string gen, dir = "rev";
      double p = 0.5, q = 0.0, t = 0.0;
      int restarts = 64;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = group->add_subcommand("verify", "search for a counterexample at (p,q,t)");
    cmd->add_option("--gen", args->gen, "generator file")->required();
    cmd->add_option("--dir", args->dir, "rev|fwd");
    cmd->add_option("--p", args->p)->required();
    cmd->add_option("--q", args->q)->required();
    cmd->add_option("--t", args->t)->required();
    cmd->add_option("--restarts", args->restarts);
    cmd->callback([args, &opts] {
      json params{{"gen", args->gen}, {"dir", args->dir},       {"p", args->p},
                  {"q", args->q},     {"t", args->t},           {"restarts", args->restarts}};
      exit_code_slot() = run_command(opts, "hyper verify", params, [&] {
        Generator g = load_generator(args->gen);
        VerifyBudget budget;
        budget.restarts = args->restarts;
        InequalityVerdict v =
            verify(g, {direction_from(args->dir), args->p, args->q, args->t}, budget,
                   opts.effective_seed(), opts.effective_jobs());
        return CommandOutcome{verdict_to_json(v), v.status == VerdictStatus::violated};
      });
    });
  }

  {
    struct Args {
      std::string gen, dir = "rev";
      double p = 0.5, q = 0.0;
      int restarts = 32;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = group->add_subcommand("critical-time", "bisect the empirical critical time");
    cmd->add_option("--gen", args->gen, "generator file")->required();
    cmd->add_option("--dir", args->dir, "rev|fwd");
    cmd->add_option("--p", args->p)->required();
    cmd->add_option("--q", args->q)->required();
    cmd->add_option("--restarts", args->restarts);
    cmd->callback([args, &opts] {
      json params{{"gen", args->gen},
                  {"dir", args->dir},
                  {"p", args->p},
                  {"q", args->q},
                  {"restarts", args->restarts}};
      exit_code_slot() = run_command(opts, "hyper critical-time", params, [&] {
        Generator g = load_generator(args->gen);
        VerifyBudget budget;
        budget.restarts = args->restarts;
        CriticalTime ct = critical_time(g, direction_from(args->dir), args->p, args->q,
                                        budget, opts.effective_seed(), opts.effective_jobs());
        json results{{"t_star", ct.t_star},
                     {"bracket", {ct.lo, ct.hi}},
                     {"bracketed", ct.bracketed}};
        return CommandOutcome{results};
      });
    });
  }

  {
    struct Args {
      std::string family;
      double p = 0.5, q = 0.0;
      std::optional<double> C;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = group->add_subcommand("threshold", "evaluate a threshold formula");
    cmd->add_option("--family", args->family,
                    "borell|general|simple|simple-strong|two-function-general|two-function-simple")
        ->required();
    cmd->add_option("--p", args->p)->required();
    cmd->add_option("--q", args->q)->required();
    cmd->add_option("--C", args->C, "logSob constant for the general families");
    cmd->callback([args, &opts] {
      json params{{"family", args->family}, {"p", args->p}, {"q", args->q}};
      if (args->C) params["C"] = *args->C;
      exit_code_slot() = run_command(opts, "hyper threshold", params, [&] {
        double value = threshold(threshold_family_from_string(args->family), args->p,
                                 args->q, args->C);
        return CommandOutcome{json{{"value", value}}};
      });
    });
  }

  {
    struct Args {
      std::optional<double> q, p;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = group->add_subcommand("theta", "improved-threshold functions theta/eta/tau");
    cmd->add_option("--q", args->q, "q < 0 for theta/eta");
    cmd->add_option("--p", args->p, "p in (0,1) for tau");
    cmd->callback([args, &opts] {
      json params;
      if (args->q) params["q"] = *args->q;
      if (args->p) params["p"] = *args->p;
      exit_code_slot() = run_command(opts, "hyper theta", params, [&] {
        json results;
        if (args->q) {
          results["theta"] = theta(*args->q);
          results["eta"] = eta(*args->q);
        }
        if (args->p) results["tau"] = tau(*args->p);
        if (!args->q && !args->p) throw std::invalid_argument("give --q and/or --p");
        return CommandOutcome{results};
      });
    });
  }

  {
    struct Args {
      std::string gen, f, g;
      double p = 0.5, q = 0.5, t = 0.0;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = group->add_subcommand("two-function", "check E[f T_t g] >= ||f||_p ||g||_q");
    cmd->add_option("--gen", args->gen)->required();
    cmd->add_option("--f", args->f)->required();
    cmd->add_option("--g", args->g)->required();
    cmd->add_option("--p", args->p)->required();
    cmd->add_option("--q", args->q)->required();
    cmd->add_option("--t", args->t)->required();
    cmd->callback([args, &opts] {
      json params{{"gen", args->gen}, {"f", args->f}, {"g", args->g},
                  {"p", args->p},     {"q", args->q}, {"t", args->t}};
      exit_code_slot() = run_command(opts, "hyper two-function", params, [&] {
        Generator g = load_generator(args->gen);
        RealFunction f = load_function(args->f, g.space());
        RealFunction h = load_function(args->g, g.space());
        TwoFunctionCheck check = two_function_check(g, f, h, args->p, args->q, args->t);
        return CommandOutcome{
            json{{"lhs", check.lhs}, {"rhs", check.rhs}, {"holds", check.holds}},
            !check.holds};
      });
    });
  }

  {
    struct Args {
      std::string space, fn;
      double p = -1.0;
      int trials = 1000;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = group->add_subcommand("reverse-holder", "reverse Holder duality check");
    cmd->add_option("--space", args->space, "space file")->required();
    cmd->add_option("--fn", args->fn, "positive function file")->required();
    cmd->add_option("--p", args->p, "exponent < 1")->required();
    cmd->add_option("--trials", args->trials);
    cmd->callback([args, &opts] {
      json params{{"space", args->space}, {"fn", args->fn}, {"p", args->p},
                  {"trials", args->trials}};
      exit_code_slot() = run_command(opts, "hyper reverse-holder", params, [&] {
        SpacePtr space = io::space_from_json(io::read_json_file(args->space));
        RealFunction f = load_function(args->fn, space);
        ReverseHolderCheck check =
            reverse_holder_check(f, args->p, args->trials, opts.effective_seed());
        return CommandOutcome{json{{"norm", check.norm},
                                   {"analytic_value", check.analytic_value},
                                   {"inf_estimate", check.inf_estimate}}};
      });
    });
  }

  {
    struct Args {
      double p = 0.5, q = 0.0, t = 1.0;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = group->add_subcommand("implied-poincare",
                                      "Poincare constant implied by reverse hypercontractivity");
    cmd->add_option("--p", args->p)->required();
    cmd->add_option("--q", args->q)->required();
    cmd->add_option("--t", args->t)->required();
    cmd->callback([args, &opts] {
      json params{{"p", args->p}, {"q", args->q}, {"t", args->t}};
      exit_code_slot() = run_command(opts, "hyper implied-poincare", params, [&] {
        return CommandOutcome{
            json{{"value", implied_poincare(args->p, args->q, args->t)}}};
      });
    });
  }
}

void register_mixing(CLI::App& app, GlobalOptions& opts) {
  auto* group = app.add_subcommand("mixing", "two-set mixing bounds");
  group->require_subcommand(1);

  {
    struct Args {
      double C = 4.0, a = 1.0, b = 1.0, t = 1.0;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = group->add_subcommand("bound", "two-set lower bound");
    cmd->add_option("--C", args->C)->required();
    cmd->add_option("--a", args->a)->required();
    cmd->add_option("--b", args->b)->required();
    cmd->add_option("--t", args->t)->required();
    cmd->callback([args, &opts] {
      json params{{"C", args->C}, {"a", args->a}, {"b", args->b}, {"t", args->t}};
      exit_code_slot() = run_command(opts, "mixing bound", params, [&] {
        return CommandOutcome{json{{"value", two_set_bound(args->C, args->a, args->b, args->t)}}};
      });
    });
  }

  {
    struct Args {
      double D = 1.0, eps = 0.0, piA = 0.5, piB = 0.5, t = 1.0;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = group->add_subcommand("classical", "expander-mixing and mixing-time bounds");
    cmd->add_option("--D", args->D, "Poincare constant")->required();
    cmd->add_option("--eps", args->eps, "total-variation distance")->required();
    cmd->add_option("--piA", args->piA)->required();
    cmd->add_option("--piB", args->piB)->required();
    cmd->add_option("--t", args->t)->required();
    cmd->callback([args, &opts] {
      json params{{"D", args->D},     {"eps", args->eps}, {"piA", args->piA},
                  {"piB", args->piB}, {"t", args->t}};
      exit_code_slot() = run_command(opts, "mixing classical", params, [&] {
        ClassicalBounds b = classical_bounds(args->D, args->eps, args->piA, args->piB, args->t);
        return CommandOutcome{
            json{{"expander", b.expander}, {"mixing_time", b.mixing_time}}};
      });
    });
  }

  {
    struct Args {
      double tau = 1.0, a = 1.0, b = 1.0;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = group->add_subcommand("improved", "product-walk improved bound");
    cmd->add_option("--tau", args->tau)->required();
    cmd->add_option("--a", args->a)->required();
    cmd->add_option("--b", args->b)->required();
    cmd->callback([args, &opts] {
      json params{{"tau", args->tau}, {"a", args->a}, {"b", args->b}};
      exit_code_slot() = run_command(opts, "mixing improved", params, [&] {
        return CommandOutcome{
            json{{"value", product_improved_bound(args->tau, args->a, args->b)}}};
      });
    });
  }

  {
    struct Args {
      std::string gen, A, B;
      double t = 1.0;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = group->add_subcommand("exact", "exact joint probability E[1_A T_t 1_B]");
    cmd->add_option("--gen", args->gen)->required();
    cmd->add_option("--A", args->A, "set file")->required();
    cmd->add_option("--B", args->B, "set file")->required();
    cmd->add_option("--t", args->t)->required();
    cmd->callback([args, &opts] {
      json params{{"gen", args->gen}, {"A", args->A}, {"B", args->B}, {"t", args->t}};
      exit_code_slot() = run_command(opts, "mixing exact", params, [&] {
        Generator g = load_generator(args->gen);
        auto A = io::set_from_json(io::read_json_file(args->A), *g.space());
        auto B = io::set_from_json(io::read_json_file(args->B), *g.space());
        double value = exact_joint(g, A, B, args->t);
        return CommandOutcome{json{{"value", value},
                                   {"piA", set_measure(*g.space(), A)},
                                   {"piB", set_measure(*g.space(), B)}}};
      });
    });
  }

  {
    struct Args {
      std::optional<double> rho, alpha, kappa;
      double eps = 0.1;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = group->add_subcommand("correlated", "correlated-set lower bounds");
    cmd->add_option("--rho", args->rho, "rho-correlated coupling");
    cmd->add_option("--alpha", args->alpha, "kernel coupling min-atom");
    cmd->add_option("--kappa", args->kappa, "improved-exponent constant");
    cmd->add_option("--eps", args->eps)->required();
    cmd->callback([args, &opts] {
      json params{{"eps", args->eps}};
      if (args->rho) params["rho"] = *args->rho;
      if (args->alpha) params["alpha"] = *args->alpha;
      if (args->kappa) params["kappa"] = *args->kappa;
      exit_code_slot() = run_command(opts, "mixing correlated", params, [&] {
        json results;
        if (args->rho) {
          results["rho_bound"] = correlated_set_bound_rho(*args->rho, args->eps);
          results["exponent"] = rho_set_exponent(*args->rho);
          if (args->kappa)
            results["improved_bound"] =
                correlated_set_bound_improved(*args->rho, args->eps, *args->kappa);
        }
        if (args->alpha) {
          auto bound = correlated_set_bound_kernel(*args->alpha, args->eps);
          if (bound) {
            results["kernel_bound"] = *bound;
          } else {
            results["kernel_bound"] = json(nullptr);
            results["note"] =
                "alpha = 0 admits no bound: the kernel (0 1; 1/2 1/2) on the uniform "
                "two-point space has P{x in A, y in B} = 0 for sets of positive measure";
          }
        }
        if (!args->rho && !args->alpha)
          throw std::invalid_argument("give --rho and/or --alpha");
        return CommandOutcome{results};
      });
    });
  }

  {
    struct Args {
      std::string gen, A, B;
      double C = 4.0, t0 = 0.1, t1 = 2.0, step = 0.1;
      long mc = 0;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = group->add_subcommand("sweep", "t-sweep: bound vs exact (CSV hand-off)");
    cmd->add_option("--gen", args->gen)->required();
    cmd->add_option("--A", args->A)->required();
    cmd->add_option("--B", args->B)->required();
    cmd->add_option("--C", args->C, "logSob constant for the bound");
    cmd->add_option("--t-start", args->t0);
    cmd->add_option("--t-end", args->t1);
    cmd->add_option("--t-step", args->step);
    cmd->add_option("--mc", args->mc, "Monte Carlo trials per t (0: skip)");
    cmd->callback([args, &opts] {
      json params{{"gen", args->gen}, {"A", args->A},     {"B", args->B},
                  {"C", args->C},     {"t_start", args->t0}, {"t_end", args->t1},
                  {"t_step", args->step}, {"mc", args->mc}};
      exit_code_slot() = run_command(opts, "mixing sweep", params, [&] {
        Generator g = load_generator(args->gen);
        auto A = io::set_from_json(io::read_json_file(args->A), *g.space());
        auto B = io::set_from_json(io::read_json_file(args->B), *g.space());
        double a = set_measure_parameter(set_measure(*g.space(), A));
        double b = set_measure_parameter(set_measure(*g.space(), B));
        io::CsvWriter csv({"t", "bound", "exact", "mc_lo", "mc_hi"});
        json rows = json::array();
        long mc_violations = 0;
        Rng rng(opts.effective_seed());
        for (double t = args->t0; t <= args->t1 + 1e-12; t += args->step) {
          double bound = two_set_bound(args->C, a, b, t);
          double exact = exact_joint(g, A, B, t);
          double lo = exact, hi = exact;
          if (args->mc > 0) {
            // jump-chain simulation of (X_0, X_t) pairs
            long hits = 0;
            std::vector<bool> inB(g.size(), false);
            for (std::size_t i : B) inB[i] = true;
            Eigen::MatrixXd heat = Eigen::MatrixXd::Zero(
                static_cast<Eigen::Index>(g.size()), static_cast<Eigen::Index>(g.size()));
            for (std::size_t y = 0; y < g.size(); ++y) {
              Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.size()));
              e[static_cast<Eigen::Index>(y)] = 1.0;
              heat.col(static_cast<Eigen::Index>(y)) = g.heat_vec(t, e);
            }
            for (long trial = 0; trial < args->mc; ++trial) {
              // draw X_0 from the stationary law restricted by mu
              double u = rng.uniform01(), acc = 0.0;
              std::size_t x0 = 0;
              for (std::size_t s = 0; s < g.size(); ++s) {
                acc += g.space()->mu(s);
                if (u < acc) {
                  x0 = s;
                  break;
                }
              }
              if (std::find(A.begin(), A.end(), x0) == A.end()) continue;
              double u2 = rng.uniform01(), acc2 = 0.0;
              std::size_t xt = 0;
              for (std::size_t s = 0; s < g.size(); ++s) {
                acc2 += heat(static_cast<Eigen::Index>(x0), static_cast<Eigen::Index>(s));
                if (u2 < acc2) {
                  xt = s;
                  break;
                }
              }
              if (inB[xt]) ++hits;
            }
            WilsonInterval ci = wilson99(hits, args->mc);
            lo = ci.lo;
            hi = ci.hi;
          }
          csv.row({t, bound, exact, lo, hi});
          // a Monte Carlo row only counts as a violation when the whole
          // Wilson interval sits below the bound
          bool mc_violation = args->mc > 0 && hi < bound;
          if (mc_violation) ++mc_violations;
          rows.push_back({{"t", t}, {"bound", bound}, {"exact", exact},
                          {"mc_lo", lo}, {"mc_hi", hi},
                          {"mc_violation", mc_violation}});
        }
        if (!opts.csv.empty()) io::write_text_file(opts.csv, csv.str());
        json results{{"rows", rows}, {"mc_violations", mc_violations}};
        if (!opts.csv.empty()) results["csv"] = opts.csv;
        return CommandOutcome{results, mc_violations > 0};
      });
    });
  }
}

void register_correlated(CLI::App& app, GlobalOptions& opts) {
  auto* group = app.add_subcommand("correlated", "rho/kernel-coupled product pairs");
  group->require_subcommand(1);

  {
    struct Args {
      int m = 2, n = 4;
      std::optional<double> rho;
      std::string kernel, weights;
      long count = 10;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = group->add_subcommand("sample", "draw coupled (x,y) pairs");
    cmd->add_option("--m", args->m, "factor size");
    cmd->add_option("--n", args->n, "coordinates");
    cmd->add_option("--rho", args->rho);
    cmd->add_option("--kernel", args->kernel, "kernel file");
    cmd->add_option("--weights", args->weights, "factor weights");
    cmd->add_option("--count", args->count, "pairs to emit (capped at 10000)");
    cmd->callback([args, &opts] {
      json params{{"m", args->m}, {"n", args->n}, {"count", args->count}};
      if (args->rho) params["rho"] = *args->rho;
      if (!args->kernel.empty()) params["kernel"] = args->kernel;
      exit_code_slot() = run_command(opts, "correlated sample", params, [&] {
        CorrelatedProductInstance inst;
        inst.factor = args->weights.empty()
                          ? uniform_space(static_cast<std::size_t>(args->m))
                          : [&] {
                              auto mu = parse_double_list(args->weights);
                              std::vector<std::string> labels(mu.size());
                              for (std::size_t i = 0; i < mu.size(); ++i)
                                labels[i] = std::to_string(i);
                              return make_space(std::move(labels), std::move(mu));
                            }();
        inst.n = args->n;
        inst.rho = args->rho;
        if (!args->kernel.empty()) {
          inst.kernel = io::kernel_from_json(io::read_json_file(args->kernel));
          inst.factor = inst.kernel->space;  // x-marginal comes from the kernel file
        }
        CorrelatedSampler sampler(inst, opts.effective_seed());
        long count = std::min(args->count, 10000L);
        json pairs = json::array();
        long equal = 0, coords = 0;
        for (long i = 0; i < count; ++i) {
          auto [x, y] = sampler.next();
          for (std::size_t c = 0; c < x.size(); ++c) {
            ++coords;
            if (x[c] == y[c]) ++equal;
          }
          pairs.push_back({{"x", x}, {"y", y}});
        }
        json results{{"pairs", pairs},
                     {"coordinate_equality_rate",
                      coords > 0 ? json(static_cast<double>(equal) / coords) : json(nullptr)}};
        return CommandOutcome{results};
      });
    });
  }

  {
    struct Args {
      int m = 2, n = 3;
      std::optional<double> rho;
      std::string kernel;
    };
    auto args = std::make_shared<Args>();
    auto* cmd =
        group->add_subcommand("check", "exhaustive correlated-set bound check (small n)");
    cmd->add_option("--m", args->m);
    cmd->add_option("--n", args->n);
    cmd->add_option("--rho", args->rho);
    cmd->add_option("--kernel", args->kernel, "kernel file");
    cmd->callback([args, &opts] {
      json params{{"m", args->m}, {"n", args->n}};
      if (args->rho) params["rho"] = *args->rho;
      if (!args->kernel.empty()) params["kernel"] = args->kernel;
      exit_code_slot() = run_command(opts, "correlated check", params, [&] {
        CorrelatedProductInstance inst;
        inst.factor = uniform_space(static_cast<std::size_t>(args->m));
        inst.n = args->n;
        inst.rho = args->rho;
        if (!args->kernel.empty()) {
          inst.kernel = io::kernel_from_json(io::read_json_file(args->kernel));
          inst.factor = inst.kernel->space;
        }
        inst.validate();
        std::size_t states = 1;
        for (int i = 0; i < inst.n; ++i) states *= inst.factor->size();
        if (states > 12) throw std::invalid_argument("exhaustive check needs m^n <= 12");

        double exponent;
        if (inst.rho) {
          exponent = rho_set_exponent(*inst.rho);
        } else {
          double alpha = kernel_alpha(*inst.kernel).alpha;
          auto bound = correlated_set_bound_kernel(alpha, 0.5);
          if (!bound)
            throw std::domain_error(
                "alpha = 0: no correlated-set bound exists (paper counterexample)");
          exponent = std::log(*bound) / std::log(0.5);
        }
        // measures of x under mu^n and y under nu^n
        Eigen::VectorXd nu = inst.y_marginal();
        auto product_measure = [&](std::size_t idx, bool use_nu) {
          double w = 1.0;
          for (int i = 0; i < inst.n; ++i) {
            std::size_t digit = idx % inst.factor->size();
            idx /= inst.factor->size();
            w *= use_nu ? nu[static_cast<Eigen::Index>(digit)] : inst.factor->mu(digit);
          }
          return w;
        };
        long checks = 0, violations = 0;
        double worst = 1.0;
        for (std::size_t amask = 1; amask < (std::size_t{1} << states); ++amask)
          for (std::size_t bmask = 1; bmask < (std::size_t{1} << states); ++bmask) {
            std::vector<std::size_t> A, B;
            double muA = 0.0, nuB = 0.0;
            for (std::size_t s = 0; s < states; ++s) {
              if (amask >> s & 1) {
                A.push_back(s);
                muA += product_measure(s, false);
              }
              if (bmask >> s & 1) {
                B.push_back(s);
                nuB += product_measure(s, true);
              }
            }
            double eps = std::min(muA, nuB);
            if (eps <= 0.0) continue;
            double prob = exact_pair_probability(inst, A, B);
            double bound = std::pow(eps, exponent);
            ++checks;
            worst = std::min(worst, prob - bound);
            if (prob < bound - 1e-12) ++violations;
          }
        json results{{"checks", checks},
                     {"violations", violations},
                     {"worst_margin", worst},
                     {"exponent", exponent}};
        return CommandOutcome{results, violations > 0};
      });
    });
  }
}

}  // namespace revhyp::cli
