#include "egw/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace egw::cli {

namespace {

struct ConfigFlags {
  std::string file;
  std::vector<std::string> sets;
  std::optional<double> delta, alpha, q;
  std::optional<long> n_iter, burn_in;
  std::optional<std::uint64_t> seed;
  bool standardize = false;
  bool no_center = false;
};

void add_config_flags(CLI::App* app, ConfigFlags& f) {
  app->add_option("--config", f.file, "flat key=value config file")->check(CLI::ExistingFile);
  app->add_option("--set", f.sets, "override a config key (key=value); repeatable");
  app->add_option("--delta", f.delta, "G-Wishart shape");
  app->add_option("--alpha", f.alpha, "fractional likelihood power");
  app->add_option("--q", f.q, "bernoulli edge prior probability");
  app->add_option("--n-iter", f.n_iter, "MCMC iterations including burn-in");
  app->add_option("--burn-in", f.burn_in, "MCMC burn-in iterations");
  app->add_option("--seed", f.seed, "master seed");
  app->add_flag("--standardize", f.standardize, "scale data columns to unit variance");
  app->add_flag("--no-center", f.no_center, "do not center data columns");
}

RunConfig resolve_config(const ConfigFlags& f) {
  RunConfig cfg;
  if (!f.file.empty()) cfg = load_config(f.file, cfg);
  for (const auto& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw Error(Errc::invalid_argument, "--set expects key=value, got '" + s + "'");
    apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  if (f.delta) cfg.posterior.delta = *f.delta;
  if (f.alpha) cfg.posterior.alpha = *f.alpha;
  if (f.q) cfg.posterior.prior.q = *f.q;
  if (f.n_iter) cfg.mcmc.n_iter = *f.n_iter;
  if (f.burn_in) cfg.mcmc.burn_in = *f.burn_in;
  if (f.seed) cfg.mcmc.seed = *f.seed;
  if (f.standardize) cfg.standardize = true;
  if (f.no_center) cfg.center = false;
  validate(cfg.posterior);
  validate(cfg.mcmc);
  return cfg;
}

ModelId require_model(const std::string& name) {
  const auto id = parse_model_id(name);
  if (!id) throw Error(Errc::invalid_argument, "unknown model '" + name + "' (ar1, ar2, star, random)");
  return *id;
}

std::vector<NormConstMethod> parse_methods(const std::vector<std::string>& names) {
  std::vector<NormConstMethod> out;
  for (const auto& s : names) {
    if (s == "laplace") out.push_back(NormConstMethod::laplace);
    else if (s == "mc") out.push_back(NormConstMethod::monte_carlo);
    else if (s == "analytic") out.push_back(NormConstMethod::analytic);
    else throw Error(Errc::invalid_argument, "unknown method '" + s + "' (laplace, mc, analytic)");
  }
  return out;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Empirical G-Wishart graph selection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  SimulateOptions sim;
  std::string sim_model = "ar1";
  std::string sim_out;
  auto* simulate = app.add_subcommand("simulate", "draw a ground-truth model and Gaussian data");
  simulate->add_option("--model", sim_model, "ar1, ar2, star or random");
  simulate->add_option("--p", sim.p, "dimension");
  simulate->add_option("--n", sim.n, "sample size");
  simulate->add_option("--seed", sim.seed, "master seed");
  simulate->add_option("--out", sim_out, "output directory")->required();

  FitOptions fit;
  ConfigFlags fit_flags;
  std::string fit_data, fit_sigma, fit_out;
  std::optional<long> fit_n;
  auto* fitc = app.add_subcommand("fit", "run the graph sampler on data or a sample covariance");
  auto* data_opt = fitc->add_option("--data", fit_data, "n x p data CSV");
  auto* sigma_opt = fitc->add_option("--sigma", fit_sigma, "p x p sample covariance CSV (needs --n)");
  data_opt->excludes(sigma_opt);
  fitc->add_option("--n", fit_n, "sample size behind --sigma");
  fitc->add_option("--out", fit_out, "output directory")->required();
  add_config_flags(fitc, fit_flags);

  BenchOptions bench;
  std::vector<std::string> bench_methods{"analytic", "laplace"};
  std::string bench_out;
  auto* benchc = app.add_subcommand("normconst-bench", "compare normalizing-constant methods");
  benchc->add_option("--graph", bench.graph_kind, "ar1, ar2, star or random");
  benchc->add_option("--p", bench.p_list, "dimensions")->delimiter(',');
  benchc->add_option("--delta", bench.delta_list, "shape values")->delimiter(',');
  benchc->add_option("--methods", bench_methods, "laplace, mc, analytic")->delimiter(',');
  benchc->add_option("--mc-samples", bench.mc_samples, "Monte Carlo sample size");
  benchc->add_option("--cases", bench.cases, "random graph draws per cell");
  benchc->add_option("--seed", bench.seed, "master seed");
  benchc->add_option("--out", bench_out, "output directory")->required();

  ReplicateOptions rep;
  ConfigFlags rep_flags;
  std::string rep_model = "ar1";
  std::string rep_out;
  auto* repc = app.add_subcommand("replicate", "repeat simulate + fit and score structure recovery");
  repc->add_option("--model", rep_model, "ar1, ar2, star or random");
  repc->add_option("--p", rep.p, "dimension");
  repc->add_option("--n", rep.n, "sample size");
  repc->add_option("--reps", rep.reps, "replications");
  repc->add_option("--out", rep_out, "output directory")->required();
  add_config_flags(repc, rep_flags);

  std::string replay_manifest, replay_out;
  auto* replayc = app.add_subcommand("replay", "re-run a command from its manifest");
  replayc->add_option("--manifest", replay_manifest, "manifest.json")->required()->check(CLI::ExistingFile);
  replayc->add_option("--out", replay_out, "output directory")->required();

  int workers = default_workers();
  for (auto* sub : {fitc, benchc, repc, replayc})
    sub->add_option("--workers", workers, "worker threads (default: EGW_WORKERS or 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage_error;
  }

  try {
    if (workers < 1) throw Error(Errc::invalid_argument, "--workers must be at least 1");
    if (*simulate) {
      sim.model = require_model(sim_model);
      sim.out = sim_out;
      cmd_simulate(sim);
    } else if (*fitc) {
      if (fit_data.empty() == fit_sigma.empty())
        throw Error(Errc::invalid_argument, "fit needs exactly one of --data or --sigma");
      if (!fit_sigma.empty() && !fit_n) throw Error(Errc::invalid_argument, "--sigma needs --n");
      fit.data = fit_data.empty() ? fit_sigma : fit_data;
      if (!fit_sigma.empty()) fit.sigma_n = fit_n;
      fit.config = resolve_config(fit_flags);
      fit.out = fit_out;
      const auto chain = cmd_fit(fit);
      std::cout << "retained " << chain.samples.size() << " samples, acceptance rate " << chain.acceptance_rate
                << "\n";
    } else if (*benchc) {
      bench.methods = parse_methods(bench_methods);
      bench.workers = workers;
      bench.out = bench_out;
      cmd_normconst_bench(bench);
    } else if (*repc) {
      rep.model = require_model(rep_model);
      rep.config = resolve_config(rep_flags);
      if (rep_flags.seed) rep.seed = *rep_flags.seed;
      rep.workers = workers;
      rep.out = rep_out;
      const auto s = cmd_replicate(rep);
      std::cout << "mean SP " << s.mean_sp << ", SE " << s.mean_se << ", MCC " << s.mean_mcc << "\n";
    } else if (*replayc) {
      replay(replay_manifest, replay_out);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return numeric_failure;
  }
  return ok;
}

}  // namespace egw::cli
