#include "egw/cli.hpp"
#include "egw/io.hpp"
#include "egw/metrics.hpp"
#include "egw/random.hpp"
#include "plot.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace egw::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t elapsed_ns(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count();
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::io, "cannot create " + dir.string() + ": " + ec.message());
}

void write_manifest(const fs::path& dir, const std::string& command, json args, std::int64_t wall_ns) {
  json m;
  m["command"] = command;
  m["version"] = kVersion;
  m["args"] = std::move(args);
  m["wall_time_ns"] = wall_ns;
  io::write_text(dir / "manifest.json", m.dump(2) + "\n");
}

/// Runs fn(0..n-1) on up to `workers` threads. Results must be written by
/// index so the schedule never changes the output.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn fn) {
  const std::size_t w = std::min<std::size_t>(std::size_t(std::max(1, workers)), n);
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex mu;
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < w; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(mu);
            if (!first) first = std::current_exception();
          }
        }
      });
  }
  if (first) std::rethrow_exception(first);
}

// ---- fit outputs ---------------------------------------------------------

void write_chain_jsonl(const fs::path& path, const ChainResult& chain) {
  std::string out;
  for (const auto& s : chain.samples) {
    json j;
    j["iter"] = s.iter;
    j["graph_hash"] = chain.graphs.at(s.graph_hash).hash_hex();
    j["size"] = s.size;
    j["log_score"] = s.log_score;
    j["accepted"] = s.accepted;
    out += j.dump() + "\n";
  }
  io::write_text(path, out);
}

void write_degree_csvs(const fs::path& dir, const DegreePosterior& dp) {
  const auto p = dp.degree_prob.rows();
  std::ostringstream deg, rank;
  deg << "vertex,mean_degree";
  for (Eigen::Index d = 0; d < p; ++d) deg << ",d" << d;
  deg << "\n";
  rank << "vertex,mean_rank";
  for (Eigen::Index k = 0; k < dp.rank_prob.cols(); ++k) rank << ",r" << io::format_double(1.0 + 0.5 * double(k));
  rank << "\n";
  for (Eigen::Index v = 0; v < p; ++v) {
    deg << v << ',' << io::format_double(dp.mean_degree(v));
    for (Eigen::Index d = 0; d < p; ++d) deg << ',' << io::format_double(dp.degree_prob(v, d));
    deg << "\n";
    rank << v << ',' << io::format_double(dp.mean_rank(v));
    for (Eigen::Index k = 0; k < dp.rank_prob.cols(); ++k) rank << ',' << io::format_double(dp.rank_prob(v, k));
    rank << "\n";
  }
  io::write_text(dir / "degree_posterior.csv", deg.str());
  io::write_text(dir / "rank_posterior.csv", rank.str());
}

void write_score_dump(const fs::path& path, const ChainResult& chain, const SampleCov& scov, const RunConfig& cfg) {
  std::unordered_map<std::uint64_t, long> visits;
  for (const auto& s : chain.samples) ++visits[s.graph_hash];
  std::vector<std::pair<std::uint64_t, long>> order(visits.begin(), visits.end());
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (order.size() > cfg.score_dump) order.resize(cfg.score_dump);
  std::ostringstream o;
  o << "graph_hash,size,visits,log_prior,log_lik_alpha,dim_penalty,log_score\n";
  for (const auto& [h, count] : order) {
    const Graph& g = chain.graphs.at(h);
    const GraphScore sc = score_graph(g, scov, cfg.posterior);
    o << g.hash_hex() << ',' << g.edge_count() << ',' << count << ',' << io::format_double(sc.log_prior) << ','
      << io::format_double(sc.log_lik_alpha) << ',' << io::format_double(sc.dim_penalty) << ','
      << io::format_double(sc.log_score) << "\n";
  }
  io::write_text(path, o.str());
}

void warn_exponential_prior(const RunConfig& cfg) {
  const auto& prior = cfg.posterior.prior;
  if (prior.kind != PriorKind::exponential) return;
  // a > 1 + mδ for some m > 0 needs a > 1; the constant m itself is free.
  if (prior.a <= 1.0)
    std::clog << "warning: exponential prior with a = " << prior.a
              << " violates a > 1 + m*delta for every m > 0\n";
}

SampleCov load_sample_cov(const FitOptions& opts) {
  const Matrix m = io::read_matrix_csv(opts.data);
  if (opts.sigma_n) return make_sample_cov(m, *opts.sigma_n);
  return sample_cov_from_data(m, DataOptions{opts.config.center, opts.config.standardize});
}

json fit_args(const FitOptions& opts) {
  json a;
  a["data"] = fs::absolute(opts.data).lexically_normal().string();
  a["sigma_n"] = opts.sigma_n ? json(*opts.sigma_n) : json(nullptr);
  a["config"] = to_json(opts.config);
  return a;
}

ChainResult run_fit(const FitOptions& opts, const SampleCov& scov) {
  if (scov.p() < 2) throw Error(Errc::dimension_mismatch, "fit needs at least two variables");
  warn_exponential_prior(opts.config);
  const ChainResult chain = run_chain(scov, opts.config.posterior, opts.config.mcmc);
  const fs::path& dir = opts.out;
  io::write_matrix_csv(dir / "sigma_hat.csv", scov.sigma_hat);
  write_chain_jsonl(dir / "chain.jsonl", chain);
  io::write_matrix_csv(dir / "edge_freq.csv", chain.edge_freq);
  io::write_graph_json(dir / "mpm.json", median_probability_model(chain.edge_freq));
  write_score_dump(dir / "scores.csv", chain, scov, opts.config);
  if (!chain.samples.empty()) write_degree_csvs(dir, degree_posterior(chain));

  json summary;
  summary["p"] = scov.p();
  summary["n"] = scov.n;
  summary["retained"] = chain.samples.size();
  summary["distinct_graphs"] = chain.graphs.size();
  summary["acceptance_rate"] = chain.acceptance_rate;
  summary["score_evaluations"] = chain.score_evaluations;
  summary["cache_hits"] = chain.cache_hits;
  summary["mpm"] = io::graph_to_json(median_probability_model(chain.edge_freq));
  if (opts.config.mcmc.verify_warm_start) summary["warm_start_max_diff"] = chain.warm_start_max_diff;
  io::write_text(dir / "summary.json", summary.dump(2) + "\n");

  Series trace{"log score", {}, {}};
  for (const auto& s : chain.samples) {
    trace.x.push_back(double(s.iter));
    trace.y.push_back(s.log_score);
  }
  write_line_plot(dir / "trace.svg", "Chain trace", "iteration", "log score", {trace});
  return chain;
}

// ---- benchmark -----------------------------------------------------------

SimulationTruth bench_truth(const std::string& kind, int p, std::uint64_t seed, int case_id) {
  if (kind == "random") return model_random(p, derive_seed(seed, std::uint64_t(p) * 1000 + std::uint64_t(case_id)));
  const auto id = parse_model_id(kind);
  if (!id) throw Error(Errc::invalid_argument, "unknown graph kind '" + kind + "'");
  return make_model(*id, p, seed);
}

json bench_args(const BenchOptions& o) {
  json a;
  a["graph_kind"] = o.graph_kind;
  a["p"] = o.p_list;
  a["delta"] = o.delta_list;
  std::vector<std::string> m;
  for (auto x : o.methods) m.emplace_back(to_string(x));
  a["methods"] = m;
  a["mc_samples"] = o.mc_samples;
  a["seed"] = o.seed;
  a["cases"] = o.cases;
  return a;
}

void write_bench_outputs(const BenchOptions& opts, const std::vector<BenchRow>& rows) {
  std::ostringstream csv;
  csv << "p,delta,graph_kind,method,log_value,std_error,wall_time_ns,case\n";
  for (const auto& r : rows)
    csv << r.p << ',' << io::format_double(r.delta) << ',' << r.graph_kind << ',' << to_string(r.method) << ','
        << io::format_double(r.log_value) << ',' << io::format_double(r.std_error) << ',' << r.wall_time_ns << ','
        << r.case_id << "\n";
  io::write_text(opts.out / "bench.csv", csv.str());

  // Laplace error against the best available reference in each cell.
  auto find = [&](int p, double delta, int c, NormConstMethod m) -> const BenchRow* {
    for (const auto& r : rows)
      if (r.p == p && r.delta == delta && r.case_id == c && r.method == m) return &r;
    return nullptr;
  };
  std::ostringstream err;
  err << "p,delta,case,reference,log_reference,log_laplace,re,abs_diff,unreliable,reference_std_error\n";
  std::map<int, Series> re_series, logi_series;
  for (const auto& r : rows) {
    if (r.method != NormConstMethod::laplace) continue;
    const BenchRow* ref = find(r.p, r.delta, r.case_id, NormConstMethod::analytic);
    if (!ref) ref = find(r.p, r.delta, r.case_id, NormConstMethod::monte_carlo);
    if (!ref) continue;
    const auto e = rel_error_lognorm(ref->log_value, r.log_value);
    err << r.p << ',' << io::format_double(r.delta) << ',' << r.case_id << ',' << to_string(ref->method) << ','
        << io::format_double(ref->log_value) << ',' << io::format_double(r.log_value) << ','
        << io::format_double(e.re) << ',' << io::format_double(e.abs_diff) << ',' << (e.unreliable ? 1 : 0) << ','
        << io::format_double(ref->std_error) << "\n";
    if (r.case_id == 0) {
      auto& s = re_series[r.p];
      s.label = "p=" + std::to_string(r.p);
      s.x.push_back(r.delta);
      s.y.push_back(e.re);
    }
  }
  io::write_text(opts.out / "errors.csv", err.str());

  std::vector<Series> logi;
  for (auto m : opts.methods)
    for (int p : opts.p_list) {
      Series s{std::string(to_string(m)) + " p=" + std::to_string(p), {}, {}};
      for (const auto& r : rows)
        if (r.method == m && r.p == p && r.case_id == 0) {
          s.x.push_back(r.delta);
          s.y.push_back(r.log_value);
        }
      logi.push_back(std::move(s));
    }
  write_line_plot(opts.out / "logI_vs_delta.svg", "log normalizing constant", "delta", "log I", logi);
  std::vector<Series> re;
  for (auto& [p, s] : re_series) re.push_back(std::move(s));
  write_line_plot(opts.out / "re_vs_delta.svg", "Laplace relative error", "delta", "re", re);

  std::vector<Series> time;
  for (auto m : opts.methods) {
    Series s{std::string(to_string(m)), {}, {}};
    for (int p : opts.p_list) {
      double total = 0;
      int count = 0;
      for (const auto& r : rows)
        if (r.method == m && r.p == p) {
          total += double(r.wall_time_ns);
          ++count;
        }
      if (count == 0) continue;
      s.x.push_back(p);
      s.y.push_back(std::log(total / count));
    }
    time.push_back(std::move(s));
  }
  write_line_plot(opts.out / "time_vs_p.svg", "Mean wall time", "p", "log(nanoseconds)", time);
}

// ---- replicate -----------------------------------------------------------

json replicate_args(const ReplicateOptions& o) {
  json a;
  a["model"] = std::string(to_string(o.model));
  a["p"] = o.p;
  a["n"] = o.n;
  a["reps"] = o.reps;
  a["seed"] = o.seed;
  a["config"] = to_json(o.config);
  return a;
}

std::optional<double> std_error_of_mean(const std::vector<double>& v) {
  if (v.size() < 2) return std::nullopt;
  double mean = 0;
  for (double x : v) mean += x / double(v.size());
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / double(v.size() - 1) / double(v.size()));
}

std::string opt_num(const std::optional<double>& v) { return v ? io::format_double(*v) : std::string(); }

}  // namespace

void cmd_simulate(const SimulateOptions& opts) {
  const auto start = Clock::now();
  if (opts.p < 2) throw Error(Errc::invalid_argument, "simulate needs p >= 2");
  if (opts.n < 1) throw Error(Errc::invalid_argument, "simulate needs n >= 1");
  prepare_dir(opts.out);
  const SimulationTruth truth = make_model(opts.model, opts.p, derive_seed(opts.seed, 0));
  const Matrix x = sample_data(truth, opts.n, derive_seed(opts.seed, 1));
  io::write_matrix_csv(opts.out / "omega_star.csv", truth.omega_star);
  io::write_graph_json(opts.out / "graph_star.json", truth.graph_star);
  std::string header;
  for (int j = 0; j < opts.p; ++j) header += (j ? ",x" : "x") + std::to_string(j);
  io::write_text(opts.out / "data.csv", header + "\n" + io::matrix_to_csv(x));
  Matrix sigma_hat = x.transpose() * x / double(opts.n);
  sigma_hat = (0.5 * (sigma_hat + sigma_hat.transpose())).eval();
  io::write_matrix_csv(opts.out / "sigma_hat.csv", sigma_hat);
  json args;
  args["model"] = std::string(to_string(opts.model));
  args["p"] = opts.p;
  args["n"] = opts.n;
  args["seed"] = opts.seed;
  write_manifest(opts.out, "simulate", args, elapsed_ns(start));
}

ChainResult cmd_fit(const FitOptions& opts) {
  const auto start = Clock::now();
  const SampleCov scov = load_sample_cov(opts);
  prepare_dir(opts.out);
  ChainResult chain = run_fit(opts, scov);
  write_manifest(opts.out, "fit", fit_args(opts), elapsed_ns(start));
  return chain;
}

std::vector<BenchRow> cmd_normconst_bench(const BenchOptions& opts) {
  const auto start = Clock::now();
  if (opts.p_list.empty() || opts.delta_list.empty() || opts.methods.empty() || opts.cases < 1)
    throw Error(Errc::invalid_argument, "benchmark needs p values, delta values, methods and cases >= 1");
  for (double d : opts.delta_list)
    if (!(d > 2.0)) throw Error(Errc::invalid_argument, "benchmark delta values must exceed 2");
  const bool wants_analytic =
      std::find(opts.methods.begin(), opts.methods.end(), NormConstMethod::analytic) != opts.methods.end();
  if (wants_analytic && opts.graph_kind == "random")
    throw Error(Errc::not_decomposable, "analytic method needs a decomposable graph kind (ar1, ar2, star)");
  prepare_dir(opts.out);

  struct Cell {
    int p, case_id;
    std::size_t delta_index;
  };
  std::vector<Cell> cells;
  for (int p : opts.p_list)
    for (int c = 0; c < opts.cases; ++c)
      for (std::size_t d = 0; d < opts.delta_list.size(); ++d) cells.push_back({p, c, d});

  // Truths are built up front so a non-decomposable request fails before any work.
  std::map<std::pair<int, int>, SimulationTruth> truths;
  for (int p : opts.p_list)
    for (int c = 0; c < opts.cases; ++c) {
      auto t = bench_truth(opts.graph_kind, p, opts.seed, c);
      if (wants_analytic && !is_decomposable(t.graph_star).decomposable)
        throw Error(Errc::not_decomposable, "analytic method needs a decomposable graph");
      truths.emplace(std::pair{p, c}, std::move(t));
    }

  std::vector<std::vector<BenchRow>> results(cells.size());
  parallel_for(cells.size(), opts.workers, [&](std::size_t k) {
    const Cell& cell = cells[k];
    const SimulationTruth& truth = truths.at({cell.p, cell.case_id});
    const double delta = opts.delta_list[cell.delta_index];
    const GWishartParams params{delta, (delta - 2.0) * spd_inverse(truth.omega_star), truth.graph_star};
    for (auto method : opts.methods) {
      const auto t0 = Clock::now();
      NormConstEstimate est;
      switch (method) {
        case NormConstMethod::laplace:
          est = laplace_log_norm(delta - 2.0, truth.omega_star, truth.graph_star);
          break;
        case NormConstMethod::analytic:
          est = analytic_log_norm(params);
          break;
        case NormConstMethod::monte_carlo:
          est = mc_log_norm(params, opts.mc_samples, derive_seed(opts.seed, 0x4d43'0000'0000ull + k));
          break;
      }
      results[k].push_back({cell.p, delta, cell.case_id, opts.graph_kind, method, est.log_value, est.std_error,
                            elapsed_ns(t0)});
    }
  });
  std::vector<BenchRow> rows;
  for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
  write_bench_outputs(opts, rows);
  write_manifest(opts.out, "normconst-bench", bench_args(opts), elapsed_ns(start));
  return rows;
}

ReplicateSummary cmd_replicate(const ReplicateOptions& opts) {
  const auto start = Clock::now();
  if (opts.reps < 1) throw Error(Errc::invalid_argument, "replicate needs reps >= 1");
  validate(opts.config.posterior);
  validate(opts.config.mcmc);
  prepare_dir(opts.out);
  warn_exponential_prior(opts.config);

  ReplicateSummary out;
  out.rows.resize(std::size_t(opts.reps));
  parallel_for(std::size_t(opts.reps), opts.workers, [&](std::size_t r) {
    const std::uint64_t base = 3 * std::uint64_t(r);
    const SimulationTruth truth = make_model(opts.model, opts.p, derive_seed(opts.seed, base));
    const SampleCov scov = sample_mvn(truth, opts.n, derive_seed(opts.seed, base + 1));
    McmcConfig mcmc = opts.config.mcmc;
    mcmc.seed = derive_seed(opts.seed, base + 2);
    const ChainResult chain = run_chain(scov, opts.config.posterior, mcmc);
    const auto scores = sp_se_mcc(confusion(median_probability_model(chain.edge_freq), truth.graph_star));
    out.rows[r] = {int(r), scores.sp, scores.se, scores.mcc, chain.acceptance_rate};
  });

  std::vector<double> sp, se, mcc;
  for (const auto& row : out.rows) {
    sp.push_back(row.sp);
    se.push_back(row.se);
    mcc.push_back(row.mcc);
  }
  auto mean = [](const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m += x / double(v.size());
    return m;
  };
  out.mean_sp = mean(sp);
  out.mean_se = mean(se);
  out.mean_mcc = mean(mcc);
  out.se_sp = std_error_of_mean(sp);
  out.se_se = std_error_of_mean(se);
  out.se_mcc = std_error_of_mean(mcc);

  const std::string model(to_string(opts.model));
  const std::string delta = io::format_double(opts.config.posterior.delta);
  std::ostringstream csv;
  csv << "model,p,n,delta,rep,sp,se,mcc,sp_stderr,se_stderr,mcc_stderr\n";
  for (const auto& row : out.rows)
    csv << model << ',' << opts.p << ',' << opts.n << ',' << delta << ',' << row.rep << ','
        << io::format_double(row.sp) << ',' << io::format_double(row.se) << ',' << io::format_double(row.mcc)
        << ",,,\n";
  csv << model << ',' << opts.p << ',' << opts.n << ',' << delta << ",mean," << io::format_double(out.mean_sp)
      << ',' << io::format_double(out.mean_se) << ',' << io::format_double(out.mean_mcc) << ','
      << opt_num(out.se_sp) << ',' << opt_num(out.se_se) << ',' << opt_num(out.se_mcc) << "\n";
  io::write_text(opts.out / "replicate.csv", csv.str());
  write_manifest(opts.out, "replicate", replicate_args(opts), elapsed_ns(start));
  return out;
}

void replay(const fs::path& manifest, const fs::path& out_dir) {
  json m;
  try {
    m = json::parse(io::read_text(manifest));
  } catch (const json::exception& e) {
    throw Error(Errc::parse, std::string("manifest: ") + e.what());
  }
  try {
    const std::string command = m.at("command").get<std::string>();
    const json& a = m.at("args");
    if (command == "simulate") {
      SimulateOptions o;
      const auto id = parse_model_id(a.at("model").get<std::string>());
      if (!id) throw Error(Errc::parse, "manifest names an unknown model");
      o.model = *id;
      o.p = a.at("p").get<int>();
      o.n = a.at("n").get<long>();
      o.seed = a.at("seed").get<std::uint64_t>();
      o.out = out_dir;
      cmd_simulate(o);
    } else if (command == "fit") {
      FitOptions o;
      o.data = a.at("data").get<std::string>();
      if (!a.at("sigma_n").is_null()) o.sigma_n = a.at("sigma_n").get<long>();
      o.config = run_config_from_json(a.at("config"));
      o.out = out_dir;
      cmd_fit(o);
    } else if (command == "normconst-bench") {
      BenchOptions o;
      o.graph_kind = a.at("graph_kind").get<std::string>();
      o.p_list = a.at("p").get<std::vector<int>>();
      o.delta_list = a.at("delta").get<std::vector<double>>();
      o.methods.clear();
      for (const auto& name : a.at("methods")) {
        const auto s = name.get<std::string>();
        if (s == "laplace") o.methods.push_back(NormConstMethod::laplace);
        else if (s == "mc") o.methods.push_back(NormConstMethod::monte_carlo);
        else if (s == "analytic") o.methods.push_back(NormConstMethod::analytic);
        else throw Error(Errc::parse, "manifest names an unknown method");
      }
      o.mc_samples = a.at("mc_samples").get<long>();
      o.seed = a.at("seed").get<std::uint64_t>();
      o.cases = a.at("cases").get<int>();
      o.workers = default_workers();
      o.out = out_dir;
      cmd_normconst_bench(o);
    } else if (command == "replicate") {
      ReplicateOptions o;
      const auto id = parse_model_id(a.at("model").get<std::string>());
      if (!id) throw Error(Errc::parse, "manifest names an unknown model");
      o.model = *id;
      o.p = a.at("p").get<int>();
      o.n = a.at("n").get<long>();
      o.reps = a.at("reps").get<int>();
      o.seed = a.at("seed").get<std::uint64_t>();
      o.config = run_config_from_json(a.at("config"));
      o.workers = default_workers();
      o.out = out_dir;
      cmd_replicate(o);
    } else {
      throw Error(Errc::parse, "manifest names an unknown command '" + command + "'");
    }
  } catch (const json::exception& e) {
    throw Error(Errc::parse, std::string("manifest: ") + e.what());
  }
}

}  // namespace egw::cli
