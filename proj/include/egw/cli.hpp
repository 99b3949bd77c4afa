#pragma once

#include "egw/gwishart.hpp"
#include "egw/posterior.hpp"
#include "egw/sampler.hpp"
#include "egw/simulate.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace egw::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { ok = 0, usage_error = 2, data_error = 3, numeric_failure = 4 };

int exit_code_for(Errc code) noexcept;

/// Everything that shapes a posterior run. Serialized whole into manifests.
struct RunConfig {
  PosteriorConfig posterior;
  McmcConfig mcmc;
  bool center = true;
  bool standardize = false;
  /// Upper-triangle score dump size (most visited graphs first).
  std::size_t score_dump = 200;
};

/// Applies one key=value setting; unknown keys and bad values throw
/// invalid_argument.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);
/// Flat key=value file, '#' comments, optional quotes around values.
std::map<std::string, std::string> parse_config_text(const std::string& text);
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

nlohmann::json to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const nlohmann::json& j);

/// Worker count from EGW_WORKERS, falling back to 1.
int default_workers();

struct SimulateOptions {
  ModelId model = ModelId::ar1;
  int p = 30;
  long n = 100;
  std::uint64_t seed = 1;
  std::filesystem::path out;
};

struct FitOptions {
  /// n×p data CSV, or a p×p Σ̂ CSV when sigma_n is set.
  std::filesystem::path data;
  std::optional<long> sigma_n;
  RunConfig config;
  std::filesystem::path out;
};

struct BenchOptions {
  std::string graph_kind = "ar2";
  std::vector<int> p_list{30};
  std::vector<double> delta_list{4, 6, 8, 10, 12, 14, 16, 18, 20, 22, 24, 26, 28, 30};
  std::vector<NormConstMethod> methods{NormConstMethod::analytic, NormConstMethod::laplace};
  long mc_samples = 10000;
  std::uint64_t seed = 1;
  /// Independent random-graph draws per (p, δ) cell.
  int cases = 1;
  int workers = 1;
  std::filesystem::path out;
};

struct ReplicateOptions {
  ModelId model = ModelId::ar1;
  int p = 30;
  long n = 100;
  int reps = 10;
  std::uint64_t seed = 1;
  RunConfig config;
  int workers = 1;
  std::filesystem::path out;
};

struct ReplicateRow {
  int rep = 0;
  double sp = 0.0;
  double se = 0.0;
  double mcc = 0.0;
  double acceptance_rate = 0.0;
};

struct ReplicateSummary {
  std::vector<ReplicateRow> rows;
  double mean_sp = 0.0;
  double mean_se = 0.0;
  double mean_mcc = 0.0;
  /// Standard errors of the means; absent for a single replication.
  std::optional<double> se_sp, se_se, se_mcc;
};

struct BenchRow {
  int p = 0;
  double delta = 0.0;
  int case_id = 0;
  std::string graph_kind;
  NormConstMethod method = NormConstMethod::laplace;
  double log_value = 0.0;
  double std_error = 0.0;
  std::int64_t wall_time_ns = 0;
};

void cmd_simulate(const SimulateOptions& opts);
ChainResult cmd_fit(const FitOptions& opts);
std::vector<BenchRow> cmd_normconst_bench(const BenchOptions& opts);
ReplicateSummary cmd_replicate(const ReplicateOptions& opts);
/// Re-runs the command recorded in a manifest into out_dir.
void replay(const std::filesystem::path& manifest, const std::filesystem::path& out_dir);

/// Parses argv and dispatches; returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace egw::cli
