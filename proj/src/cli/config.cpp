#include "egw/cli.hpp"
#include "egw/io.hpp"

#include <cstdlib>
#include <sstream>

namespace egw::cli {

int exit_code_for(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument:
    case Errc::invalid_pair:
    case Errc::seed_required:
    case Errc::not_decomposable:
      return usage_error;
    case Errc::io:
    case Errc::parse:
    case Errc::dimension_mismatch:
    case Errc::support_violation:
      return data_error;
    case Errc::not_pd:
    case Errc::empty_chain:
    case Errc::degenerate_draw:
      return numeric_failure;
  }
  return numeric_failure;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& value) {
  throw Error(Errc::invalid_argument, "bad value '" + value + "' for " + key);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  try {
    const double x = std::stod(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  bad(key, v);
}

long to_long(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  try {
    const long x = std::stol(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  bad(key, v);
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  try {
    if (!v.empty() && v[0] != '-') {
      const auto x = std::stoull(v, &used);
      if (used == v.size()) return x;
    }
  } catch (const std::exception&) {
  }
  bad(key, v);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad(key, v);
}

std::string init_to_string(const ChainInit& init) {
  if (std::holds_alternative<InitEmpty>(init)) return "empty";
  if (const auto* r = std::get_if<InitRandom>(&init)) return "random:" + io::format_double(r->q0);
  return "graph";
}

}  // namespace

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  auto& post = cfg.posterior;
  auto& mc = cfg.mcmc;
  if (key == "delta") post.delta = to_double(key, value);
  else if (key == "alpha") post.alpha = to_double(key, value);
  else if (key == "prior") {
    if (value == "bernoulli") post.prior.kind = PriorKind::bernoulli;
    else if (value == "exponential") post.prior.kind = PriorKind::exponential;
    else bad(key, value);
  } else if (key == "q") post.prior.q = to_double(key, value);
  else if (key == "a") post.prior.a = to_double(key, value);
  else if (key == "max_edges") {
    if (value == "none") post.prior.max_edges.reset();
    else post.prior.max_edges = std::size_t(to_long(key, value));
  } else if (key == "scoring") {
    if (value == "laplace_cancelled") post.path = ScoringPath::laplace_cancelled;
    else if (value == "laplace_ratio") post.path = ScoringPath::laplace_ratio;
    else if (value == "monte_carlo") post.path = ScoringPath::monte_carlo;
    else bad(key, value);
  } else if (key == "mc_samples") post.mc_samples = to_long(key, value);
  else if (key == "mc_seed") post.mc_seed = to_u64(key, value);
  else if (key == "mle_tol") post.mle.tol = to_double(key, value);
  else if (key == "mle_max_iter") post.mle.max_iter = int(to_long(key, value));
  else if (key == "mle_solver") {
    if (value == "auto") post.mle.solver = MleSolver::automatic;
    else if (value == "ips") post.mle.solver = MleSolver::ips;
    else if (value == "newton") post.mle.solver = MleSolver::newton;
    else bad(key, value);
  } else if (key == "newton_max_params") post.mle.newton_max_params = std::size_t(to_long(key, value));
  else if (key == "sieve_xi") {
    if (value == "none") post.mle.sieve_xi.reset();
    else post.mle.sieve_xi = to_double(key, value);
  } else if (key == "n_iter") mc.n_iter = to_long(key, value);
  else if (key == "burn_in") mc.burn_in = to_long(key, value);
  else if (key == "seed") mc.seed = to_u64(key, value);
  else if (key == "thin") mc.thin = to_long(key, value);
  else if (key == "init") {
    if (value == "empty") mc.init = InitEmpty{};
    else if (value.rfind("random:", 0) == 0) mc.init = InitRandom{to_double(key, value.substr(7))};
    else bad(key, value);
  } else if (key == "proposal") {
    if (value == "uniform") mc.proposal = ProposalKind::uniform_position;
    else if (value == "add_remove") mc.proposal = ProposalKind::add_remove;
    else if (value == "add_remove_naive") mc.proposal = ProposalKind::add_remove_naive;
    else bad(key, value);
  } else if (key == "cache") mc.use_cache = to_bool(key, value);
  else if (key == "cache_cap") mc.cache_cap = std::size_t(to_long(key, value));
  else if (key == "verify_warm_start") mc.verify_warm_start = to_bool(key, value);
  else if (key == "center") cfg.center = to_bool(key, value);
  else if (key == "standardize") cfg.standardize = to_bool(key, value);
  else if (key == "score_dump") cfg.score_dump = std::size_t(to_long(key, value));
  else throw Error(Errc::invalid_argument, "unknown config key '" + key + "'");
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::invalid_argument, "config line " + std::to_string(line_no) + " has no '='");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front())
      value = value.substr(1, value.size() - 2);
    out[key] = value;
  }
  return out;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  for (const auto& [k, v] : parse_config_text(io::read_text(path))) apply_setting(base, k, v);
  return base;
}

nlohmann::json to_json(const RunConfig& cfg) {
  const auto& post = cfg.posterior;
  const auto& mc = cfg.mcmc;
  nlohmann::json j;
  j["delta"] = post.delta;
  j["alpha"] = post.alpha;
  j["prior"] = post.prior.kind == PriorKind::bernoulli ? "bernoulli" : "exponential";
  j["q"] = post.prior.q;
  j["a"] = post.prior.a;
  j["max_edges"] = post.prior.max_edges ? nlohmann::json(*post.prior.max_edges) : nlohmann::json("none");
  j["scoring"] = std::string(to_string(post.path));
  j["mc_samples"] = post.mc_samples;
  j["mc_seed"] = post.mc_seed;
  j["mle_tol"] = post.mle.tol;
  j["mle_max_iter"] = post.mle.max_iter;
  j["mle_solver"] = post.mle.solver == MleSolver::automatic ? "auto"
                    : post.mle.solver == MleSolver::ips     ? "ips"
                                                            : "newton";
  j["newton_max_params"] = post.mle.newton_max_params;
  j["sieve_xi"] = post.mle.sieve_xi ? nlohmann::json(*post.mle.sieve_xi) : nlohmann::json("none");
  j["n_iter"] = mc.n_iter;
  j["burn_in"] = mc.burn_in;
  j["seed"] = mc.seed;
  j["thin"] = mc.thin;
  j["init"] = init_to_string(mc.init);
  if (const auto* g = std::get_if<Graph>(&mc.init)) j["init_graph"] = io::graph_to_json(*g);
  j["proposal"] = mc.proposal == ProposalKind::uniform_position ? "uniform"
                  : mc.proposal == ProposalKind::add_remove     ? "add_remove"
                                                                : "add_remove_naive";
  j["cache"] = mc.use_cache;
  j["cache_cap"] = mc.cache_cap;
  j["verify_warm_start"] = mc.verify_warm_start;
  j["center"] = cfg.center;
  j["standardize"] = cfg.standardize;
  j["score_dump"] = cfg.score_dump;
  return j;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  RunConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "init_graph") continue;
    if (key == "init" && value == "graph") {
      cfg.mcmc.init = io::graph_from_json(j.at("init_graph"));
      continue;
    }
    std::string text;
    if (value.is_string()) text = value.get<std::string>();
    else if (value.is_boolean()) text = value.get<bool>() ? "true" : "false";
    else if (value.is_number_float()) text = io::format_double(value.get<double>());
    else text = value.dump();
    apply_setting(cfg, key, text);
  }
  return cfg;
}

int default_workers() {
  if (const char* env = std::getenv("EGW_WORKERS")) {
    try {
      const int w = std::stoi(env);
      if (w >= 1) return w;
    } catch (const std::exception&) {
    }
  }
  return 1;
}

}  // namespace egw::cli
