#include <doctest.h>

#include "egw/cli.hpp"
#include "egw/io.hpp"

#include <filesystem>

using namespace egw;
using namespace egw::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "egw_test_cli_recovery" / name;
  fs::remove_all(dir);
  fs::create_directories(dir.parent_path());
  return dir;
}

}  // namespace

TEST_CASE("fit recovers the Model 1 path at p=10") {
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto sim = scratch("recover_sim");
    cmd_simulate(SimulateOptions{ModelId::ar1, 10, 100, seed, sim});
    RunConfig cfg;
    cfg.mcmc.seed = seed;
    const auto out = scratch("recover_fit");
    cmd_fit(FitOptions{sim / "data.csv", std::nullopt, cfg, out});
    if (io::read_graph_json(out / "mpm.json") == path_graph(10)) ++hits;
  }
  MESSAGE("path recovered on " << hits << " of 10 seeds");
  CHECK(hits >= 8);
}
