#include <doctest.h>

#include "egw/io.hpp"
#include "test_support.hpp"

#include <cmath>
#include <filesystem>

using namespace egw;
namespace fs = std::filesystem;

TEST_CASE("doubles round trip through text") {
  Philox4x32 rng(71);
  for (int t = 0; t < 1000; ++t) {
    const double v = std::ldexp(rng.uniform01() - 0.5, int(rng() % 200) - 100);
    CHECK(std::stod(io::format_double(v)) == v);
  }
  CHECK(io::format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("matrix CSV round trip is lossless") {
  Philox4x32 rng(72);
  const Matrix m = egw::test::random_normal(rng, 5, 3) * 1e-3;
  CHECK((io::parse_matrix_csv(io::matrix_to_csv(m)).array() == m.array()).all());
  const Matrix with_header = io::parse_matrix_csv("a,b\n1,2\n3,4\n");
  CHECK(with_header.rows() == 2);
  CHECK(with_header(1, 0) == 3.0);
}

TEST_CASE("malformed CSV is rejected") {
  for (const char* text : {"1,2\n3\n", "1,nan\n2,3\n", "1,x\n2,3\n", "", "a,b\nc,d\n"}) {
    try {
      (void)io::parse_matrix_csv(text);
      FAIL("expected a parse error for: " << text);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::parse);
    }
  }
}

TEST_CASE("graph JSON and adjacency round trips") {
  const fs::path dir = fs::temp_directory_path() / "egw_test_io";
  fs::create_directories(dir);
  const Graph g(5, std::vector<Edge>{{0, 3}, {1, 2}, {2, 4}});
  const auto j = io::graph_to_json(g);
  CHECK(j.at("p") == 5);
  CHECK(j.at("edges").size() == 3);
  CHECK(io::graph_from_json(j) == g);
  io::write_graph_json(dir / "g.json", g);
  CHECK(io::read_graph_json(dir / "g.json") == g);
  io::write_adjacency_csv(dir / "g.csv", g);
  CHECK(io::read_adjacency_csv(dir / "g.csv") == g);
  CHECK_THROWS_AS(io::graph_from_json(nlohmann::json::parse(R"({"p": 3, "edges": [[0, 3]]})")), Error);
  CHECK_THROWS_AS(io::read_text(dir / "missing.txt"), Error);
  fs::remove_all(dir);
}
