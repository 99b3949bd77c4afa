#include "egw/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace egw::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(Errc::io, "failed writing " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string matrix_to_csv(const Matrix& m) {
  std::string out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out += ',';
      out += format_double(m(r, c));
    }
    out += '\n';
  }
  return out;
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) { write_text(path, matrix_to_csv(m)); }

namespace {

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r\"");
    const auto e = cell.find_last_not_of(" \t\r\"");
    cells.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool parse_cell(const std::string& cell, double& value) {
  if (cell.empty()) return false;
  errno = 0;
  char* end = nullptr;
  value = std::strtod(cell.c_str(), &end);
  return end == cell.c_str() + cell.size() && errno != ERANGE;
}

}  // namespace

Matrix parse_matrix_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_cells(line);
    std::vector<double> row;
    row.reserve(cells.size());
    std::size_t bad = 0;
    for (const auto& cell : cells) {
      double v = 0.0;
      if (parse_cell(cell, v))
        row.push_back(v);
      else
        ++bad;
    }
    if (bad > 0) {
      // a header is a first line with no numeric cell at all
      if (line_no == 1 && bad == cells.size()) continue;
      throw Error(Errc::parse, "non-numeric cell on line " + std::to_string(line_no));
    }
    for (double v : row)
      if (!std::isfinite(v)) throw Error(Errc::parse, "NaN or infinite value on line " + std::to_string(line_no));
    if (!rows.empty() && row.size() != rows.front().size())
      throw Error(Errc::parse, "ragged row on line " + std::to_string(line_no));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(Errc::parse, "CSV contains no numeric rows");
  Matrix m(Eigen::Index(rows.size()), Eigen::Index(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(Eigen::Index(r), Eigen::Index(c)) = rows[r][c];
  return m;
}

Matrix read_matrix_csv(const std::filesystem::path& path) { return parse_matrix_csv(read_text(path)); }

nlohmann::json graph_to_json(const Graph& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (const Edge& e : g.edges()) edges.push_back({e.i, e.j});
  return {{"p", g.p()}, {"edges", edges}};
}

Graph graph_from_json(const nlohmann::json& j) {
  try {
    const int p = j.at("p").get<int>();
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw Error(Errc::parse, "edge must be a pair");
      edges.push_back({e[0].get<int>(), e[1].get<int>()});
    }
    return Graph(p, edges);
  } catch (const nlohmann::json::exception& ex) {
    throw Error(Errc::parse, std::string("graph JSON: ") + ex.what());
  }
}

void write_graph_json(const std::filesystem::path& path, const Graph& g) {
  write_text(path, graph_to_json(g).dump() + "\n");
}

Graph read_graph_json(const std::filesystem::path& path) {
  try {
    return graph_from_json(nlohmann::json::parse(read_text(path)));
  } catch (const nlohmann::json::exception& ex) {
    throw Error(Errc::parse, std::string("graph JSON: ") + ex.what());
  }
}

void write_adjacency_csv(const std::filesystem::path& path, const Graph& g) {
  Matrix a = Matrix::Zero(g.p(), g.p());
  for (const Edge& e : g.edges()) a(e.i, e.j) = a(e.j, e.i) = 1.0;
  write_matrix_csv(path, a);
}

Graph read_adjacency_csv(const std::filesystem::path& path) {
  const Matrix a = read_matrix_csv(path);
  if (a.rows() != a.cols()) throw Error(Errc::parse, "adjacency matrix must be square");
  std::vector<Edge> edges;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = i + 1; j < a.cols(); ++j) {
      if (a(i, j) != a(j, i)) throw Error(Errc::parse, "adjacency matrix is not symmetric");
      if (a(i, j) != 0.0 && a(i, j) != 1.0) throw Error(Errc::parse, "adjacency entries must be 0 or 1");
      if (a(i, j) == 1.0) edges.push_back({i, j});
    }
  return Graph(int(a.rows()), edges);
}

}  // namespace egw::io
