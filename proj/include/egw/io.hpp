#pragma once

#include "egw/core.hpp"
#include "egw/graph.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace egw::io {

/// Shortest round-trip-safe rendering ("%.17g").
std::string format_double(double v);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

std::string matrix_to_csv(const Matrix& m);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);

/// Numeric CSV; a single non-numeric header row is skipped. NaN, ragged rows
/// and non-numeric cells raise a parse error.
Matrix parse_matrix_csv(const std::string& text);
Matrix read_matrix_csv(const std::filesystem::path& path);

/// {"p": int, "edges": [[i, j], ...]} with i < j in lexicographic order.
nlohmann::json graph_to_json(const Graph& g);
Graph graph_from_json(const nlohmann::json& j);
void write_graph_json(const std::filesystem::path& path, const Graph& g);
Graph read_graph_json(const std::filesystem::path& path);

/// Symmetric 0/1 adjacency matrix as CSV.
void write_adjacency_csv(const std::filesystem::path& path, const Graph& g);
Graph read_adjacency_csv(const std::filesystem::path& path);

}  // namespace egw::io
