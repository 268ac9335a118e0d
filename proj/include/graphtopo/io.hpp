#pragma once

#include "core.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>

#include <json.hpp>

#if defined(__unix__) || defined(__APPLE__)
#include <unistd.h>
#endif

namespace graphtopo::io {

using json = nlohmann::json;

// Shortest decimal string that round-trips to the same double.
inline std::string fmt(double x) {
  if (x == 0.0) return "0";  // folds -0
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw NumericalError("cannot format number");
  return std::string(buf, end);
}

inline double parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw InvalidArgument("bad number in CSV: '" + std::string(s) + "'");
  return v;
}

inline std::string to_csv(const Matrix& m) {
  std::string out;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += fmt(m(i, j));
    }
    out += '\n';
  }
  return out;
}

// column vector -> one value per line
inline std::string to_csv(const Vector& v) { return to_csv(Matrix(v)); }

inline Matrix parse_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::string_view sv(line);
    size_t pos = 0;
    while (true) {
      size_t comma = sv.find(',', pos);
      row.push_back(parse_double(sv.substr(pos, comma == std::string_view::npos ? sv.npos : comma - pos)));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw InvalidArgument("ragged CSV: row " + std::to_string(rows.size()) + " has " + std::to_string(row.size()) +
                            " columns, expected " + std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) return Matrix(0, 0);
  Matrix m(rows.size(), rows.front().size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw InvalidArgument("cannot open " + p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Write to a sibling temp file, then rename over the target.
inline void write_atomic(const std::filesystem::path& p, const std::string& data) {
  if (p.has_parent_path()) {
    std::error_code dir_ec;
    std::filesystem::create_directories(p.parent_path(), dir_ec);
  }
  std::filesystem::path tmp = p;
#if defined(__unix__) || defined(__APPLE__)
  tmp += ".tmp" + std::to_string(::getpid());
#else
  tmp += ".tmp";
#endif
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw InvalidArgument("cannot write " + tmp.string());
    f << data;
    f.flush();
    if (!f) throw InvalidArgument("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, p, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw InvalidArgument("cannot rename into " + p.string() + ": " + ec.message());
  }
}

inline Matrix read_csv(const std::filesystem::path& p) { return parse_csv(read_file(p)); }

inline void write_csv(const std::filesystem::path& p, const Matrix& m) { write_atomic(p, to_csv(m)); }

inline Vector read_vector(const std::filesystem::path& p) {
  Matrix m = read_csv(p);
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  if (m.size() == 0) return Vector();
  throw InvalidArgument(p.string() + " is not a vector (" + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ")");
}

// {"n": int, "edges": [[i, j, w], ...]}, 0-based, upper triangle written
inline json graph_to_json(const Graph& g) {
  json edges = json::array();
  for (Index i = 0; i < g.n(); ++i)
    for (Index j = i + 1; j < g.n(); ++j)
      if (g.w()(i, j) != 0.0) edges.push_back({i, j, g.w()(i, j)});
  return json{{"n", g.n()}, {"edges", edges}};
}

inline Matrix edges_matrix(const json& j, bool symmetric) {
  if (!j.is_object() || !j.contains("n") || !j.contains("edges"))
    throw InvalidArgument("graph JSON needs keys \"n\" and \"edges\"");
  const auto n = j.at("n").get<long long>();
  if (n < 0) throw InvalidArgument("graph JSON: negative n");
  Matrix w = Matrix::Zero(n, n);
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || (e.size() != 2 && e.size() != 3)) throw InvalidArgument("graph JSON: edge must be [i, j, w]");
    const auto a = e[0].get<long long>(), b = e[1].get<long long>();
    const double x = e.size() == 3 ? e[2].get<double>() : 1.0;
    if (a < 0 || b < 0 || a >= n || b >= n) throw InvalidArgument("graph JSON: edge index out of range");
    w(a, b) = x;
    if (symmetric) w(b, a) = x;
  }
  return w;
}

inline Graph graph_from_json(const json& j) { return Graph(edges_matrix(j, true)); }

inline DirectedGraph digraph_from_json(const json& j) { return DirectedGraph(edges_matrix(j, false)); }

inline json digraph_to_json(const DirectedGraph& g) {
  json edges = json::array();
  for (Index i = 0; i < g.n(); ++i)
    for (Index j = 0; j < g.n(); ++j)
      if (g.w()(i, j) != 0.0) edges.push_back({i, j, g.w()(i, j)});
  return json{{"n", g.n()}, {"edges", edges}};
}

inline json read_json(const std::filesystem::path& p) {
  try {
    return json::parse(read_file(p));
  } catch (const json::exception& e) {
    throw InvalidArgument(p.string() + ": " + e.what());
  }
}

inline Graph read_graph(const std::filesystem::path& p) { return graph_from_json(read_json(p)); }

inline void write_graph(const std::filesystem::path& p, const Graph& g) {
  write_atomic(p, graph_to_json(g).dump(2) + "\n");
}

}  // namespace graphtopo::io
