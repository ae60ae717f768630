#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "spectral_frechet/errors.hpp"

namespace spectral_frechet {

/// Simple undirected unweighted graph on n labeled vertices.
///
/// Stored as a symmetric adjacency bit matrix (zero diagonal) plus a cached
/// edge count, so edge queries are O(1) and edge iteration is deterministic
/// in (i < j) lexicographic order.
class Graph {
 public:
  explicit Graph(int n) : n_(n) {
    if (n < 1) throw ArgumentError("Graph: vertex count must be positive");
    words_per_row_ = (static_cast<std::size_t>(n) + 63) / 64;
    bits_.assign(words_per_row_ * static_cast<std::size_t>(n), 0);
  }

  static Graph complete(int n) {
    Graph g(n);
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v) g.add_edge(u, v);
    return g;
  }

  int vertex_count() const { return n_; }
  std::int64_t edge_count() const { return m_; }

  bool has_edge(int u, int v) const {
    check_vertex(u);
    check_vertex(v);
    if (u == v) return false;
    return bit(u, v);
  }

  /// Inserts {u, v}; no-op when the edge is already present.
  void add_edge(int u, int v) {
    check_vertex(u);
    check_vertex(v);
    if (u == v) throw ArgumentError("Graph: self-loops are not allowed");
    if (bit(u, v)) return;
    set_bit(u, v);
    set_bit(v, u);
    ++m_;
  }

  void remove_edge(int u, int v) {
    check_vertex(u);
    check_vertex(v);
    if (u == v || !bit(u, v)) return;
    clear_bit(u, v);
    clear_bit(v, u);
    --m_;
  }

  int degree(int v) const {
    check_vertex(v);
    int d = 0;
    const std::uint64_t* row = &bits_[static_cast<std::size_t>(v) * words_per_row_];
    for (std::size_t w = 0; w < words_per_row_; ++w) d += __builtin_popcountll(row[w]);
    return d;
  }

  /// Calls f(u, v) for every edge with u < v, ascending.
  template <typename F>
  void for_each_edge(F&& f) const {
    for (int u = 0; u < n_; ++u)
      for (int v = u + 1; v < n_; ++v)
        if (bit(u, v)) f(u, v);
  }

  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(static_cast<std::size_t>(m_));
    for_each_edge([&](int u, int v) { out.emplace_back(u, v); });
    return out;
  }

  Eigen::MatrixXd adjacency_matrix() const {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_, n_);
    for_each_edge([&](int u, int v) {
      a(u, v) = 1.0;
      a(v, u) = 1.0;
    });
    return a;
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.bits_ == b.bits_;
  }

 private:
  void check_vertex(int v) const {
    if (v < 0 || v >= n_) throw ArgumentError("Graph: vertex index out of range");
  }
  bool bit(int u, int v) const {
    const std::size_t idx = static_cast<std::size_t>(u) * words_per_row_
                            + static_cast<std::size_t>(v) / 64;
    return (bits_[idx] >> (v % 64)) & 1u;
  }
  void set_bit(int u, int v) {
    bits_[static_cast<std::size_t>(u) * words_per_row_ + static_cast<std::size_t>(v) / 64]
        |= std::uint64_t{1} << (v % 64);
  }
  void clear_bit(int u, int v) {
    bits_[static_cast<std::size_t>(u) * words_per_row_ + static_cast<std::size_t>(v) / 64]
        &= ~(std::uint64_t{1} << (v % 64));
  }

  int n_ = 0;
  std::int64_t m_ = 0;
  std::size_t words_per_row_ = 0;
  std::vector<std::uint64_t> bits_;
};

/// Density m / (n(n-1)/2). Defined for n >= 2.
inline double density(const Graph& g) {
  const int n = g.vertex_count();
  if (n < 2) throw ArgumentError("density: needs at least two vertices");
  const double pairs = 0.5 * static_cast<double>(n) * (n - 1);
  return static_cast<double>(g.edge_count()) / pairs;
}

// --- Graph file format -------------------------------------------------
//
// UTF-8 text. First line "n <N>"; each following nonempty line "u v" with
// 0 <= u < v < N, one edge per line; lines beginning '#' are comments;
// duplicate edges are rejected. write_graph emits edges in (u < v)
// lexicographic order so serialization is byte-stable.

inline Graph read_graph(std::istream& in) {
  std::string line;
  long line_no = 0;
  auto fail = [&](const std::string& what) -> DataError {
    return DataError("graph parse error at line " + std::to_string(line_no) + ": " + what);
  };

  const auto is_blank = [](const std::string& text) {
    return text.find_first_not_of(" \t\r") == std::string::npos;
  };

  int n = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line) || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag != "n") throw fail("expected header 'n <N>'");
    long long count = 0;
    if (!(ls >> count) || count < 1) throw fail("invalid vertex count");
    std::string rest;
    if (ls >> rest) throw fail("trailing tokens after header");
    n = static_cast<int>(count);
    break;
  }
  if (n < 0) throw DataError("graph parse error: missing 'n <N>' header");

  Graph g(n);
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line) || line[0] == '#') continue;
    std::istringstream ls(line);
    long long u = 0, v = 0;
    if (!(ls >> u >> v)) throw fail("expected edge 'u v'");
    std::string rest;
    if (ls >> rest) throw fail("trailing tokens after edge");
    if (u < 0 || v < 0 || u >= n || v >= n) throw fail("vertex out of range");
    if (u >= v) throw fail("edges must satisfy u < v");
    if (g.has_edge(static_cast<int>(u), static_cast<int>(v))) throw fail("duplicate edge");
    g.add_edge(static_cast<int>(u), static_cast<int>(v));
  }
  return g;
}

inline void write_graph(const Graph& g, std::ostream& out) {
  out << "n " << g.vertex_count() << "\n";
  g.for_each_edge([&](int u, int v) { out << u << " " << v << "\n"; });
}

inline Graph read_graph_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open graph file: " + path.string());
  try {
    return read_graph(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

inline void write_graph_file(const Graph& g, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  write_graph(g, out);
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace spectral_frechet
