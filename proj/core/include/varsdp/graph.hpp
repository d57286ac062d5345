#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace varsdp {

/// Thrown for malformed or invalid graph input. `line()` is 1-based, 0 when
/// the error is not tied to a particular line.
class GraphError : public std::runtime_error {
 public:
  GraphError(const std::string& what, std::size_t line = 0);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct Edge {
  int i = 0;  // i < j
  int j = 0;
  double w = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected graph with positive edge weights, no self-loops and no
/// repeated unordered pairs. Edges are kept sorted by (i, j).
class Graph {
 public:
  /// Validates and canonicalizes the edge list (orders each pair, sorts).
  /// Throws GraphError on self-loops, duplicates, bad indices or weights.
  Graph(int n, std::vector<Edge> edges, std::optional<long> header_m = std::nullopt);

  int n() const noexcept { return n_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  /// The "m" value declared in the file header, if any. Recorded verbatim.
  std::optional<long> header_m() const noexcept { return header_m_; }

 private:
  int n_;
  std::vector<Edge> edges_;
  std::optional<long> header_m_;
};

enum class GraphFormat { EdgeList, MatrixMarket };

GraphFormat parse_graph_format(std::string_view name);
std::string_view to_string(GraphFormat f);
/// ".mtx" selects Matrix Market, everything else the edge-list format.
GraphFormat guess_graph_format(const std::filesystem::path& path);

Graph read_edge_list(std::istream& in);
Graph read_matrix_market(std::istream& in);
Graph load_graph(const std::filesystem::path& path, GraphFormat format);

/// Writes the edge-list format ("n m" header, 0-based "i j w" lines).
void write_edge_list(std::ostream& out, const Graph& g);

/// Sparse graph Laplacian L = D - A.
class Laplacian {
 public:
  explicit Laplacian(const Graph& g);

  int n() const noexcept { return static_cast<int>(matrix_.rows()); }
  const Eigen::SparseMatrix<double, Eigen::RowMajor>& matrix() const noexcept { return matrix_; }

  /// Y = L * X for dense X with n rows. Throws std::invalid_argument on a
  /// shape mismatch.
  Eigen::MatrixXd apply(const Eigen::Ref<const Eigen::MatrixXd>& X) const;
  Eigen::VectorXd apply_vector(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  double frobenius_norm() const noexcept { return frobenius_; }
  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(matrix_); }

 private:
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix_;
  double frobenius_ = 0.0;
};

/// Free-function form of Laplacian::apply.
Eigen::MatrixXd laplacian_apply(const Laplacian& L, const Eigen::Ref<const Eigen::MatrixXd>& X);

}  // namespace varsdp
