#include "varsdp/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace varsdp {

GraphError::GraphError(const std::string& what, std::size_t line)
    : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
      line_(line) {}

Graph::Graph(int n, std::vector<Edge> edges, std::optional<long> header_m)
    : n_(n), edges_(std::move(edges)), header_m_(header_m) {
  if (n_ < 2) throw GraphError("graph needs at least 2 vertices, got " + std::to_string(n_));
  for (auto& e : edges_) {
    if (e.i < 0 || e.j < 0 || e.i >= n_ || e.j >= n_) {
      throw GraphError("edge (" + std::to_string(e.i) + ", " + std::to_string(e.j) +
                       ") out of range for n = " + std::to_string(n_));
    }
    if (e.i == e.j) throw GraphError("self-loop at vertex " + std::to_string(e.i));
    if (!(e.w > 0.0) || !std::isfinite(e.w)) {
      throw GraphError("edge weights must be positive and finite");
    }
    if (e.i > e.j) std::swap(e.i, e.j);
  }
  std::sort(edges_.begin(), edges_.end(),
            [](const Edge& a, const Edge& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
  auto dup = std::adjacent_find(edges_.begin(), edges_.end(),
                                [](const Edge& a, const Edge& b) { return a.i == b.i && a.j == b.j; });
  if (dup != edges_.end()) {
    throw GraphError("duplicate edge (" + std::to_string(dup->i) + ", " + std::to_string(dup->j) + ")");
  }
}

GraphFormat parse_graph_format(std::string_view name) {
  if (name == "edge-list" || name == "edgelist") return GraphFormat::EdgeList;
  if (name == "matrix-market" || name == "mtx") return GraphFormat::MatrixMarket;
  throw GraphError("unknown graph format '" + std::string(name) + "'");
}

std::string_view to_string(GraphFormat f) {
  return f == GraphFormat::EdgeList ? "edge-list" : "matrix-market";
}

GraphFormat guess_graph_format(const std::filesystem::path& path) {
  return path.extension() == ".mtx" ? GraphFormat::MatrixMarket : GraphFormat::EdgeList;
}

namespace {

std::vector<std::string> split_tokens(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) tokens.push_back(tok);
  return tokens;
}

long parse_int(const std::string& tok, std::size_t line) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw GraphError("expected an integer, got '" + tok + "'", line);
  }
  return value;
}

double parse_real(const std::string& tok, std::size_t line) {
  std::istringstream ss(tok);
  ss.imbue(std::locale::classic());
  double value = 0.0;
  ss >> value;
  if (ss.fail() || !ss.eof()) throw GraphError("expected a number, got '" + tok + "'", line);
  return value;
}

bool is_comment_or_blank(const std::string& line) {
  auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '%' || line[pos] == '#';
}

// Edge validation with line numbers; Graph's constructor re-checks globally.
void check_edge(long i, long j, double w, long n, std::size_t line) {
  if (i < 0 || j < 0 || i >= n || j >= n) {
    throw GraphError("vertex index out of range [0, " + std::to_string(n) + ")", line);
  }
  if (i == j) throw GraphError("self-loop at vertex " + std::to_string(i), line);
  if (!(w > 0.0) || !std::isfinite(w)) throw GraphError("edge weight must be positive", line);
}

Graph finish(long n, std::vector<Edge> edges, std::optional<long> header_m,
             const std::vector<std::size_t>& edge_lines) {
  // Report duplicates with the line of the second occurrence.
  std::vector<std::size_t> order(edges.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  auto key = [&](std::size_t k) {
    return std::pair{std::min(edges[k].i, edges[k].j), std::max(edges[k].i, edges[k].j)};
  };
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return key(a) < key(b); });
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (key(order[k]) == key(order[k - 1])) {
      auto [i, j] = key(order[k]);
      throw GraphError("duplicate edge (" + std::to_string(i) + ", " + std::to_string(j) + ")",
                       std::max(edge_lines[order[k]], edge_lines[order[k - 1]]));
    }
  }
  return Graph(static_cast<int>(n), std::move(edges), header_m);
}

}  // namespace

Graph read_edge_list(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  long n = -1, m = -1;
  std::vector<Edge> edges;
  std::vector<std::size_t> edge_lines;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_comment_or_blank(line)) continue;
    auto tok = split_tokens(line);
    if (n < 0) {
      if (tok.size() != 2) throw GraphError("header must be 'n m'", lineno);
      n = parse_int(tok[0], lineno);
      m = parse_int(tok[1], lineno);
      if (n < 2) throw GraphError("n must be at least 2", lineno);
      if (m < 0) throw GraphError("m must be non-negative", lineno);
      edges.reserve(static_cast<std::size_t>(m));
      continue;
    }
    if (tok.size() < 2 || tok.size() > 3) throw GraphError("edge line must be 'i j [w]'", lineno);
    if (static_cast<long>(edges.size()) == m) {
      throw GraphError("more edge lines than the declared m = " + std::to_string(m), lineno);
    }
    long i = parse_int(tok[0], lineno);
    long j = parse_int(tok[1], lineno);
    double w = tok.size() == 3 ? parse_real(tok[2], lineno) : 1.0;
    check_edge(i, j, w, n, lineno);
    edges.push_back({static_cast<int>(i), static_cast<int>(j), w});
    edge_lines.push_back(lineno);
  }
  if (n < 0) throw GraphError("missing 'n m' header");
  if (static_cast<long>(edges.size()) != m) {
    throw GraphError("expected " + std::to_string(m) + " edges, found " + std::to_string(edges.size()),
                     lineno);
  }
  return finish(n, std::move(edges), m, edge_lines);
}

Graph read_matrix_market(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw GraphError("empty Matrix Market file");
  ++lineno;
  auto banner = split_tokens(line);
  for (auto& t : banner) std::transform(t.begin(), t.end(), t.begin(), ::tolower);
  if (banner.size() != 5 || banner[0] != "%%matrixmarket" || banner[1] != "matrix" ||
      banner[2] != "coordinate") {
    throw GraphError("expected '%%MatrixMarket matrix coordinate <field> symmetric'", lineno);
  }
  const bool pattern = banner[3] == "pattern";
  if (!pattern && banner[3] != "real" && banner[3] != "integer") {
    throw GraphError("unsupported Matrix Market field '" + banner[3] + "'", lineno);
  }
  if (banner[4] != "symmetric") throw GraphError("only symmetric Matrix Market files are supported", lineno);

  long n = -1, nnz = -1;
  std::vector<Edge> edges;
  std::vector<std::size_t> edge_lines;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_comment_or_blank(line)) continue;
    auto tok = split_tokens(line);
    if (n < 0) {
      if (tok.size() != 3) throw GraphError("size line must be 'rows cols entries'", lineno);
      long rows = parse_int(tok[0], lineno);
      long cols = parse_int(tok[1], lineno);
      nnz = parse_int(tok[2], lineno);
      if (rows != cols) throw GraphError("matrix must be square", lineno);
      if (rows < 2) throw GraphError("n must be at least 2", lineno);
      if (nnz < 0) throw GraphError("entry count must be non-negative", lineno);
      n = rows;
      continue;
    }
    const std::size_t want = pattern ? 2 : 3;
    if (tok.size() != want) {
      throw GraphError(pattern ? "pattern entry must be 'i j'" : "entry must be 'i j value'", lineno);
    }
    if (static_cast<long>(edges.size()) == nnz) throw GraphError("more entries than declared", lineno);
    long i = parse_int(tok[0], lineno) - 1;
    long j = parse_int(tok[1], lineno) - 1;
    double w = pattern ? 1.0 : parse_real(tok[2], lineno);
    check_edge(i, j, w, n, lineno);
    edges.push_back({static_cast<int>(i), static_cast<int>(j), w});
    edge_lines.push_back(lineno);
  }
  if (n < 0) throw GraphError("missing size line");
  if (static_cast<long>(edges.size()) != nnz) {
    throw GraphError("expected " + std::to_string(nnz) + " entries, found " + std::to_string(edges.size()),
                     lineno);
  }
  return finish(n, std::move(edges), nnz, edge_lines);
}

Graph load_graph(const std::filesystem::path& path, GraphFormat format) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open '" + path.string() + "'");
  return format == GraphFormat::EdgeList ? read_edge_list(in) : read_matrix_market(in);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << g.n() << ' ' << g.edge_count() << '\n';
  auto old = out.precision(17);
  for (const auto& e : g.edges()) out << e.i << ' ' << e.j << ' ' << e.w << '\n';
  out.precision(old);
}

Laplacian::Laplacian(const Graph& g) {
  const int n = g.n();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(4 * g.edge_count());
  Eigen::VectorXd degree = Eigen::VectorXd::Zero(n);
  for (const auto& e : g.edges()) {
    triplets.emplace_back(e.i, e.j, -e.w);
    triplets.emplace_back(e.j, e.i, -e.w);
    degree(e.i) += e.w;
    degree(e.j) += e.w;
  }
  for (int i = 0; i < n; ++i) triplets.emplace_back(i, i, degree(i));
  matrix_.resize(n, n);
  matrix_.setFromTriplets(triplets.begin(), triplets.end());
  matrix_.makeCompressed();
  frobenius_ = matrix_.norm();
}

Eigen::MatrixXd Laplacian::apply(const Eigen::Ref<const Eigen::MatrixXd>& X) const {
  if (X.rows() != matrix_.cols()) {
    throw std::invalid_argument("laplacian_apply: expected " + std::to_string(matrix_.cols()) +
                                " rows, got " + std::to_string(X.rows()));
  }
  return matrix_ * X;
}

Eigen::VectorXd Laplacian::apply_vector(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != matrix_.cols()) {
    throw std::invalid_argument("laplacian_apply: vector length mismatch");
  }
  return matrix_ * x;
}

Eigen::MatrixXd laplacian_apply(const Laplacian& L, const Eigen::Ref<const Eigen::MatrixXd>& X) {
  return L.apply(X);
}

}  // namespace varsdp
