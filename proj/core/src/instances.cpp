#include "varsdp/instances.hpp"

#include <bit>
#include <random>

namespace varsdp::instances {

Graph complete(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.push_back({i, j, 1.0});
  return Graph(n, std::move(edges));
}

Graph path(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, 1.0});
  return Graph(n, std::move(edges));
}

Graph cycle(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, 1.0});
  if (n > 2) edges.push_back({0, n - 1, 1.0});
  return Graph(n, std::move(edges));
}

Graph disjoint_cliques(int n) {
  const int h = n / 2;
  std::vector<Edge> edges;
  for (int base : {0, h}) {
    const int size = base == 0 ? h : n - h;
    for (int i = 0; i < size; ++i)
      for (int j = i + 1; j < size; ++j) edges.push_back({base + i, base + j, 1.0});
  }
  return Graph(n, std::move(edges));
}

Graph random_gnp(int n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (u(rng) < p) edges.push_back({i, j, 1.0});
  return Graph(n, std::move(edges));
}

Graph hamming(int bits, const std::set<int>& distances) {
  const int n = 1 << bits;
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (distances.count(std::popcount(static_cast<unsigned>(i ^ j)))) edges.push_back({i, j, 1.0});
  return Graph(n, std::move(edges));
}

Graph johnson(int v, int k, int intersection) {
  std::vector<unsigned> subsets;
  for (unsigned s = 0; s < (1u << v); ++s)
    if (std::popcount(s) == k) subsets.push_back(s);
  const int n = static_cast<int>(subsets.size());
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::popcount(subsets[i] & subsets[j]) == intersection) edges.push_back({i, j, 1.0});
  return Graph(n, std::move(edges));
}

Graph named(const std::string& name) {
  if (name == "hamming6-2") return hamming(6, {1});
  if (name == "hamming-6-4") return hamming(6, {1, 2, 3});
  if (name == "hamming-8-4") return hamming(8, {1, 2, 3});
  if (name == "hamming-9-8") return hamming(9, {8});
  if (name == "hamming8-2") return hamming(8, {1});
  if (name == "johnson8-4-4") return johnson(8, 4, 3);
  if (name == "johnson16-2-4") return johnson(16, 2, 1);
  throw GraphError("unknown named instance '" + name + "'");
}

std::vector<std::string> named_list() {
  return {"hamming6-2", "hamming-6-4", "hamming-8-4", "hamming-9-8",
          "hamming8-2", "johnson8-4-4", "johnson16-2-4"};
}

}  // namespace varsdp::instances
