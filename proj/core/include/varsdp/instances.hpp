#pragma once

#include "varsdp/graph.hpp"

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace varsdp::instances {

Graph complete(int n);
Graph path(int n);
Graph cycle(int n);

/// Two copies of K_{n/2} with no edges between them.
Graph disjoint_cliques(int n);

/// Erdos-Renyi G(n, p); deterministic for a given seed.
Graph random_gnp(int n, double p, std::uint64_t seed);

/// Vertices are the 2^bits binary words; u ~ v when their Hamming distance
/// lies in `distances`.
Graph hamming(int bits, const std::set<int>& distances);

/// Vertices are the k-subsets of {0..v-1}; two subsets are adjacent when
/// their intersection has exactly `intersection` elements.
Graph johnson(int v, int k, int intersection);

/// Named benchmark graphs from the Lovasz-theta test collection, rebuilt from
/// their combinatorial definitions (edge counts match the published "m - 1").
struct NamedInstance {
  std::string name;
  Graph graph;
};

/// Known names: hamming6-2, hamming-6-4, hamming-8-4, hamming-9-8,
/// hamming8-2, johnson8-4-4, johnson16-2-4. Throws GraphError otherwise.
Graph named(const std::string& name);
std::vector<std::string> named_list();

}  // namespace varsdp::instances
