#pragma once

#include "varsdp/certify.hpp"
#include "varsdp/graph.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace varsdp::report {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// FNV-1a (64 bit) over raw bytes.
std::uint64_t fnv1a(std::string_view bytes);
std::uint64_t file_checksum(const std::filesystem::path& path);
/// Checksum of the canonical edge-list text of g; used for generated inputs.
std::uint64_t graph_checksum(const Graph& g);
std::string hex64(std::uint64_t v);

struct RunEcho {
  std::string command;  // "bisect" or "equipart"
  std::string input;
  std::string format;
  int k = 2;
  long r = 0;           // 0 = default
  double tol = 1e-6;
  std::uint64_t seed = 1;
  long max_iter = 0;
  std::string variant = "bb1";
};

/// Everything except wall time; `timing` holds that separately.
json to_json(const SolveReport& rep, const RunEcho& echo, const Graph& g, std::uint64_t checksum);

/// Serializes with every floating-point number printed as %.17g, keys in
/// sorted order, two-space indentation.
std::string dump(const json& j);

/// Copy of j without the "timing" member.
json without_timing(const json& j);

}  // namespace varsdp::report
