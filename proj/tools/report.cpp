#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>

namespace varsdp::report {

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t file_checksum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a(bytes);
}

std::uint64_t graph_checksum(const Graph& g) {
  std::ostringstream out;
  write_edge_list(out, g);
  return fnv1a(out.str());
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json to_json(const SolveReport& rep, const RunEcho& echo, const Graph& g, std::uint64_t checksum) {
  json j;
  j["schema"] = kSchemaVersion;
  j["config"] = {
      {"command", echo.command}, {"input", echo.input},   {"format", echo.format},
      {"k", echo.k},             {"r", echo.r},           {"tol", echo.tol},
      {"seed", echo.seed},       {"max_iter", echo.max_iter}, {"variant", echo.variant},
  };
  j["dataset"] = {{"n", g.n()}, {"edges", g.edge_count()}, {"checksum", hex64(checksum)}};
  if (g.header_m()) j["dataset"]["header_m"] = *g.header_m();

  json res;
  res["kind"] = std::string(to_string(rep.kind));
  res["n"] = rep.n;
  res["k"] = rep.k;
  res["r_initial"] = rep.r_initial;
  res["r_final"] = rep.r_final;
  res["obj"] = rep.obj;
  res["f"] = rep.f;
  res["Rp"] = rep.cert.Rp;
  res["Rd"] = rep.cert.Rd;
  res["Rc"] = rep.cert.Rc;
  res["eig_min"] = rep.cert.eig_min;
  res["eig_converged"] = rep.cert.eig_converged;
  res["inner_iterations"] = rep.inner_iterations;
  res["outer_iterations"] = rep.outer_iterations;
  res["escapes"] = rep.escapes;
  res["round_events"] = rep.round_events;
  res["delta_final"] = rep.delta_final;
  res["termination"] = std::string(to_string(rep.termination));
  res["seed"] = rep.seed;
  res["flags"] = rep.flags;
  json drops = json::array();
  for (const RankDrop& d : rep.rank_drops) drops.push_back({{"iteration", d.iteration}, {"from", d.from}, {"to", d.to}});
  res["rank_drops"] = std::move(drops);
  if (rep.kind == ProblemKind::Equipartition) {
    res["alpha"] = rep.alpha;
    res["beta_final"] = rep.beta_final;
    res["pfeas"] = rep.pfeas;
    res["dfeas"] = rep.dfeas;
    res["bound_width"] = rep.cert.bound_width;
    if (rep.n % rep.k == 0) res["part_size"] = rep.n / rep.k;
  }
  j["result"] = std::move(res);
  j["timing"] = {{"seconds", rep.seconds}};
  return j;
}

namespace {

void emit(std::string& out, const json& j, int depth) {
  const std::string pad(2 * depth, ' '), inner(2 * (depth + 1), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // nlohmann keeps keys sorted
        if (!first) out += ",\n";
        first = false;
        out += inner + json(it.key()).dump() + ": ";
        emit(out, it.value(), depth + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        emit(out, j[i], depth + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      std::string s = buf;
      // keep it a float on re-parse
      if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
      out += s;
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump(const json& j) {
  std::string out;
  emit(out, j, 0);
  out += "\n";
  return out;
}

json without_timing(const json& j) {
  json copy = j;
  copy.erase("timing");
  return copy;
}

}  // namespace varsdp::report
