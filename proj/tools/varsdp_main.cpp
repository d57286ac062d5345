// varsdp: command-line front end for the bisection / equipartition solvers.
//
//   varsdp bisect   --input g.mtx [--tol 1e-6] [--seed 1] [--output json]
//   varsdp equipart --k 5 --instance hamming-6-4
//   varsdp check    --input g.txt
//   varsdp bench    --manifest data/table1.manifest [--data-dir DIR]
//   varsdp generate --instance johnson8-4-4 --out j.txt
//
// Exit codes: 0 ok, 1 I/O or parse error, 2 flagged run / failed bench line.

#include "report.hpp"

#include "varsdp/alm.hpp"
#include "varsdp/bisection.hpp"
#include "varsdp/instances.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace varsdp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitFlagged = 2;

struct SolveOptions {
  std::string input;
  std::string instance;
  std::string format;  // empty: guess from extension
  int k = 2;
  long r = 0;
  double tol = 1e-6;
  std::uint64_t seed = 1;
  long max_iter = 0;
  std::string output = "table";
  std::string report;
  std::string variant = "bb1";
};

struct LoadedGraph {
  Graph graph;
  std::uint64_t checksum;
  std::string label;
  std::string format;
};

LoadedGraph load(const std::string& input, const std::string& instance, const std::string& format) {
  if (!instance.empty()) {
    Graph g = instances::named(instance);
    return {g, report::graph_checksum(g), "builtin:" + instance, "builtin"};
  }
  const fs::path path(input);
  const GraphFormat f = format.empty() ? guess_graph_format(path) : parse_graph_format(format);
  Graph g = load_graph(path, f);
  return {std::move(g), report::file_checksum(path), input, std::string(to_string(f))};
}

// Rd is allowed a factor 10 over tol for bisection; the ALM certificate is
// tolerance-level throughout.
bool within_bounds(const SolveReport& rep, double tol) {
  if (rep.kind == ProblemKind::Bisection) return rep.certified(tol, 10 * tol, tol);
  return rep.certified(10 * tol, 10 * tol, 10 * tol);
}

SolveReport run_solver(const Laplacian& L, const SolveOptions& o) {
  if (o.k == 2) {
    BBConfig cfg;
    cfg.tol = o.tol;
    cfg.seed = o.seed;
    if (o.max_iter > 0) cfg.max_iter = static_cast<int>(o.max_iter);
    if (o.r > 0) cfg.r = o.r;
    cfg.variant = o.variant == "bb2" ? BBVariant::BB2 : BBVariant::BB1;
    return solve_bisection(L, cfg);
  }
  ALMConfig cfg;
  cfg.tol = o.tol;
  cfg.inner_tol = o.tol;
  cfg.seed = o.seed;
  if (o.max_iter > 0) cfg.max_outer = static_cast<int>(o.max_iter);
  if (o.r > 0) cfg.r = o.r;
  return solve_equipartition(L, o.k, cfg);
}

void print_table(std::ostream& out, const std::string& label, const SolveReport& rep) {
  char line[512];
  std::snprintf(line, sizeof line, "%-24s %6s %5s %4s %9s %9s %9s %16s %16s %8s  %s\n", "instance", "n", "k", "r",
                "Rp", "Rd", "Rc", "obj", "f", "time", "termination");
  out << line;
  std::snprintf(line, sizeof line, "%-24s %6d %5d %4ld %9.2e %9.2e %9.2e %16.9e %16.9e %8.2f  %s\n", label.c_str(),
                rep.n, rep.k, static_cast<long>(rep.r_final), rep.cert.Rp, rep.cert.Rd, rep.cert.Rc, rep.obj, rep.f,
                rep.seconds, std::string(to_string(rep.termination)).c_str());
  out << line;
  for (const std::string& f : rep.flags) out << "  flag: " << f << "\n";
}

int cmd_solve(const SolveOptions& o, const std::string& command) {
  LoadedGraph lg = load(o.input, o.instance, o.format);
  const Graph& g = lg.graph;
  if (o.k > 2 && g.n() % o.k != 0) {
    std::cerr << "warning: k = " << o.k << " does not divide n = " << g.n() << "; solving the relaxation anyway\n";
  }
  Laplacian L(g);
  SolveReport rep = run_solver(L, o);

  report::RunEcho echo{command, lg.label, lg.format, o.k, o.r, o.tol, o.seed, o.max_iter, o.variant};
  const report::json j = report::to_json(rep, echo, g, lg.checksum);
  const std::string text = report::dump(j);
  if (o.output == "json") std::cout << text;
  else print_table(std::cout, lg.label, rep);
  if (!o.report.empty()) {
    std::ofstream f(o.report);
    if (!f) {
      std::cerr << "error: cannot write " << o.report << "\n";
      return kExitIo;
    }
    f << text;
  }
  return within_bounds(rep, o.tol) ? kExitOk : kExitFlagged;
}

int cmd_check(const std::string& input, const std::string& instance, const std::string& format) {
  LoadedGraph lg = load(input, instance, format);
  const Graph& g = lg.graph;
  Laplacian L(g);
  const Eigen::VectorXd Le = L.apply_vector(Eigen::VectorXd::Ones(g.n()));
  double min_deg = INFINITY, max_deg = 0.0;
  for (int i = 0; i < g.n(); ++i) {
    const double d = L.matrix().coeff(i, i);
    min_deg = std::min(min_deg, d);
    max_deg = std::max(max_deg, d);
  }
  std::cout << "input      " << lg.label << "\n"
            << "format     " << lg.format << "\n"
            << "n          " << g.n() << "\n"
            << "edges      " << g.edge_count() << "\n";
  if (g.header_m()) std::cout << "header m   " << *g.header_m() << "\n";
  std::cout << "degree     [" << min_deg << ", " << max_deg << "]\n"
            << "||L||_F    " << L.frobenius_norm() << "\n"
            << "||L e||    " << Le.norm() << "\n"
            << "checksum   " << report::hex64(lg.checksum) << "\n"
            << "default r  " << default_rank(g.n(), 2) << "\n";
  if (g.n() % 2 != 0) std::cout << "note       n is odd; the bisection relaxation has no rank-one points\n";
  return Le.norm() <= 1e-12 * (1.0 + L.frobenius_norm()) ? kExitOk : kExitFlagged;
}

struct ManifestLine {
  std::string file;
  std::string kind;
  int k = 2;
  double expected = 0.0;
  double rel_tol = 1e-4;
  std::string field = "obj";
  std::size_t line = 0;
};

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::vector<ManifestLine> read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest " + path.string());
  std::vector<ManifestLine> out;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cols.push_back(trim(c));
    auto fail = [&](const std::string& what) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + what);
    };
    if (cols.size() != 5 && cols.size() != 6) fail("expected 'file, kind, k, expected_obj, rel_tol[, field]'");
    ManifestLine m;
    m.line = lineno;
    m.file = cols[0];
    m.kind = cols[1];
    if (m.kind != "bisect" && m.kind != "equipart") fail("kind must be bisect or equipart");
    try {
      m.k = std::stoi(cols[2]);
      m.expected = std::stod(cols[3]);
      m.rel_tol = std::stod(cols[4]);
    } catch (const std::exception&) {
      fail("bad number");
    }
    if (cols.size() == 6) m.field = cols[5];
    if (m.field != "obj" && m.field != "f") fail("field must be obj or f");
    if ((m.kind == "bisect") != (m.k == 2)) fail("bisect needs k = 2, equipart k >= 3");
    if (!(m.rel_tol > 0.0)) fail("rel_tol must be positive");
    out.push_back(m);
  }
  return out;
}

int cmd_bench(const std::string& manifest, std::string data_dir, double tol, std::uint64_t seed) {
  if (data_dir.empty()) {
    if (const char* env = std::getenv("VARSDP_DATA_DIR")) data_dir = env;
  }
  const fs::path base = data_dir.empty() ? fs::path(manifest).parent_path() : fs::path(data_dir);
  std::vector<ManifestLine> lines = read_manifest(manifest);

  char buf[512];
  std::snprintf(buf, sizeof buf, "%-6s %-28s %4s %9s %9s %9s %16s %16s %8s\n", "status", "instance", "k", "Rp", "Rd",
                "Rc", "value", "expected", "time");
  std::cout << buf;
  int failed = 0, skipped = 0, passed = 0;
  for (const ManifestLine& m : lines) {
    std::optional<Graph> g;
    const std::string builtin = "builtin:";
    try {
      if (m.file.rfind(builtin, 0) == 0) {
        g = instances::named(m.file.substr(builtin.size()));
      } else {
        fs::path p = fs::path(m.file).is_absolute() ? fs::path(m.file) : base / m.file;
        if (!fs::exists(p)) {
          std::snprintf(buf, sizeof buf, "%-6s %-28s %4d  (missing %s)\n", "SKIP", m.file.c_str(), m.k, p.c_str());
          std::cout << buf;
          ++skipped;
          continue;
        }
        g = load_graph(p, guess_graph_format(p));
      }
    } catch (const std::exception& e) {
      std::cout << "FAIL   " << m.file << ": " << e.what() << "\n";
      ++failed;
      continue;
    }
    Laplacian L(*g);
    SolveOptions o;
    o.k = m.k;
    o.tol = tol;
    o.seed = seed;
    SolveReport rep = run_solver(L, o);
    const double value = m.field == "f" ? rep.f : rep.obj;
    const bool value_ok = std::abs(value - m.expected) <= m.rel_tol * std::max(1.0, std::abs(m.expected));
    const bool cert_ok = m.kind == "bisect" ? rep.certified(1e-8, 1e-6, 1e-8) : rep.certified(1e-5, 1e-5, 1e-5);
    const bool ok = value_ok && cert_ok;
    std::snprintf(buf, sizeof buf, "%-6s %-28s %4d %9.2e %9.2e %9.2e %16.9e %16.9e %8.2f\n", ok ? "PASS" : "FAIL",
                  m.file.c_str(), m.k, rep.cert.Rp, rep.cert.Rd, rep.cert.Rc, value, m.expected, rep.seconds);
    std::cout << buf;
    ok ? ++passed : ++failed;
  }
  std::cout << passed << " passed, " << failed << " failed, " << skipped << " skipped\n";
  return failed ? kExitFlagged : kExitOk;
}

int cmd_generate(const std::string& instance, int complete, int cycle, const std::vector<double>& gnp,
                 const std::string& out) {
  std::optional<Graph> g;
  if (!instance.empty()) g = instances::named(instance);
  else if (complete > 0) g = instances::complete(complete);
  else if (cycle > 0) g = instances::cycle(cycle);
  else if (gnp.size() == 3) g = instances::random_gnp(static_cast<int>(gnp[0]), gnp[1], static_cast<std::uint64_t>(gnp[2]));
  else throw std::runtime_error("generate: give one of --instance, --complete, --cycle, --gnp");
  if (out.empty() || out == "-") {
    write_edge_list(std::cout, *g);
    return kExitOk;
  }
  std::ofstream f(out);
  if (!f) throw std::runtime_error("cannot write " + out);
  write_edge_list(f, *g);
  return kExitOk;
}

void add_input_options(CLI::App* sub, SolveOptions& o) {
  auto* in = sub->add_option("--input,-i", o.input, "graph file (edge list or Matrix Market)");
  auto* inst = sub->add_option("--instance", o.instance, "built-in instance name")
                   ->check(CLI::IsMember(instances::named_list()));
  in->excludes(inst);
  sub->add_option("--format", o.format, "edge-list | matrix-market (default: from extension)")
      ->check(CLI::IsMember({"edge-list", "edgelist", "matrix-market", "mtx"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified low-rank SDP solver for graph bisection and k-equipartition"};
  app.require_subcommand(1);

  SolveOptions bis, eq, chk;
  std::string manifest, data_dir;
  double bench_tol = 1e-6;
  std::uint64_t bench_seed = 1;
  std::string gen_instance, gen_out;
  int gen_complete = 0, gen_cycle = 0;
  std::vector<double> gen_gnp;

  auto solve_flags = [](CLI::App* sub, SolveOptions& o) {
    sub->add_option("--r", o.r, "factor rank (default k - 1 + ceil(sqrt(2(n+1))))")->check(CLI::Range(2L, 1L << 30));
    sub->add_option("--tol", o.tol, "relative tolerance")->check(CLI::Range(1e-14, 1e-2));
    sub->add_option("--seed", o.seed, "random seed for the starting point");
    sub->add_option("--max-iter", o.max_iter, "inner iterations (bisect) or outer steps (equipart)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--output", o.output, "table | json")->check(CLI::IsMember({"table", "json"}));
    sub->add_option("--report", o.report, "also write the JSON report to this path");
  };

  CLI::App* s_bis = app.add_subcommand("bisect", "minimum bisection SDP");
  add_input_options(s_bis, bis);
  solve_flags(s_bis, bis);
  s_bis->add_option("--k", bis.k, "must be 2 for bisect")->check(CLI::Range(2, 2));
  s_bis->add_option("--variant", bis.variant, "BB step: bb1 | bb2")->check(CLI::IsMember({"bb1", "bb2"}));

  CLI::App* s_eq = app.add_subcommand("equipart", "k-equipartition SDP (k >= 3)");
  add_input_options(s_eq, eq);
  solve_flags(s_eq, eq);
  s_eq->add_option("--k", eq.k, "number of parts")->required()->check(CLI::Range(3, 1 << 20));

  CLI::App* s_chk = app.add_subcommand("check", "validate a graph and print Laplacian sanity checks");
  add_input_options(s_chk, chk);

  CLI::App* s_bench = app.add_subcommand("bench", "run a manifest of instances against expected values");
  s_bench->add_option("--manifest,-m", manifest, "lines 'file, kind, k, expected_obj, rel_tol[, field]'")
      ->required();
  s_bench->add_option("--data-dir", data_dir, "base directory for relative files (default $VARSDP_DATA_DIR)");
  s_bench->add_option("--tol", bench_tol, "solver tolerance")->check(CLI::Range(1e-14, 1e-2));
  s_bench->add_option("--seed", bench_seed, "random seed");

  CLI::App* s_gen = app.add_subcommand("generate", "write a generated graph in edge-list format");
  s_gen->add_option("--instance", gen_instance, "built-in instance name")
      ->check(CLI::IsMember(instances::named_list()));
  s_gen->add_option("--complete", gen_complete, "complete graph K_n");
  s_gen->add_option("--cycle", gen_cycle, "cycle C_n");
  s_gen->add_option("--gnp", gen_gnp, "n p seed")->expected(3);
  s_gen->add_option("--out,-o", gen_out, "output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*s_bis || *s_eq || *s_chk) {
      SolveOptions& o = *s_bis ? bis : (*s_eq ? eq : chk);
      if (o.input.empty() && o.instance.empty()) {
        std::cerr << "error: one of --input or --instance is required\n";
        return kExitIo;
      }
      if (*s_chk) return cmd_check(o.input, o.instance, o.format);
      return cmd_solve(o, *s_bis ? "bisect" : "equipart");
    }
    if (*s_bench) return cmd_bench(manifest, data_dir, bench_tol, bench_seed);
    if (*s_gen) return cmd_generate(gen_instance, gen_complete, gen_cycle, gen_gnp, gen_out);
  } catch (const GraphError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}
