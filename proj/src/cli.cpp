#include "gsi/cli.hpp"

#include <CLI11.hpp>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "gsi/factor_graph.hpp"
#include "gsi/io.hpp"
#include "gsi/kron.hpp"
#include "gsi/mp.hpp"
#include "gsi/oracle_checks.hpp"
#include "gsi/pattern.hpp"
#include "gsi/solver.hpp"

namespace gsi::cli {

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitInvalidInput = 2;
constexpr int kExitVerification = 3;

struct CommonOptions {
  std::string input;
  std::string rhs;
  std::string output_dir = ".";
  std::string order_mode = "identity";  // identity | tree | random
  std::uint64_t seed = 1;
  int max_rounds = 0;  // 0: pick from the bound
  std::string scheduler = "sync";
  double tol = 1e-10;
};

bool looks_like_factor_graph(const std::string& path) {
  std::ifstream in(path);
  std::string tag;
  return bool(in >> tag) && tag == "VARS";
}

PrimaryOrder pick_order(const CommonOptions& opt, const FactorGraphTopology& topology) {
  if (opt.order_mode == "identity") return PrimaryOrder::identity(topology.n_variables);
  if (opt.order_mode == "tree") return spanning_tree_order(topology);
  if (opt.order_mode == "random") return random_order(topology.n_variables, opt.seed);
  throw std::invalid_argument("unknown order mode '" + opt.order_mode + "'");
}

struct LoadedProblem {
  SymmetricSparseMatrix a;
  std::vector<double> b;
  PrimaryOrder order;
  std::string coverage_note;  // non-empty when some variable has no factor
};

/// Loads either a factor-graph file (assembled under the chosen order) or a
/// Matrix Market pair.
LoadedProblem load_problem(const CommonOptions& opt) {
  if (looks_like_factor_graph(opt.input)) {
    std::ifstream in(opt.input);
    if (!in) throw std::invalid_argument("cannot open " + opt.input);
    const GaussianFactorGraph graph = read_factor_graph(in);
    const PrimaryOrder order = pick_order(opt, graph.topology);
    std::string note;
    for (Index v : unconstrained_variables(graph.topology))
      note += (note.empty() ? "variables with no factor:" : ",") + (" " + std::to_string(v + 1));
    auto [a, b] = assemble_system(graph, order);
    return {std::move(a), std::move(b), order, std::move(note)};
  }
  std::ifstream in(opt.input);
  if (!in) throw std::invalid_argument("cannot open " + opt.input);
  SymmetricSparseMatrix a = io::read_matrix_market(in);
  if (opt.rhs.empty())
    throw std::invalid_argument("Matrix Market input needs --rhs with the right-hand side");
  std::ifstream rhs_in(opt.rhs);
  if (!rhs_in) throw std::invalid_argument("cannot open " + opt.rhs);
  std::vector<double> b = io::read_vector_market(rhs_in);
  if (opt.order_mode != "identity")
    throw std::invalid_argument("matrix input fixes the variable order; use --order identity");
  const Index n = a.n();
  return {std::move(a), std::move(b), PrimaryOrder::identity(n), ""};
}

std::ofstream open_out(const CommonOptions& opt, const std::string& name) {
  fs::create_directories(opt.output_dir);
  const fs::path path = fs::path(opt.output_dir) / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

double primary_residual(const SymmetricSparseMatrix& a, const std::vector<double>& b,
                        const std::vector<double>& x) {
  const Index n = a.n();
  double num = 0.0, den = 0.0;
  for (Index i = 0; i < n; ++i) {
    double row = 0.0;
    for (Index j = 0; j < n; ++j) {
      const double v = a.value_sym(i, j);
      if (v != 0.0) row += v * x[static_cast<size_t>(j)];
    }
    const double r = row - b[static_cast<size_t>(i)];
    num += r * r;
    den += b[static_cast<size_t>(i)] * b[static_cast<size_t>(i)];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

int cmd_solve(const CommonOptions& opt) {
  auto [a, b, order, coverage_note] = load_problem(opt);
  const GlobalSolution g = [&] {
    try {
      return solve_global(a, b);
    } catch (const NotPositiveDefiniteError&) {
      if (!coverage_note.empty()) std::cerr << coverage_note << "\n";
      throw;
    }
  }();

  const double residual = primary_residual(a, b, g.solution.x);
  {
    auto out = open_out(opt, "x.txt");
    io::write_vector_plain(out, g.solution.x);
  }
  {
    auto out = open_out(opt, "selected_inverse.txt");
    io::write_selected_inverse(out, g.selinv);
  }
  {
    auto out = open_out(opt, "stats.txt");
    out << "n " << a.n() << "\n";
    out << "pattern_entries " << a.pattern().size() << "\n";
    out << "l_entries " << g.factors.pattern.size() << "\n";
    out << "fill_in " << g.factors.pattern.size() - a.pattern().size() << "\n";
    out << "residual " << std::setprecision(17) << residual << "\n";
  }
  std::cout << "solved n=" << a.n() << " |L|=" << g.factors.pattern.size()
            << " fill-in=" << g.factors.pattern.size() - a.pattern().size()
            << " residual=" << residual << "\n";
  if (!(residual <= opt.tol)) {
    std::cerr << "residual " << residual << " above tolerance " << opt.tol << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_simulate(const CommonOptions& opt, bool message_log) {
  auto [a, b, order, coverage_note] = load_problem(opt);
  (void)coverage_note;
  const GlobalSolution reference = solve_global(a, b);

  mp::CommGraph comm;
  comm.n = a.n();
  comm.neighbors.resize(static_cast<size_t>(a.n()));
  const SparsityPattern closed = reference.factors.pattern;
  for (const auto& e : closed.entries()) {
    if (e.row == e.col) continue;
    comm.neighbors[static_cast<size_t>(e.row)].push_back(e.col);
    comm.neighbors[static_cast<size_t>(e.col)].push_back(e.row);
  }
  for (auto& nbrs : comm.neighbors) std::sort(nbrs.begin(), nbrs.end());

  const int bound = mp::synchronous_round_bound(closed);
  const int max_rounds = opt.max_rounds > 0 ? std::max(opt.max_rounds, bound) : 4 * bound;

  std::ofstream log;
  std::function<void(const mp::Message&)> sink;
  if (message_log) {
    log = open_out(opt, "messages.csv");
    io::write_message_log_header(log);
    sink = [&log](const mp::Message& m) { io::write_message_log_row(log, m); };
  }

  const mp::RunResult result = [&]() -> mp::RunResult {
    if (opt.scheduler == "sync")
      return mp::run_synchronous(a, b, comm, max_rounds, &reference, sink);
    if (opt.scheduler == "async") {
      const auto budget = static_cast<std::int64_t>(max_rounds) * a.n() * 4;
      return mp::run_asynchronous(a, b, comm, opt.seed, a.n(), budget, &reference, sink);
    }
    throw std::invalid_argument("unknown scheduler '" + opt.scheduler + "'");
  }();

  {
    auto out = open_out(opt, "trace.csv");
    io::write_trace_csv(out, result.trace);
  }
  {
    auto out = open_out(opt, "x.txt");
    io::write_vector_plain(out, result.final_values.solution.x);
  }
  {
    auto out = open_out(opt, "selected_inverse.txt");
    io::write_selected_inverse(out, result.final_values.selinv);
  }
  std::cout << "converged in " << result.trace.rounds
            << (opt.scheduler == "sync" ? " rounds" : " windows")
            << " (bound " << bound << ", messages " << result.trace.rows.back().messages_sent
            << " in final round)\n";
  if (opt.scheduler == "sync" && result.trace.rounds > bound) {
    std::cerr << "synchronous run took " << result.trace.rounds << " rounds, bound is " << bound
              << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_fillin_experiment(Index n, long trials, const std::string& topology, std::uint64_t seed,
                          const CommonOptions& opt) {
  FactorGraphTopology topo;
  if (topology == "chain") {
    topo = gen_chain(n, seed).topology;
  } else if (topology == "tree") {
    topo = gen_tree(n, seed).topology;
  } else if (topology == "loopy") {
    topo = gen_loopy(n, std::max<Index>(1, n / 5), seed).topology;
  } else {
    throw std::invalid_argument("unknown topology '" + topology + "'");
  }

  std::map<int, long> histogram;
  const auto fill_of = [&topo](const PrimaryOrder& order) {
    const SparsityPattern base = pattern_from_graph(topo, order);
    return static_cast<int>(symbolic_fill_in(base).size() - base.size());
  };
  // trial 0 is the natural label order (the chain order for chains)
  histogram[fill_of(PrimaryOrder::identity(n))]++;
  for (long t = 1; t <= trials; ++t) histogram[fill_of(random_order(n, seed + 1000 + static_cast<std::uint64_t>(t)))]++;

  std::vector<std::pair<int, long>> rows(histogram.begin(), histogram.end());
  auto out = open_out(opt, "fillin_histogram.csv");
  io::write_histogram_csv(out, rows);

  std::cout << "fill-in counts over " << trials << " random orders (plus the natural order):\n";
  std::cout << "  convention: fill-in = lower-triangle entries added by the closure rule,\n"
            << "  i.e. |L| - |A| on the strictly-lower triangle\n";
  long zero = histogram.count(0) ? histogram.at(0) : 0;
  std::cout << "  zero fill-in: " << zero << " of " << trials + 1 << "\n";
  std::cout << "  max observed: " << rows.back().first << " (" << rows.back().second
            << " orders)\n";
  return kExitOk;
}

// ---- verification suite -----------------------------------------------

int cmd_verify(Index n_max, int cases, std::uint64_t seed, const std::string& dump_dir) {
  if (n_max > kron::kMaxOracleN) throw std::invalid_argument("n-max is capped at 12");
  bool all_ok = true;
  for (const auto& [name, check] : oracle::all_checks(n_max)) {
    std::string failure;
    int done = 0;
    for (int c = 0; c < cases && failure.empty(); ++c) {
      failure = check(seed + static_cast<std::uint64_t>(c));
      ++done;
    }
    if (failure.empty()) {
      std::cout << "PASS " << name << " (" << done << " cases)\n";
    } else {
      std::cout << "FAIL " << name << " [case seed "
                << seed + static_cast<std::uint64_t>(done - 1) << "]: " << failure << "\n";
      all_ok = false;
    }
  }

  if (!dump_dir.empty()) {
    // dense C/G sparsity dumps for the six-variable demo, both orders
    const GaussianFactorGraph demo = gen_demo6(seed);
    auto [a, b] = assemble_system(demo, PrimaryOrder::identity(6));
    const LdlFactors factors = ldl_factorize(a);
    const auto basic = kron::basic_triangular_order(6);
    const auto ultimate = kron::ultimate_triangular_order(6, factors.pattern);
    fs::create_directories(dump_dir);
    const auto dump = [&](const std::string& name, const Eigen::MatrixXd& m) {
      std::ofstream out(fs::path(dump_dir) / name);
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << m(r, c);
        out << "\n";
      }
    };
    dump("c_basic.csv", kron::build_c(factors, basic));
    dump("c_ultimate.csv", kron::build_c(factors, ultimate));
    dump("g_basic.csv", kron::build_g(factors, basic));
    dump("g_ultimate.csv", kron::build_g(factors, ultimate));
    std::cout << "wrote dense C/G dumps to " << dump_dir << "\n";
  }
  return all_ok ? kExitOk : kExitVerification;
}

int cmd_gen(const std::string& topology, Index n, std::uint64_t seed, const std::string& output,
            const std::string& matrix_out, const std::string& rhs_out) {
  GaussianFactorGraph graph;
  if (topology == "chain") {
    graph = gen_chain(n, seed);
  } else if (topology == "tree") {
    graph = gen_tree(n, seed);
  } else if (topology == "loopy") {
    graph = gen_loopy(n, std::max<Index>(1, n / 5), seed);
  } else if (topology == "demo6") {
    graph = gen_demo6(seed);
  } else {
    throw std::invalid_argument("unknown topology '" + topology + "'");
  }
  std::ofstream out(output);
  if (!out) throw std::runtime_error("cannot write " + output);
  write_factor_graph(out, graph);
  if (!matrix_out.empty()) {
    auto [a, b] = assemble_system(graph, PrimaryOrder::identity(graph.topology.n_variables));
    std::ofstream ma(matrix_out);
    if (!ma) throw std::runtime_error("cannot write " + matrix_out);
    io::write_matrix_market(ma, a);
    if (!rhs_out.empty()) {
      std::ofstream mb(rhs_out);
      if (!mb) throw std::runtime_error("cannot write " + rhs_out);
      io::write_vector_market(mb, b);
    }
  }
  std::cout << "wrote " << output << " (" << graph.topology.n_variables << " variables, "
            << graph.factors.size() << " factors)\n";
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"sparse Gaussian inference: direct solver, selected inverse, and "
               "message-passing simulator"};
  app.require_subcommand(1);

  CommonOptions opt;
  Index n = 20;
  long trials = 10000;
  std::string topology = "chain";
  Index n_max = 8;
  int cases = 100;
  std::string dump_dir;
  std::string output = "problem.fg";
  std::string matrix_out, rhs_out;
  bool message_log = false;

  auto add_common = [&](CLI::App* cmd, bool needs_input) {
    if (needs_input) cmd->add_option("--input", opt.input, "factor graph or Matrix Market file")->required();
    cmd->add_option("--rhs", opt.rhs, "right-hand side (Matrix Market array)");
    cmd->add_option("--output-dir", opt.output_dir, "artifact directory");
    cmd->add_option("--order", opt.order_mode, "identity|tree|random");
    cmd->add_option("--seed", opt.seed, "seed for random order / scheduler");
    cmd->add_option("--max-rounds", opt.max_rounds, "round budget (0 = from bound)");
    cmd->add_option("--tol", opt.tol, "residual tolerance");
  };

  auto* solve = app.add_subcommand("solve", "factorize, solve, and invert on the pattern");
  add_common(solve, true);

  auto* simulate = app.add_subcommand("simulate", "run the message-passing agents");
  add_common(simulate, true);
  simulate->add_option("--scheduler", opt.scheduler, "sync|async");
  simulate->add_flag("--message-log", message_log, "write messages.csv");

  auto* fillin = app.add_subcommand("fillin-experiment", "fill-in histogram over random orders");
  fillin->add_option("--n", n, "variable count");
  fillin->add_option("--trials", trials, "random orders to draw");
  fillin->add_option("--topology", topology, "chain|tree|loopy");
  fillin->add_option("--seed", opt.seed, "base seed");
  fillin->add_option("--output-dir", opt.output_dir, "artifact directory");

  auto* verify = app.add_subcommand("verify", "dense-oracle property suite");
  verify->add_option("--n-max", n_max, "largest dimension (<= 12)");
  verify->add_option("--cases", cases, "random cases per property");
  verify->add_option("--seed", opt.seed, "base seed");
  verify->add_option("--dump-dir", dump_dir, "write dense C/G CSV dumps here");

  auto* gen = app.add_subcommand("gen", "generate a random factor-graph problem");
  gen->add_option("--topology", topology, "chain|tree|loopy|demo6");
  gen->add_option("--n", n, "variable count");
  gen->add_option("--seed", opt.seed, "seed");
  gen->add_option("--output", output, "factor graph file to write");
  gen->add_option("--matrix-out", matrix_out, "also write the assembled A (Matrix Market)");
  gen->add_option("--rhs-out", rhs_out, "also write b (with --matrix-out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalidInput;
  }

  try {
    if (solve->parsed()) return cmd_solve(opt);
    if (simulate->parsed()) return cmd_simulate(opt, message_log);
    if (fillin->parsed()) return cmd_fillin_experiment(n, trials, topology, opt.seed, opt);
    if (verify->parsed()) return cmd_verify(n_max, cases, opt.seed, dump_dir);
    if (gen->parsed()) return cmd_gen(topology, n, opt.seed, output, matrix_out, rhs_out);
  } catch (const NotPositiveDefiniteError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const NonConvergenceError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  }
  return kExitInvalidInput;
}

}  // namespace gsi::cli
