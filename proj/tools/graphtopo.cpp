// graphtopo command-line tool: file in, file out.
#include <graphtopo/graphtopo.hpp>
#include <graphtopo/verify.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using graphtopo::Index;
using graphtopo::Matrix;
using graphtopo::Vector;
using json = nlohmann::ordered_json;
namespace io = graphtopo::io;

namespace {

struct Plot {
  std::vector<std::string> rows;
  void add(double x, double y, const std::string& series) {
    rows.push_back(io::fmt(x) + "," + io::fmt(y) + "," + series);
  }
  void add_vector(const Vector& v, const std::string& series) {
    for (Index i = 0; i < v.size(); ++i) add(static_cast<double>(i), v(i), series);
  }
};

// Shared state of one invocation.
struct Run {
  std::string command;
  std::string report_path;
  std::string plot_path;
  bool dry_run = false;
  json parameters = json::object();
  json metrics = json::object();
  json outputs = json::array();
  std::optional<std::uint64_t> seed;
  bool converged = true;
  Plot plot;

  void write_csv(const std::string& path, const Matrix& m) {
    io::write_csv(path, m);
    outputs.push_back(path);
  }
  void write_text(const std::string& path, const std::string& text) {
    io::write_atomic(path, text);
    outputs.push_back(path);
  }
};

Run run;
std::function<void()> action;
std::map<const CLI::App*, std::string*> out_of;

std::string report_default(const std::string& out) {
  const fs::path p(out);
  return (p.has_parent_path() ? p.parent_path() / "report.json" : fs::path("report.json")).string();
}

// Options shared by every leaf subcommand.
void common(CLI::App* sub, std::string& out, const std::string& out_default) {
  out = out_default;
  out_of[sub] = &out;
  sub->add_option("--out", out, "output file")->capture_default_str();
  sub->add_option("--report", run.report_path, "JSON run report (default: report.json next to --out)");
  sub->add_flag("--dry-run", run.dry_run, "validate inputs without computing");
  sub->add_option("--emit-plot-data", run.plot_path, "write tidy plot CSV (x,y,series)");
}

template <class F>
void on_run(CLI::App* sub, const std::string& name, F&& f) {
  sub->callback([sub, name, f = std::forward<F>(f)]() {
    run.command = name;
    action = f;
    if (run.report_path.empty()) run.report_path = report_default(*out_of.at(sub));
  });
}

graphtopo::BoundaryCondition read_bc(const std::string& path) {
  const Matrix m = io::read_csv(path);
  graphtopo::detail::require(m.cols() == 2, "boundary file must have two columns: vertex,value");
  graphtopo::BoundaryCondition bc;
  for (Index r = 0; r < m.rows(); ++r) {
    const double v = m(r, 0);
    graphtopo::detail::require(v >= 0 && v == std::floor(v), "boundary vertex must be a non-negative integer");
    bc[static_cast<Index>(v)] = m(r, 1);
  }
  return bc;
}

std::vector<Index> parse_index_list(const std::string& s) {
  std::vector<Index> out;
  std::string cur;
  for (char c : s + ",") {
    if (c == ',') {
      if (!cur.empty()) {
        const double v = io::parse_double(cur);
        graphtopo::detail::require(v >= 0 && v == std::floor(v), "expected a list of non-negative integers");
        out.push_back(static_cast<Index>(v));
      }
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  return out;
}

graphtopo::KernelSpec kernel_from(const std::string& kind, double tau, std::optional<double> kappa) {
  graphtopo::KernelSpec k;
  k.kind = graphtopo::parse_kernel(kind);
  k.tau = tau;
  if (kappa) k.kappa = *kappa;
  k.validate();
  return k;
}

graphtopo::CutKind parse_cut_kind(const std::string& s) {
  if (s == "cutn") return graphtopo::CutKind::normalized;
  if (s == "cutv") return graphtopo::CutKind::volume;
  throw graphtopo::InvalidArgument("unknown cut kind '" + s + "' (cutn, cutv)");
}

graphtopo::AllocScheme parse_scheme(const std::string& s) {
  if (s == "as1") return graphtopo::AllocScheme::as1;
  if (s == "as2") return graphtopo::AllocScheme::as2;
  throw graphtopo::InvalidArgument("unknown allocation scheme '" + s + "' (as1, as2)");
}

graphtopo::LeafSelect parse_select(const std::string& s) {
  if (s == "size") return graphtopo::LeafSelect::largest_size;
  if (s == "volume") return graphtopo::LeafSelect::largest_volume;
  throw graphtopo::InvalidArgument("unknown leaf selection '" + s + "' (size, volume)");
}

json tree_json(const graphtopo::CutTree& t) {
  json nodes = json::array();
  for (const auto& n : t.nodes)
    nodes.push_back({{"vertices", n.vertices}, {"depth", n.depth}, {"parent", n.parent}, {"left", n.left}, {"right", n.right}});
  return {{"nodes", nodes}, {"warnings", t.warnings}};
}

// Optional ground truth comparison in dB.
void report_truth(const std::string& truth_path, const Matrix& w) {
  if (truth_path.empty()) return;
  const Matrix t = io::read_csv(truth_path);
  graphtopo::detail::require(t.rows() == w.rows() && t.cols() == w.cols(), "truth matrix shape differs from estimate");
  run.metrics["mse_db"] = graphtopo::mse_db(w, t);
}

// ---------------------------------------------------------------- gen

void add_gen(CLI::App& app) {
  auto* gen = app.add_subcommand("gen", "generate graphs and signals");
  gen->require_subcommand(1);

  {
    auto* s = gen->add_subcommand("swiss-roll", "sampled swiss roll with kernel weights");
    static Index n = 0;
    static std::uint64_t seed = 0;
    static double tau = 1.0;
    static std::optional<double> kappa;
    static std::string kernel = "gauss_sq", out, coords = "coords.csv";
    s->add_option("--n", n, "number of points")->required()->check(CLI::PositiveNumber);
    s->add_option("--seed", seed, "RNG seed")->capture_default_str();
    s->add_option("--tau", tau, "kernel scale")->capture_default_str();
    s->add_option("--kappa", kappa, "distance threshold (default: none)");
    s->add_option("--kernel", kernel, "gauss_sq | exp_lin | inv_dist | binary")->capture_default_str();
    s->add_option("--coords", coords, "coordinates CSV (N x 3)")->capture_default_str();
    common(s, out, "graph.json");
    on_run(s, "gen swiss-roll", [] {
      const auto k = kernel_from(kernel, tau, kappa);
      run.seed = seed;
      run.parameters = {{"n", n}, {"tau", tau}, {"kernel", kernel}};
      if (kappa) run.parameters["kappa"] = *kappa;
      if (run.dry_run) return;
      const auto sr = graphtopo::swiss_roll_graph(n, seed, k);
      io::write_graph(out, sr.g);
      run.outputs.push_back(out);
      run.write_csv(coords, sr.coords);
      run.metrics["edges"] = sr.g.edge_count();
      run.metrics["connected"] = graphtopo::is_connected(sr.g);
      for (Index i = 0; i < sr.u.size(); ++i) run.plot.add(sr.u(i), sr.v(i), "sample");
    });
  }

  {
    auto* s = gen->add_subcommand("signal", "simulate vertex signals on a graph");
    static std::string graph, mode = "diffusion", params = "{}", out, sources_out;
    static std::uint64_t seed = 0;
    static Index p = 1;
    s->add_option("--graph", graph, "graph JSON")->required();
    s->add_option("--mode", mode, "1..6 or sources|dipole|pinned_pair|diffusion|adjacency_shift|bandlimited")->capture_default_str();
    s->add_option("--seed", seed, "RNG seed")->capture_default_str();
    s->add_option("--p", p, "number of snapshots")->capture_default_str();
    s->add_option("--params", params, "mode parameters as JSON")->capture_default_str();
    s->add_option("--sources-out", sources_out, "source matrix CSV (modes 1 and 2)");
    common(s, out, "X.csv");
    on_run(s, "gen signal", [] {
      const auto g = io::read_graph(graph);
      graphtopo::SimSpec spec;
      spec.mode = graphtopo::parse_sim_mode(mode);
      spec.seed = seed;
      spec.p = p;
      json j;
      try {
        j = json::parse(params);
      } catch (const json::exception& e) {
        throw graphtopo::InvalidArgument(std::string("--params is not valid JSON: ") + e.what());
      }
      try {
        if (j.contains("sigma")) spec.sigma = j["sigma"].get<double>();
        if (j.contains("reference")) spec.reference = j["reference"].get<Index>();
        if (j.contains("h")) spec.h = j["h"].get<std::vector<double>>();
        if (j.contains("shifts")) spec.shifts = j["shifts"].get<int>();
        if (j.contains("spikes")) spec.spikes = j["spikes"].get<int>();
        if (j.contains("spike_amplitudes")) spec.spike_amplitudes = j["spike_amplitudes"].get<std::vector<double>>();
        if (j.contains("indices")) spec.indices = j["indices"].get<std::vector<Index>>();
        if (j.contains("amplitudes")) spec.amplitudes = j["amplitudes"].get<std::vector<double>>();
        if (j.contains("basis")) spec.basis = j["basis"].get<std::string>() == "normalized" ? graphtopo::LaplacianKind::normalized
                                                                                           : graphtopo::LaplacianKind::combinatorial;
      } catch (const json::exception& e) {
        throw graphtopo::InvalidArgument(std::string("--params: ") + e.what());
      }
      spec.validate(g.n());
      run.seed = seed;
      run.parameters = {{"graph", graph}, {"mode", static_cast<int>(spec.mode)}, {"p", p}, {"params", j}};
      if (run.dry_run) return;
      const auto r = graphtopo::simulate(g, spec);
      run.write_csv(out, r.x);
      if (!sources_out.empty() && r.sources.size() > 0) run.write_csv(sources_out, r.sources);
      run.plot.add_vector(r.x.col(0), "snapshot0");
    });
  }

  {
    auto* s = gen->add_subcommand("lattice", "Kronecker-sum lattice graph");
    static std::string dims, out;
    s->add_option("--dims", dims, "path lengths, e.g. 3,4,2")->required();
    common(s, out, "graph.json");
    on_run(s, "gen lattice", [] {
      const graphtopo::Lattice lat{parse_index_list(dims)};
      lat.validate();
      run.parameters = {{"dims", lat.dims}};
      if (run.dry_run) return;
      io::write_graph(out, graphtopo::kron_sum_adjacency(lat));
      run.outputs.push_back(out);
    });
  }
}

// ---------------------------------------------------------------- learn

void add_learn(CLI::App& app) {
  auto* learn = app.add_subcommand("learn", "learn graph topology from data");
  learn->require_subcommand(1);

  {
    auto* s = learn->add_subcommand("lasso", "ISTA LASSO: generic (--a/--y) or one vertex regression (--obs/--vertex)");
    static std::string obs, a_path, y_path, out;
    static std::optional<Index> vertex;
    static double rho = 0.0, tol = 1e-8;
    static int max_iter = 1000;
    s->add_option("--obs", obs, "observations X (N x P)");
    s->add_option("--vertex", vertex, "vertex regressed on the others (with --obs)");
    s->add_option("--a", a_path, "measurement matrix A (M x N)");
    s->add_option("--y", y_path, "measurement vector y");
    s->add_option("--rho", rho, "L1 weight")->capture_default_str();
    s->add_option("--max-iter", max_iter, "iteration cap")->capture_default_str();
    s->add_option("--tol", tol, "relative change tolerance")->capture_default_str();
    common(s, out, "x.csv");
    on_run(s, "learn lasso", [] {
      Matrix a;
      Vector y;
      if (!obs.empty()) {
        graphtopo::detail::require(a_path.empty() && y_path.empty(), "use either --obs/--vertex or --a/--y");
        graphtopo::detail::require(vertex.has_value(), "--obs needs --vertex");
        const Matrix x = io::read_csv(obs);
        graphtopo::detail::require(*vertex >= 0 && *vertex < x.rows(), "--vertex out of range");
        std::vector<Index> cols(static_cast<size_t>(x.cols()));
        for (Index c = 0; c < x.cols(); ++c) cols[static_cast<size_t>(c)] = c;
        a = graphtopo::take(x, graphtopo::complement(x.rows(), {*vertex}), cols).transpose();
        y = x.row(*vertex).transpose();
      } else {
        graphtopo::detail::require(!a_path.empty() && !y_path.empty(), "need --a and --y (or --obs and --vertex)");
        a = io::read_csv(a_path);
        y = io::read_vector(y_path);
      }
      graphtopo::detail::require(a.rows() == y.size(), "A rows and y length differ");
      graphtopo::LassoConfig cfg;
      cfg.rho = rho;
      cfg.max_iter = max_iter;
      cfg.tol = tol;
      cfg.trace = true;
      run.parameters = {{"rho", rho}, {"max_iter", max_iter}, {"tol", tol}};
      if (run.dry_run) return;
      const auto r = graphtopo::lasso_ista(a, y, cfg);
      run.converged = r.converged;
      run.metrics["iterations"] = r.iterations;
      run.metrics["alpha"] = r.alpha;
      run.metrics["objective"] = r.objective;
      run.write_csv(out, r.x);
      for (size_t k = 0; k < r.objective.size(); ++k) run.plot.add(static_cast<double>(k), r.objective[k], "objective");
    });
  }

  {
    auto* s = learn->add_subcommand("glasso", "graphical LASSO precision matrix");
    static std::string corr, out, weights_out;
    static double rho = 0.0;
    static int max_sweeps = 100;
    s->add_option("--corr", corr, "correlation matrix R")->required();
    s->add_option("--rho", rho, "L1 weight")->capture_default_str();
    s->add_option("--max-sweeps", max_sweeps, "outer sweep cap")->capture_default_str();
    s->add_option("--weights-out", weights_out, "also write |off-diagonal| of the normalised precision");
    common(s, out, "Q.csv");
    on_run(s, "learn glasso", [] {
      const Matrix r = io::read_csv(corr);
      graphtopo::GlassoConfig cfg;
      cfg.rho = rho;
      cfg.max_sweeps = max_sweeps;
      graphtopo::detail::require(r.rows() == r.cols(), "correlation matrix must be square");
      run.parameters = {{"corr", corr}, {"rho", rho}, {"max_sweeps", max_sweeps}};
      if (run.dry_run) return;
      const auto g = graphtopo::glasso(r, cfg);
      run.converged = g.converged;
      run.metrics["sweeps"] = g.sweeps;
      run.metrics["condition"] = g.condition;
      run.write_csv(out, g.q);
      if (!weights_out.empty()) run.write_csv(weights_out, graphtopo::weights_of(graphtopo::normalize_precision(g.q)).cwiseAbs());
    });
  }

  {
    auto* s = learn->add_subcommand("regress", "per-vertex LASSO regression, geometric symmetrisation");
    static std::string obs, out, w_out = "W.csv", truth, negative = "clamp";
    static double rho = 0.0;
    static bool scale = true;
    s->add_option("--obs", obs, "observations X (N x P)")->required();
    s->add_option("--rho", rho, "L1 weight")->capture_default_str();
    s->add_option("--negative", negative, "negative coefficients: clamp | abs | error")->capture_default_str();
    s->add_flag("!--raw", scale, "regress on raw X instead of X/sqrt(P)");
    s->add_option("--weights-out", w_out, "weight matrix CSV")->capture_default_str();
    s->add_option("--truth", truth, "ground-truth W for MSE");
    common(s, out, "L.csv");
    on_run(s, "learn regress", [] {
      Matrix x = io::read_csv(obs);
      if (negative != "clamp" && negative != "abs" && negative != "error")
        throw graphtopo::InvalidArgument("--negative must be clamp, abs or error");
      run.parameters = {{"obs", obs}, {"rho", rho}, {"negative", negative}, {"scaled", scale}};
      if (run.dry_run) return;
      if (scale) x /= std::sqrt(static_cast<double>(x.cols()));
      graphtopo::RegressionConfig cfg;
      cfg.rho = rho;
      const auto r = graphtopo::neighborhood_regression(x, cfg);
      for (bool c : r.converged) run.converged = run.converged && c;
      run.metrics["iterations"] = r.iterations;
      const graphtopo::Graph g = negative == "abs" ? graphtopo::symmetrize_geometric(r.beta.cwiseAbs())
                                                   : graphtopo::symmetrize_geometric(r.beta, negative == "clamp");
      run.write_csv(out, graphtopo::laplacian(g).l);
      run.write_csv(w_out, g.w());
      report_truth(truth, g.w());
    });
  }

  {
    auto* s = learn->add_subcommand("smooth", "alternating smoothness-constrained learning");
    static std::string obs, out, w_out = "W.csv", truth;
    static double alpha = 1.0, beta = 1.0;
    static int outer = 10;
    s->add_option("--obs", obs, "observations X (N x P)")->required();
    s->add_option("--alpha", alpha, "smoothness weight")->capture_default_str();
    s->add_option("--beta", beta, "Frobenius weight")->capture_default_str();
    s->add_option("--outer", outer, "alternations")->capture_default_str();
    s->add_option("--weights-out", w_out, "weight matrix CSV")->capture_default_str();
    s->add_option("--truth", truth, "ground-truth W for MSE");
    common(s, out, "L.csv");
    on_run(s, "learn smooth", [] {
      const Matrix x = io::read_csv(obs);
      graphtopo::SmoothLearnConfig cfg;
      cfg.alpha = alpha;
      cfg.beta = beta;
      cfg.outer_iters = outer;
      run.parameters = {{"obs", obs}, {"alpha", alpha}, {"beta", beta}, {"outer", outer}};
      if (run.dry_run) return;
      const auto r = graphtopo::smooth_learn(x, cfg);
      run.metrics["objective"] = r.objective;
      for (size_t k = 0; k < r.objective.size(); ++k) run.plot.add(static_cast<double>(k), r.objective[k], "objective");
      const Matrix w = graphtopo::weights_of(r.l.l);
      run.write_csv(out, r.l.l);
      run.write_csv(w_out, w);
      report_truth(truth, w);
    });
  }

  {
    auto* s = learn->add_subcommand("polyfit", "eigenvector method with polynomial eigenvalue fit");
    static std::string obs, corr, out, w_out = "W.csv", truth;
    static int order = 2, grid = 0;
    static bool full = false;
    s->add_option("--obs", obs, "observations X (N x P)");
    s->add_option("--corr", corr, "correlation matrix R (instead of --obs)");
    s->add_option("--order", order, "polynomial order M")->capture_default_str();
    s->add_option("--grid", grid, "xi grid points (0: default)")->capture_default_str();
    s->add_flag("--full", full, "optimise all eigenvalues instead of the polynomial fit");
    s->add_option("--weights-out", w_out, "weight matrix CSV")->capture_default_str();
    s->add_option("--truth", truth, "ground-truth W for MSE");
    common(s, out, "L.csv");
    on_run(s, "learn polyfit", [] {
      graphtopo::detail::require(obs.empty() != corr.empty(), "give exactly one of --obs and --corr");
      const Matrix r = corr.empty() ? graphtopo::correlation_matrix(io::read_csv(obs)) : io::read_csv(corr);
      run.parameters = {{"order", order}, {"grid", grid}, {"full", full}};
      if (run.dry_run) return;
      Matrix l;
      if (full) {
        const auto f = graphtopo::spectral_topology_full(r);
        l = f.l.l;
        run.metrics["objective"] = f.objective;
        run.metrics["lowpass"] = f.lowpass;
      } else {
        graphtopo::PolyFitConfig cfg;
        cfg.m = order;
        cfg.grid_points = grid;
        const auto f = graphtopo::polynomial_fit_eigenvalues(r, cfg);
        l = f.l.l;
        run.metrics["objective"] = f.objective;
        run.metrics["xi"] = f.xi;
        run.metrics["knots"] = f.knots;
        for (size_t k = 0; k < f.curve.size(); ++k) run.plot.add(static_cast<double>(k), f.curve[k].second, "sparsity");
      }
      const Matrix w = graphtopo::weights_of(l).cwiseAbs();
      run.write_csv(out, l);
      run.write_csv(w_out, w);
      report_truth(truth, w);
    });
  }

  {
    auto* s = learn->add_subcommand("sources", "Laplacian from signals and known sources (L X = J)");
    static std::string obs, sources, out, w_out = "W.csv", truth;
    static std::optional<double> rho;
    s->add_option("--obs", obs, "observations X (N x P)")->required();
    s->add_option("--sources", sources, "sources J (N x P)")->required();
    s->add_option("--rho", rho, "force the LASSO branch with this L1 weight");
    s->add_option("--weights-out", w_out, "weight matrix CSV")->capture_default_str();
    s->add_option("--truth", truth, "ground-truth W for MSE");
    common(s, out, "L.csv");
    on_run(s, "learn sources", [] {
      const Matrix x = io::read_csv(obs), j = io::read_csv(sources);
      graphtopo::detail::require(x.rows() == j.rows() && x.cols() == j.cols(), "X and J shapes differ");
      run.parameters = {{"obs", obs}, {"sources", sources}};
      if (rho) run.parameters["rho"] = *rho;
      if (run.dry_run) return;
      const auto r = graphtopo::learn_from_sources(x, j, rho);
      run.metrics["asymmetry"] = r.asymmetry;
      run.metrics["used_lasso"] = r.used_lasso;
      run.metrics["rank"] = r.rank;
      run.metrics["rank_deficient"] = r.rank_deficient;
      const Matrix w = graphtopo::weights_of(r.l.l);
      run.write_csv(out, r.l.l);
      run.write_csv(w_out, w);
      report_truth(truth, w);
    });
  }
}

// ---------------------------------------------------------------- solve

void add_solve(CLI::App& app) {
  auto* solve = app.add_subcommand("solve", "physical systems on graphs");
  solve->require_subcommand(1);

  {
    auto* s = solve->add_subcommand("circuit", "node voltages from pinned vertices and current sources");
    static std::string graph, bc, src, out;
    s->add_option("--graph", graph, "graph JSON")->required();
    s->add_option("--bc", bc, "pinned vertices CSV (vertex,value)")->required();
    s->add_option("--sources", src, "current source vector CSV");
    common(s, out, "x.csv");
    on_run(s, "solve circuit", [] {
      const auto g = io::read_graph(graph);
      const auto b = read_bc(bc);
      std::optional<graphtopo::SourceVector> sv;
      if (!src.empty()) sv = graphtopo::SourceVector(io::read_vector(src), false);
      run.parameters = {{"graph", graph}, {"bc", bc}};
      if (run.dry_run) return;
      const Vector x = graphtopo::circuit_solve(graphtopo::laplacian(g), b, sv);
      run.write_csv(out, x);
      run.plot.add_vector(x, "voltage");
    });
  }

  {
    auto* s = solve->add_subcommand("absorb", "absorbing probabilities");
    static std::string graph, bc, out;
    s->add_option("--graph", graph, "graph JSON")->required();
    s->add_option("--bc", bc, "absorbing vertices CSV (vertex,value)")->required();
    common(s, out, "x.csv");
    on_run(s, "solve absorb", [] {
      const auto g = io::read_graph(graph);
      const auto b = read_bc(bc);
      run.parameters = {{"graph", graph}, {"bc", bc}};
      if (run.dry_run) return;
      const Vector x = graphtopo::absorbing_probabilities(g, b);
      run.write_csv(out, x);
      run.plot.add_vector(x, "probability");
    });
  }

  {
    auto* s = solve->add_subcommand("hitting", "expected hitting times of a target vertex");
    static std::string graph, out;
    static Index target = 0;
    s->add_option("--graph", graph, "graph JSON")->required();
    s->add_option("--target", target, "target vertex")->required();
    common(s, out, "h.csv");
    on_run(s, "solve hitting", [] {
      const auto g = io::read_graph(graph);
      graphtopo::detail::require(target >= 0 && target < g.n(), "--target out of range");
      run.parameters = {{"graph", graph}, {"target", target}};
      if (run.dry_run) return;
      const Vector h = graphtopo::hitting_times(g, target);
      run.write_csv(out, h);
      run.plot.add_vector(h, "hitting_time");
    });
  }

  {
    auto* s = solve->add_subcommand("commute", "effective resistance and commute time of a vertex pair");
    static std::string graph, out;
    static Index from = 0, to = 0;
    s->add_option("--graph", graph, "graph JSON")->required();
    s->add_option("--from", from, "first vertex")->required();
    s->add_option("--to", to, "second vertex")->required();
    common(s, out, "commute.csv");
    on_run(s, "solve commute", [] {
      const auto g = io::read_graph(graph);
      graphtopo::detail::require(from >= 0 && from < g.n() && to >= 0 && to < g.n(), "vertex out of range");
      run.parameters = {{"graph", graph}, {"from", from}, {"to", to}};
      if (run.dry_run) return;
      const double r = graphtopo::effective_resistance(g, from, to);
      const double ct = graphtopo::commute_time(g, from, to);
      run.metrics["effective_resistance"] = r;
      run.metrics["commute_time"] = ct;
      Matrix m(1, 2);
      m << r, ct;
      run.write_csv(out, m);
    });
  }

  {
    auto* s = solve->add_subcommand("pagerank", "PageRank of a directed graph");
    static std::string graph, out;
    static bool damped = false;
    static double tol = 1e-6, teleport = 0.15;
    static int max_iter = 1000;
    s->add_option("--graph", graph, "directed graph JSON (edge i,j,w means i links to j)")->required();
    s->add_flag("--damped", damped, "use the teleporting (damped) operator");
    s->add_option("--teleport", teleport, "teleport probability")->capture_default_str();
    s->add_option("--tol", tol, "stopping tolerance")->capture_default_str();
    s->add_option("--max-iter", max_iter, "iteration cap")->capture_default_str();
    common(s, out, "rank.csv");
    on_run(s, "solve pagerank", [] {
      const auto g = io::digraph_from_json(io::read_json(graph));
      graphtopo::PagerankConfig cfg;
      cfg.damped = damped;
      cfg.teleport = teleport;
      cfg.scale = 1.0 - teleport;
      cfg.tol = tol;
      cfg.max_iter = max_iter;
      run.parameters = {{"graph", graph}, {"damped", damped}, {"tol", tol}};
      if (damped) run.parameters["teleport"] = teleport;
      if (run.dry_run) return;
      const auto r = graphtopo::pagerank(g, cfg);
      run.converged = r.converged;
      run.metrics["iterations"] = r.iterations;
      if (!r.converged) throw graphtopo::NumericalError("pagerank did not converge in " + std::to_string(max_iter) + " iterations");
      run.write_csv(out, r.x);
      run.plot.add_vector(r.x, "rank");
    });
  }

  {
    auto* s = solve->add_subcommand("propagate", "label propagation");
    static std::string graph, labels, out;
    static bool closed = false;
    s->add_option("--graph", graph, "graph JSON")->required();
    s->add_option("--labels", labels, "labeled vertices CSV (vertex,value)")->required();
    s->add_flag("--closed-form", closed, "solve the harmonic system directly");
    common(s, out, "x.csv");
    on_run(s, "solve propagate", [] {
      const auto g = io::read_graph(graph);
      const auto b = read_bc(labels);
      run.parameters = {{"graph", graph}, {"labels", labels}, {"closed_form", closed}};
      if (run.dry_run) return;
      Vector x;
      if (closed) {
        x = graphtopo::label_propagation_closed_form(g, b);
      } else {
        const auto r = graphtopo::label_propagation(g, b);
        run.converged = r.converged;
        run.metrics["iterations"] = r.iterations;
        x = r.x;
      }
      run.write_csv(out, x);
      run.plot.add_vector(x, "label");
    });
  }

  {
    auto* s = solve->add_subcommand("denoise", "sparse-source denoising");
    static std::string graph, signal, out;
    static Index k = 1, reference = 0;
    s->add_option("--graph", graph, "graph JSON")->required();
    s->add_option("--signal", signal, "noisy signal CSV")->required();
    s->add_option("--k", k, "number of sources kept")->required();
    s->add_option("--reference", reference, "reference vertex")->capture_default_str();
    common(s, out, "x.csv");
    on_run(s, "solve denoise", [] {
      const auto g = io::read_graph(graph);
      const Vector y = io::read_vector(signal);
      graphtopo::detail::require(y.size() == g.n(), "signal length differs from graph size");
      run.parameters = {{"graph", graph}, {"signal", signal}, {"k", k}, {"reference", reference}};
      if (run.dry_run) return;
      const Vector x = graphtopo::sparse_source_denoise(graphtopo::laplacian(g), y, k, reference);
      run.write_csv(out, x);
      run.plot.add_vector(y, "noisy");
      run.plot.add_vector(x, "denoised");
    });
  }
}

// ---------------------------------------------------------------- lattice

void add_lattice(CLI::App& app) {
  auto* lat = app.add_subcommand("lattice", "lattice graphs and their Fourier basis");
  lat->require_subcommand(1);

  {
    auto* s = lat->add_subcommand("gdft", "separable graph Fourier basis of a lattice");
    static std::string dims, out, values = "lambda.csv";
    s->add_option("--dims", dims, "path lengths, e.g. 3,4,2")->required();
    s->add_option("--values", values, "eigenvalue CSV")->capture_default_str();
    common(s, out, "U.csv");
    on_run(s, "lattice gdft", [] {
      const graphtopo::Lattice l{parse_index_list(dims)};
      l.validate();
      run.parameters = {{"dims", l.dims}};
      if (run.dry_run) return;
      const auto d = graphtopo::separable_gdft(l);
      run.write_csv(out, d.vectors);
      run.write_csv(values, d.values);
      run.plot.add_vector(d.values, "eigenvalue");
    });
  }

  {
    auto* s = lat->add_subcommand("subsample", "induced subgraph on kept vertices");
    static std::string graph, keep, out;
    s->add_option("--graph", graph, "graph JSON")->required();
    s->add_option("--keep", keep, "kept vertices, comma separated")->required();
    common(s, out, "graph.json");
    on_run(s, "lattice subsample", [] {
      const auto g = io::read_graph(graph);
      const graphtopo::SamplingMap map{parse_index_list(keep)};
      run.parameters = {{"graph", graph}, {"keep", map.kept}};
      const auto sub = graphtopo::subsample(g, map);  // validates
      if (run.dry_run) return;
      io::write_graph(out, sub);
      run.outputs.push_back(out);
    });
  }
}

// ---------------------------------------------------------------- portfolio

void add_portfolio(CLI::App& app) {
  auto* pf = app.add_subcommand("portfolio", "spectral portfolio cuts");
  pf->require_subcommand(1);

  static std::string returns, kind = "cutn", scheme = "as1", select = "size";
  static int cuts = 1;
  auto shared = [](CLI::App* s, bool with_scheme) {
    s->add_option("--returns", returns, "returns CSV (T x N, one column per asset)")->required();
    s->add_option("--cuts", cuts, "number of bisections K")->capture_default_str();
    s->add_option("--kind", kind, "cutn | cutv")->capture_default_str();
    s->add_option("--select", select, "leaf to split next: size | volume")->capture_default_str();
    if (with_scheme) s->add_option("--scheme", scheme, "as1 | as2")->capture_default_str();
  };
  auto tree_of = [](const Matrix& r) {
    return graphtopo::repeated_cuts(graphtopo::market_graph(r), cuts, parse_select(select), parse_cut_kind(kind));
  };

  {
    auto* s = pf->add_subcommand("cut", "repeated spectral bisection of the market graph");
    static std::string out, tree_out = "tree.json";
    shared(s, false);
    s->add_option("--tree", tree_out, "cut tree JSON")->capture_default_str();
    common(s, out, "clusters.csv");
    on_run(s, "portfolio cut", [tree_of] {
      const Matrix r = io::read_csv(returns);
      parse_cut_kind(kind);
      parse_select(select);
      run.parameters = {{"returns", returns}, {"cuts", cuts}, {"kind", kind}, {"select", select}};
      if (run.dry_run) return;
      const auto t = tree_of(r);
      Vector leaf_of(t.vertex_count());
      const auto leaves = t.leaves();
      for (size_t k = 0; k < leaves.size(); ++k)
        for (Index v : t.nodes[leaves[k]].vertices) leaf_of(v) = static_cast<double>(k);
      run.write_csv(out, leaf_of);
      run.write_text(tree_out, tree_json(t).dump(2) + "\n");
      run.metrics["warnings"] = t.warnings;
    });
  }

  {
    auto* s = pf->add_subcommand("allocate", "cluster-based allocation weights");
    static std::string out;
    shared(s, true);
    common(s, out, "weights.csv");
    on_run(s, "portfolio allocate", [tree_of] {
      const Matrix r = io::read_csv(returns);
      const auto sc = parse_scheme(scheme);
      parse_cut_kind(kind);
      parse_select(select);
      run.parameters = {{"returns", returns}, {"cuts", cuts}, {"kind", kind}, {"scheme", scheme}, {"select", select}};
      if (run.dry_run) return;
      const Vector w = graphtopo::allocate(tree_of(r), sc);
      run.write_csv(out, w);
      run.plot.add_vector(w, "weight");
    });
  }

  {
    auto* s = pf->add_subcommand("backtest", "in-sample fit, out-of-sample Sharpe ratios");
    static std::string out;
    static Index split = 0;
    static double annualization = 1.0;
    shared(s, true);
    s->add_option("--split", split, "rows used in-sample (default: first half)");
    s->add_option("--annualization", annualization, "periods per year for the Sharpe ratio")->capture_default_str();
    common(s, out, "sharpe.csv");
    on_run(s, "portfolio backtest", [tree_of] {
      const Matrix r = io::read_csv(returns);
      const auto sc = parse_scheme(scheme);
      parse_cut_kind(kind);
      parse_select(select);
      const Index t_in = split > 0 ? split : r.rows() / 2;
      graphtopo::detail::require(t_in >= 2 && r.rows() - t_in >= 2, "--split must leave at least 2 rows on each side");
      run.parameters = {{"returns", returns}, {"cuts", cuts}, {"kind", kind}, {"scheme", scheme}, {"split", t_in}};
      if (run.dry_run) return;
      const Matrix in = r.topRows(t_in), outs = r.bottomRows(r.rows() - t_in);
      const Vector w_cut = graphtopo::allocate(tree_of(in), sc);
      const Vector w_eq = Vector::Constant(r.cols(), 1.0 / static_cast<double>(r.cols()));
      const Vector w_mv = graphtopo::min_variance_weights(graphtopo::return_covariance(in));
      Matrix m(3, 2);
      const Vector* ws[] = {&w_cut, &w_mv, &w_eq};
      const char* names[] = {"cut", "min_variance", "equal"};
      for (int i = 0; i < 3; ++i) {
        m(i, 0) = graphtopo::sharpe(in, *ws[i], annualization);
        m(i, 1) = graphtopo::sharpe(outs, *ws[i], annualization);
        run.metrics[names[i]] = {{"sharpe_in", m(i, 0)}, {"sharpe_out", m(i, 1)}};
        const Vector cum = [&] {
          Vector c = outs * *ws[i];
          for (Index k = 1; k < c.size(); ++k) c(k) += c(k - 1);
          return c;
        }();
        run.plot.add_vector(cum, names[i]);
      }
      run.metrics["rows"] = {"cut", "min_variance", "equal"};
      run.write_csv(out, m);
    });
  }
}

// ---------------------------------------------------------------- metro

void add_metro(CLI::App& app) {
  auto* mt = app.add_subcommand("metro", "transport network analysis");
  mt->require_subcommand(1);

  {
    auto* s = mt->add_subcommand("centrality", "betweenness and closeness vitality (hop distances)");
    static std::string graph, out;
    s->add_option("--graph", graph, "graph JSON")->required();
    common(s, out, "centrality.csv");
    on_run(s, "metro centrality", [] {
      const auto g = io::read_graph(graph);
      run.parameters = {{"graph", graph}};
      if (run.dry_run) return;
      Matrix m(g.n(), 2);
      m.col(0) = graphtopo::betweenness(g);
      m.col(1) = graphtopo::closeness_vitality(g);
      run.write_csv(out, m);
      run.plot.add_vector(m.col(0), "betweenness");
      run.plot.add_vector(m.col(1), "closeness_vitality");
    });
  }

  {
    auto* s = mt->add_subcommand("population", "vertex population from net flows (Fick law)");
    static std::string graph, flows, out;
    static double k = 1.0;
    s->add_option("--graph", graph, "graph JSON")->required();
    s->add_option("--flows", flows, "net inflow per vertex CSV")->required();
    s->add_option("--k", k, "diffusion constant")->capture_default_str();
    common(s, out, "population.csv");
    on_run(s, "metro population", [] {
      const auto g = io::read_graph(graph);
      const Vector q = io::read_vector(flows);
      graphtopo::detail::require(q.size() == g.n(), "flow vector length differs from graph size");
      run.parameters = {{"graph", graph}, {"flows", flows}, {"k", k}};
      if (run.dry_run) return;
      const Vector phi = graphtopo::fick_population(graphtopo::laplacian(g), q, k);
      run.write_csv(out, phi);
      run.plot.add_vector(phi, "population");
    });
  }
}

// ---------------------------------------------------------------- verify

void add_verify(CLI::App& app) {
  auto* s = app.add_subcommand("verify", "run the golden and property checks");
  static std::string out;
  common(s, out, "verify.csv");
  on_run(s, "verify", [] {
    if (run.dry_run) return;
    int failed = 0;
    Matrix m(0, 3);
    json checks = json::array();
    graphtopo::verify::run_all([&](const graphtopo::verify::CheckResult& r) {
      std::printf("[%s] %2d %s: %s (%.2f s)\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.detail.c_str(), r.seconds);
      std::fflush(stdout);
      if (!r.pass) ++failed;
      m.conservativeResize(m.rows() + 1, 3);
      m.row(m.rows() - 1) << r.id, r.pass ? 1.0 : 0.0, r.seconds;
      checks.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    });
    run.metrics["checks"] = checks;
    run.metrics["failed"] = failed;
    run.write_csv(out, m);
    if (failed > 0) throw graphtopo::NumericalError(std::to_string(failed) + " verification check(s) failed");
  });
}

void write_report(double seconds, const std::string& error) {
  if (run.command.empty()) return;
  json r;
  r["command"] = run.command;
  r["parameters"] = run.parameters;
  if (run.seed) {
    r["seed"] = *run.seed;
    r["rng"] = graphtopo::kRngName;
  }
  r["dry_run"] = run.dry_run;
  r["converged"] = run.converged;
  r["metrics"] = run.metrics;
  r["outputs"] = run.outputs;
  r["threads"] = graphtopo::max_threads();
  r["wall_time_s"] = seconds;
  if (!error.empty()) r["error"] = error;
  io::write_atomic(run.report_path, r.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graphtopo: graph topology learning and graph physics"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (0: all cores; GRAPHTOPO_THREADS overrides)");
  add_gen(app);
  add_learn(app);
  add_solve(app);
  add_lattice(app);
  add_portfolio(app);
  add_metro(app);
  add_verify(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (const char* env = std::getenv("GRAPHTOPO_THREADS")) {
    try {
      threads = static_cast<int>(io::parse_double(env));
    } catch (const std::exception&) {
      std::cerr << "graphtopo: GRAPHTOPO_THREADS is not a number\n";
      return 1;
    }
  }
  graphtopo::set_max_threads(threads > 0 ? static_cast<unsigned>(threads) : 0u);

  const auto t0 = std::chrono::steady_clock::now();
  int code = 0;
  std::string error;
  try {
    action();
  } catch (const graphtopo::NumericalError& e) {
    error = e.what();
    code = 2;
  } catch (const graphtopo::InvalidArgument& e) {
    error = e.what();
    code = 1;
  } catch (const std::exception& e) {
    error = e.what();
    code = 1;
  }
  if (!error.empty()) std::cerr << "graphtopo: " << error << "\n";
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  try {
    if (!run.plot_path.empty() && code == 0 && !run.dry_run) {
      std::string csv = "x,y,series\n";
      for (const auto& row : run.plot.rows) csv += row + "\n";
      io::write_atomic(run.plot_path, csv);
    }
    write_report(secs, error);
  } catch (const std::exception& e) {
    std::cerr << "graphtopo: " << e.what() << "\n";
    return code == 0 ? 1 : code;
  }
  return code;
}
