// rotland: generate, solve, map, certify, and sweep synthetic rotation
// averaging problems on SO(3)^n.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rotland/atlas.hpp"
#include "rotland/certify.hpp"
#include "rotland/cost.hpp"
#include "rotland/graph.hpp"
#include "rotland/io.hpp"
#include "rotland/solver.hpp"

namespace {

using rotland::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

std::string sidecar_path(const std::string& problem_path, const std::string& suffix) {
  std::string base = problem_path;
  const std::string ext = ".json";
  if (base.size() > ext.size() && base.substr(base.size() - ext.size()) == ext) {
    base = base.substr(0, base.size() - ext.size());
  }
  return base + suffix;
}

json base_meta(const std::string& command, std::uint64_t seed) {
  return json{{"tool", "rotland"},
              {"version", rotland::kArtifactVersion},
              {"command", command},
              {"seed", seed}};
}

struct GenerateArgs {
  std::string graph = "ws";
  int n = 40;
  int k = 16;
  double p_rewire = 0.0;
  int m = 0;
  double sigma_n_deg = 0.0;
  double outlier_frac = 0.0;
  std::uint64_t seed = 0;
  std::string out = "problem.json";
};

int run_generate(const GenerateArgs& a) {
  rotland::RandomSource topo_rng = rotland::RandomSource::substream(a.seed, 0);
  rotland::Topology topo;
  if (a.graph == "ws") {
    topo = rotland::gen_watts_strogatz(a.n, a.k, a.p_rewire, topo_rng);
  } else if (a.graph == "gnm") {
    topo = rotland::gen_gnm(a.n, a.m, topo_rng);
  } else {
    throw rotland::InvalidParam("--graph must be ws or gnm");
  }
  rotland::NoiseSpec noise;
  noise.sigma_n = a.sigma_n_deg * M_PI / 180.0;
  noise.outlier_fraction = a.outlier_frac;
  noise.seed = a.seed;
  rotland::RandomSource synth_rng = rotland::RandomSource::substream(a.seed, 1);
  const rotland::SynthesisResult result = rotland::synthesize(topo, noise, synth_rng);

  json meta = base_meta("generate", a.seed);
  meta["graph"] = a.graph;
  meta["n"] = a.n;
  if (a.graph == "ws") {
    meta["k"] = a.k;
    meta["p_rewire"] = a.p_rewire;
  } else {
    meta["m"] = a.m;
  }
  meta["sigma_n_deg"] = a.sigma_n_deg;
  meta["sigma_n"] = noise.sigma_n;
  meta["outlier_fraction"] = a.outlier_frac;
  meta["ground_truth"] = sidecar_path(a.out, ".ground_truth.json");

  rotland::write_problem(a.out, result.graph, meta);
  rotland::write_solution(sidecar_path(a.out, ".ground_truth.json"), result.ground_truth);
  std::cout << "wrote " << a.out << " (" << result.graph.num_vertices() << " vertices, "
            << result.graph.num_edges() << " edges)\n";
  return kExitOk;
}

struct SolveArgs {
  std::string problem;
  double p = 2.0;
  std::string init = "random";
  std::string init_file;
  std::uint64_t seed = 0;
  std::string out = "solution.json";
};

int run_solve(const SolveArgs& a) {
  const rotland::ProblemFile prob = rotland::read_problem(a.problem);
  rotland::Solution init;
  if (a.init == "random") {
    rotland::RandomSource rng = rotland::RandomSource::substream(a.seed, 0);
    for (int v = 0; v < prob.graph.num_vertices(); ++v) {
      init.rotations.push_back(rotland::random_uniform(rng));
    }
  } else if (a.init == "ground-truth") {
    init = rotland::read_solution(sidecar_path(a.problem, ".ground_truth.json"));
  } else if (a.init == "file") {
    if (a.init_file.empty()) throw rotland::InvalidParam("--init file requires --init-file");
    init = rotland::read_solution(a.init_file);
  } else {
    throw rotland::InvalidParam("--init must be random, ground-truth, or file");
  }
  if (init.size() != prob.graph.num_vertices()) {
    throw rotland::InvalidParam("initial solution length does not match problem");
  }

  rotland::SolveOptions opts;
  opts.p = a.p;
  opts.seed = a.seed;
  const rotland::SolveResult res = rotland::solve_local(prob.graph, init, opts);

  rotland::write_solution(a.out, res.solution);
  json meta = base_meta("solve", a.seed);
  meta["problem"] = a.problem;
  meta["p"] = a.p;
  meta["init"] = a.init;
  json result{{"meta", std::move(meta)},
              {"final_cost", res.final_cost},
              {"converged", res.converged},
              {"iters", res.iters},
              {"final_grad_norm", res.final_grad_norm},
              {"near_zero_residual", res.near_zero_residual},
              {"solution", a.out}};
  rotland::write_text_file(sidecar_path(a.out, ".result.json"), result.dump(2) + "\n");

  std::cout << "final cost = " << rotland::format_g17(res.final_cost) << "\n";
  std::cout << (res.converged ? "converged" : "did NOT converge") << " after " << res.iters
            << " iterations (grad norm " << res.final_grad_norm << ")\n";
  return kExitOk;
}

struct MapArgs {
  std::string problem;
  double p = 2.0;
  int restarts = 200;
  double merge_tol = 0.01;
  double sigma_d = M_PI / 4.0;
  bool kernel_squared = false;
  std::uint64_t seed = 0;
  std::string out_dir = "atlas";
};

int run_map(const MapArgs& a) {
  if (a.sigma_d <= 0.0) throw rotland::InvalidParam("--sigma-d must be > 0");
  if (a.merge_tol <= 0.0) throw rotland::InvalidParam("--merge-tol must be > 0");
  const rotland::ProblemFile prob = rotland::read_problem(a.problem);

  rotland::SolveOptions opts;
  opts.p = a.p;
  opts.seed = a.seed;
  rotland::AtlasParams params;
  params.n_lm = a.restarts;
  params.merge_tol = a.merge_tol;
  params.sigma_d = a.sigma_d;
  params.kernel_squared = a.kernel_squared;

  std::filesystem::create_directories(a.out_dir);
  const std::vector<rotland::SolveResult> runs =
      rotland::random_restart_campaign(prob.graph, opts, params.n_lm);
  rotland::write_campaign(a.out_dir + "/runs.jsonl", a.out_dir + "/solutions.json", runs);

  // Reuses the campaign RNG schedule, so the atlas matches runs.jsonl.
  const rotland::MinimaAtlas atlas = rotland::build_atlas(prob.graph, opts, params);

  json meta = base_meta("map", a.seed);
  meta["problem"] = a.problem;
  meta["p"] = a.p;
  meta["restarts"] = a.restarts;
  meta["merge_tol"] = a.merge_tol;
  meta["sigma_d"] = a.sigma_d;
  meta["kernel_squared"] = a.kernel_squared;
  rotland::write_atlas_files(a.out_dir, atlas, meta);

  std::cout << "pct_max = " << atlas.pct_max << "\n";
  std::cout << "minima = " << atlas.minima.size() << " (" << atlas.n_converged << "/"
            << atlas.n_runs << " runs converged)\n";
  return kExitOk;
}

struct CertifyArgs {
  std::string problem;
  std::string solution;
  double p = 2.0;
  std::string out = "report.json";
  std::string dump_hessian;
};

int run_certify(const CertifyArgs& a) {
  const rotland::ProblemFile prob = rotland::read_problem(a.problem);
  const rotland::Solution sol = rotland::read_solution(a.solution);
  if (sol.size() != prob.graph.num_vertices()) {
    throw rotland::InvalidParam("solution length does not match problem");
  }

  if (!a.dump_hessian.empty()) {
    rotland::write_text_file(a.dump_hessian,
                             rotland::hessian_to_csv(rotland::hessian(prob.graph, sol, a.p)));
  }

  const rotland::ConvexityReport rep = rotland::certify(prob.graph, sol, a.p);
  json j = rotland::report_to_json(rep);
  j["meta"] = base_meta("certify", 0);
  j["meta"]["problem"] = a.problem;
  j["meta"]["solution"] = a.solution;
  j["meta"]["p"] = a.p;
  rotland::write_text_file(a.out, j.dump(2) + "\n");

  auto verdict = [](bool pass, const std::string& err) {
    if (!err.empty()) return "ERROR (" + err + ")";
    return std::string(pass ? "PASS" : "FAIL");
  };
  std::cout << "exact      min eig = " << rep.exact_min_eig << "  "
            << verdict(rep.exact_min_eig > 0.0, rep.exact_error) << "\n";
  std::cout << "lnorm      min = " << rep.lnorm_min << " (need > 1)  "
            << verdict(rep.lnorm_pass, rep.lnorm_error) << "\n";
  std::cout << "separated  lhs = " << rep.separated_lhs << "  rhs = " << rep.separated_rhs
            << "  " << verdict(rep.separated_pass, rep.separated_error) << "\n";
  return kExitOk;
}

struct SweepArgs {
  std::string spec;
  std::string out_dir = "sweep";
};

int run_sweep(const SweepArgs& a) {
  const json spec = rotland::read_json_file(a.spec);
  std::vector<rotland::SweepGraphSpec> graphs;
  for (const auto& g : spec.value("graphs", json::array())) {
    rotland::SweepGraphSpec gs;
    gs.type = g.value("type", "ws");
    gs.n = g.value("n", 40);
    gs.k = g.value("k", 16);
    gs.p_rewire = g.value("p_rewire", 0.0);
    gs.m = g.value("m", 0);
    graphs.push_back(std::move(gs));
  }
  std::vector<double> sigma_n_deg = spec.value("sigma_n_deg", std::vector<double>{});
  std::vector<std::uint64_t> seeds = spec.value("seeds", std::vector<std::uint64_t>{1});
  if (graphs.empty() || sigma_n_deg.empty() || seeds.empty()) {
    throw rotland::InvalidParam("sweep spec needs non-empty graphs, sigma_n_deg, seeds");
  }

  rotland::SolveOptions opts;
  opts.p = spec.value("p", 2.0);
  rotland::AtlasParams params;
  params.n_lm = spec.value("n_lm", 200);
  params.merge_tol = spec.value("merge_tol", 0.01);
  params.sigma_d = spec.value("sigma_d", M_PI / 4.0);
  const double outlier_frac = spec.value("outlier_frac", 0.0);

  std::filesystem::create_directories(a.out_dir);
  const std::vector<rotland::SweepCell> cells =
      rotland::sweep(graphs, sigma_n_deg, seeds, opts, params, outlier_frac);

  rotland::write_text_file(a.out_dir + "/sweep.csv", rotland::sweep_to_csv(cells));
  int failures = 0;
  for (const auto& c : cells) {
    if (c.failed) {
      ++failures;
      std::cerr << "cell (graph " << c.graph_index << ", sigma " << c.sigma_n_deg
                << " deg, seed " << c.seed << ") failed: " << c.error << "\n";
      continue;
    }
    std::ostringstream dir;
    dir << a.out_dir << "/cell_g" << c.graph_index << "_s" << c.sigma_n_deg << "_seed"
        << c.seed;
    std::filesystem::create_directories(dir.str());
    json meta = base_meta("sweep", c.seed);
    meta["spec"] = a.spec;
    meta["graph_index"] = c.graph_index;
    meta["sigma_n_deg"] = c.sigma_n_deg;
    meta["lambda2"] = c.lambda2;
    rotland::write_atlas_files(dir.str(), c.atlas, meta);
  }
  std::cout << "wrote " << a.out_dir << "/sweep.csv with "
            << (cells.size() - static_cast<std::size_t>(failures)) << " rows (" << failures
            << " failed cells)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Landscape mapping and local-convexity certification for "
               "geodesic rotation averaging"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* cmd_gen = app.add_subcommand("generate", "Generate a synthetic problem instance");
  cmd_gen->add_option("--graph", gen.graph, "Graph family: ws or gnm")->required();
  cmd_gen->add_option("--n", gen.n, "Vertex count");
  cmd_gen->add_option("--k", gen.k, "Watts-Strogatz neighbor count (even)");
  cmd_gen->add_option("--p-rewire", gen.p_rewire, "Watts-Strogatz rewiring probability");
  cmd_gen->add_option("--m", gen.m, "G_nm edge count");
  cmd_gen->add_option("--sigma-n-deg", gen.sigma_n_deg, "Inlier noise std-dev, degrees");
  cmd_gen->add_option("--outlier-frac", gen.outlier_frac, "Outlier edge fraction");
  cmd_gen->add_option("--seed", gen.seed, "RNG seed");
  cmd_gen->add_option("--out", gen.out, "Output problem file");

  SolveArgs solve;
  CLI::App* cmd_solve = app.add_subcommand("solve", "Run one local solve");
  cmd_solve->add_option("--problem", solve.problem, "Problem file")->required();
  cmd_solve->add_option("--p", solve.p, "Cost exponent (> 1)");
  cmd_solve->add_option("--init", solve.init, "random | ground-truth | file");
  cmd_solve->add_option("--init-file", solve.init_file, "Initial solution file");
  cmd_solve->add_option("--seed", solve.seed, "RNG seed for random init");
  cmd_solve->add_option("--out", solve.out, "Output solution file");

  MapArgs map;
  CLI::App* cmd_map = app.add_subcommand("map", "Map the local-minima landscape");
  cmd_map->add_option("--problem", map.problem, "Problem file")->required();
  cmd_map->add_option("--p", map.p, "Cost exponent (> 1)");
  cmd_map->add_option("--restarts", map.restarts, "Number of random restarts");
  cmd_map->add_option("--merge-tol", map.merge_tol, "Dedup quotient-distance threshold");
  cmd_map->add_option("--sigma-d", map.sigma_d, "Diffusion kernel width (radians)");
  cmd_map->add_flag("--kernel-squared", map.kernel_squared,
                    "Use sigma_d^2 in the kernel denominator");
  cmd_map->add_option("--seed", map.seed, "Campaign seed");
  cmd_map->add_option("--out-dir", map.out_dir, "Output directory");

  CertifyArgs certify;
  CLI::App* cmd_certify = app.add_subcommand("certify", "Certify local convexity");
  cmd_certify->add_option("--problem", certify.problem, "Problem file")->required();
  cmd_certify->add_option("--solution", certify.solution, "Solution file")->required();
  cmd_certify->add_option("--p", certify.p, "Cost exponent (> 1)");
  cmd_certify->add_option("--out", certify.out, "Report JSON path");
  cmd_certify->add_option("--dump-hessian", certify.dump_hessian,
                          "Also write the dense Hessian as CSV");

  SweepArgs sweep;
  CLI::App* cmd_sweep = app.add_subcommand("sweep", "Run a (graph x noise) sweep grid");
  cmd_sweep->add_option("--spec", sweep.spec, "Sweep spec JSON")->required();
  cmd_sweep->add_option("--out-dir", sweep.out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (cmd_gen->parsed()) return run_generate(gen);
    if (cmd_solve->parsed()) return run_solve(solve);
    if (cmd_map->parsed()) return run_map(map);
    if (cmd_certify->parsed()) return run_certify(certify);
    if (cmd_sweep->parsed()) return run_sweep(sweep);
  } catch (const rotland::InvalidParam& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const rotland::Error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
