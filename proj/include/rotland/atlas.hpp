#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rotland/errors.hpp"
#include "rotland/gauge.hpp"
#include "rotland/graph.hpp"
#include "rotland/numerics.hpp"
#include "rotland/solver.hpp"

namespace rotland {

struct Minimum {
  Solution representative;     // lowest-cost member of the cluster
  double cost = 0.0;
  int multiplicity = 0;
  int representative_run = 0;  // run index of the representative
};

/// Deduplicated local minima of one campaign, with their quotient
/// distance matrix, 2D spectral embedding, and the %_max statistic.
struct MinimaAtlas {
  std::vector<Minimum> minima;  // sorted by cost ascending
  Eigen::MatrixXd dist;         // pairwise quotient distances of representatives
  Eigen::MatrixXd embedding;    // one 2D row per minimum
  double pct_max = 0.0;         // percent of converged runs at the top minimum
  int n_runs = 0;
  int n_converged = 0;
  int n_nonconverged = 0;
  int n_ambiguous_pairs = 0;    // alignments whose Karcher residual was flagged
};

struct Cluster {
  std::vector<int> members;  // indices into the input result list
  int representative = 0;    // member with the lowest cost (ties: lowest index)
};

/// Single-linkage clustering under quotient_distance < merge_tol,
/// computed as connected components via union-find. Pairs already in the
/// same component are skipped, which changes nothing in the result.
inline std::vector<Cluster> dedup(const std::vector<SolveResult>& results, double merge_tol) {
  if (merge_tol <= 0.0) throw InvalidParam("dedup: merge_tol must be > 0");
  const int k = static_cast<int>(results.size());
  std::vector<int> parent(k);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  };
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      if (find(i) == find(j)) continue;
      if (quotient_distance(results[i].solution, results[j].solution) < merge_tol) {
        parent[find(i)] = find(j);
      }
    }
  }
  std::vector<std::vector<int>> groups(k);
  for (int i = 0; i < k; ++i) groups[find(i)].push_back(i);

  std::vector<Cluster> clusters;
  for (auto& g : groups) {
    if (g.empty()) continue;
    Cluster c;
    c.members = std::move(g);
    c.representative = *std::min_element(
        c.members.begin(), c.members.end(), [&](int a, int b) {
          return std::make_pair(results[a].final_cost, a) <
                 std::make_pair(results[b].final_cost, b);
        });
    clusters.push_back(std::move(c));
  }
  std::sort(clusters.begin(), clusters.end(), [&](const Cluster& a, const Cluster& b) {
    return std::make_pair(results[a.representative].final_cost, a.representative) <
           std::make_pair(results[b.representative].final_cost, b.representative);
  });
  return clusters;
}

/// Diffusion-map embedding of a distance matrix. The kernel is
/// exp(-d^2 / sigma_d) with sigma_d unsquared in the denominator;
/// kernel_squared switches to the conventional sigma_d^2 variant. Top
/// (trivial) eigenvector skipped; each axis sign is fixed by forcing its
/// largest-magnitude coordinate positive.
inline Eigen::MatrixXd embed(const Eigen::MatrixXd& dist, double sigma_d,
                             bool kernel_squared = false) {
  if (sigma_d <= 0.0) throw InvalidParam("embed: sigma_d must be > 0");
  const int k = static_cast<int>(dist.rows());
  if (k < 1 || dist.cols() != k) throw InvalidParam("embed: dist must be square, >= 1 point");
  Eigen::MatrixXd coords = Eigen::MatrixXd::Zero(k, 2);
  if (k == 1) return coords;

  const double denom = kernel_squared ? sigma_d * sigma_d : sigma_d;
  const Eigen::MatrixXd kern = (-dist.array().square() / denom).exp();
  const Eigen::VectorXd deg = kern.rowwise().sum();
  const Eigen::VectorXd dinv_sqrt = deg.array().rsqrt();
  const Eigen::MatrixXd m = dinv_sqrt.asDiagonal() * kern * dinv_sqrt.asDiagonal();

  const SymEig eig = sym_eig(m);  // ascending; top eigenvector is trivial
  for (int axis = 0; axis < 2 && axis + 2 <= k; ++axis) {
    const int idx = k - 2 - axis;
    const double scale = std::sqrt(std::max(eig.eigenvalues(idx), 0.0));
    coords.col(axis) = eig.eigenvectors.col(idx) * scale;
  }
  for (int axis = 0; axis < 2; ++axis) {
    int best = 0;
    coords.col(axis).cwiseAbs().maxCoeff(&best);
    if (coords(best, axis) < 0.0) coords.col(axis) = -coords.col(axis);
  }
  return coords;
}

struct AtlasParams {
  int n_lm = 200;
  double merge_tol = 0.01;                 // radians of quotient distance
  double sigma_d = M_PI / 4.0;
  bool kernel_squared = false;
};

/// Full campaign pipeline: restart -> dedup -> distance matrix -> embed
/// -> stats. Non-converged runs are excluded from multiplicities and
/// tracked in the atlas counters.
inline MinimaAtlas build_atlas(const ViewGraph& vg, const SolveOptions& opts,
                               const AtlasParams& params) {
  const std::vector<SolveResult> all = random_restart_campaign(vg, opts, params.n_lm);

  std::vector<SolveResult> converged;
  std::vector<int> run_of;  // converged index -> run index
  for (int r = 0; r < static_cast<int>(all.size()); ++r) {
    if (all[r].converged) {
      converged.push_back(all[r]);
      run_of.push_back(r);
    }
  }
  MinimaAtlas atlas;
  atlas.n_runs = params.n_lm;
  atlas.n_converged = static_cast<int>(converged.size());
  atlas.n_nonconverged = params.n_lm - atlas.n_converged;
  if (converged.empty()) throw Error("build_atlas: no run converged");

  const std::vector<Cluster> clusters = dedup(converged, params.merge_tol);
  int max_mult = 0;
  for (const auto& c : clusters) {
    Minimum m;
    m.representative = converged[c.representative].solution;
    m.cost = converged[c.representative].final_cost;
    m.multiplicity = static_cast<int>(c.members.size());
    m.representative_run = run_of[c.representative];
    max_mult = std::max(max_mult, m.multiplicity);
    atlas.minima.push_back(std::move(m));
  }
  atlas.pct_max = 100.0 * max_mult / atlas.n_converged;

  const int k = static_cast<int>(atlas.minima.size());
  atlas.dist = Eigen::MatrixXd::Zero(k, k);
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      const AlignResult ar =
          align(atlas.minima[a].representative, atlas.minima[b].representative);
      if (ar.ambiguous) ++atlas.n_ambiguous_pairs;
      const double d = solution_distance(atlas.minima[a].representative, ar.aligned_b);
      atlas.dist(a, b) = d;
      atlas.dist(b, a) = d;
    }
  }
  atlas.embedding = embed(atlas.dist, params.sigma_d, params.kernel_squared);
  return atlas;
}

/// One graph family entry of a sweep grid.
struct SweepGraphSpec {
  std::string type;      // "ws" or "gnm"
  int n = 40;
  int k = 16;            // ws only
  double p_rewire = 0.0; // ws only
  int m = 0;             // gnm only
};

struct SweepCell {
  int graph_index = 0;
  std::uint64_t seed = 0;
  double lambda2 = 0.0;
  double sigma_n_deg = 0.0;
  double pct_max = 0.0;
  int n_minima = 0;
  MinimaAtlas atlas;
  bool failed = false;
  std::string error;
};

inline Topology make_topology(const SweepGraphSpec& g, RandomSource& rng) {
  if (g.type == "ws") return gen_watts_strogatz(g.n, g.k, g.p_rewire, rng);
  if (g.type == "gnm") return gen_gnm(g.n, g.m, rng);
  throw InvalidParam("unknown graph type: " + g.type);
}

/// Supplemental-style sweep: one topology per (graph spec, seed), held
/// fixed across the noise grid; one campaign per cell. Cell failures are
/// recorded and the sweep continues.
inline std::vector<SweepCell> sweep(const std::vector<SweepGraphSpec>& graphs,
                                    const std::vector<double>& sigma_n_deg,
                                    const std::vector<std::uint64_t>& seeds,
                                    const SolveOptions& base_opts, const AtlasParams& params,
                                    double outlier_fraction = 0.0) {
  if (graphs.empty() || sigma_n_deg.empty() || seeds.empty()) {
    throw InvalidParam("sweep: empty grid");
  }
  std::vector<SweepCell> cells;
  for (int gi = 0; gi < static_cast<int>(graphs.size()); ++gi) {
    for (const std::uint64_t seed : seeds) {
      Topology topo;
      double lambda2 = std::numeric_limits<double>::quiet_NaN();
      bool topo_ok = true;
      std::string topo_err;
      try {
        RandomSource topo_rng = RandomSource::substream(seed, 0x10000u + gi);
        topo = make_topology(graphs[gi], topo_rng);
        lambda2 = sym_eig(laplacian(topo)).eigenvalues(1);
      } catch (const Error& e) {
        topo_ok = false;
        topo_err = e.what();
      }
      for (int si = 0; si < static_cast<int>(sigma_n_deg.size()); ++si) {
        SweepCell cell;
        cell.graph_index = gi;
        cell.seed = seed;
        cell.sigma_n_deg = sigma_n_deg[si];
        cell.lambda2 = lambda2;
        if (!topo_ok) {
          cell.failed = true;
          cell.error = topo_err;
          cells.push_back(std::move(cell));
          continue;
        }
        try {
          NoiseSpec noise;
          noise.sigma_n = sigma_n_deg[si] * M_PI / 180.0;
          noise.outlier_fraction = outlier_fraction;
          noise.seed = seed;
          RandomSource synth_rng =
              RandomSource::substream(seed, 0x20000u + 0x100u * gi + si);
          const SynthesisResult prob = synthesize(topo, noise, synth_rng);
          SolveOptions opts = base_opts;
          opts.seed = detail::mix_seed(seed, 0x30000u + 0x100u * gi + si);
          cell.atlas = build_atlas(prob.graph, opts, params);
          cell.pct_max = cell.atlas.pct_max;
          cell.n_minima = static_cast<int>(cell.atlas.minima.size());
        } catch (const Error& e) {
          cell.failed = true;
          cell.error = e.what();
        }
        cells.push_back(std::move(cell));
      }
    }
  }
  return cells;
}

}  // namespace rotland
