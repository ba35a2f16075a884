#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rotland/errors.hpp"
#include "rotland/rng.hpp"
#include "rotland/so3.hpp"

namespace rotland {

/// Bare graph topology: vertex count plus canonical (i < j) edge list,
/// sorted. Not necessarily connected; connectivity is enforced by the
/// generators and by the ViewGraph constructor.
struct Topology {
  int n = 0;
  std::vector<std::pair<int, int>> edges;
};

inline bool is_connected(int n, const std::vector<std::pair<int, int>>& edges) {
  if (n <= 0) return false;
  if (n == 1) return true;
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  };
  int components = n;
  for (const auto& [i, j] : edges) {
    const int a = find(i), b = find(j);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

inline bool is_connected(const Topology& t) { return is_connected(t.n, t.edges); }

namespace detail {

inline std::vector<std::pair<int, int>> canonical_edges(std::vector<std::pair<int, int>> edges) {
  for (auto& e : edges) {
    if (e.first > e.second) std::swap(e.first, e.second);
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

// Uniform labeled tree on n vertices, decoded from a random Pruefer
// sequence. This is exactly the uniform distribution over connected
// graphs with n-1 edges.
inline Topology pruefer_tree(int n, RandomSource& rng) {
  Topology t;
  t.n = n;
  if (n == 1) return t;
  if (n == 2) {
    t.edges = {{0, 1}};
    return t;
  }
  std::vector<int> seq(n - 2);
  for (int& a : seq) a = static_cast<int>(rng.integer(static_cast<std::uint64_t>(n)));
  std::vector<int> degree(n, 1);
  for (int a : seq) ++degree[a];
  std::set<int> leaves;
  for (int v = 0; v < n; ++v) {
    if (degree[v] == 1) leaves.insert(v);
  }
  for (int a : seq) {
    const int leaf = *leaves.begin();
    leaves.erase(leaves.begin());
    t.edges.emplace_back(std::min(leaf, a), std::max(leaf, a));
    if (--degree[a] == 1) leaves.insert(a);
  }
  const int u = *leaves.begin();
  const int v = *std::next(leaves.begin());
  t.edges.emplace_back(std::min(u, v), std::max(u, v));
  t.edges = canonical_edges(std::move(t.edges));
  return t;
}

}  // namespace detail

/// Watts-Strogatz small-world topology: a ring lattice where each vertex
/// connects to its k nearest neighbours, then each lattice edge is
/// rewired with probability p_rewire (the far endpoint is replaced with
/// a uniformly random non-duplicate, non-self vertex). Regenerates on
/// disconnection, bounded retries.
inline Topology gen_watts_strogatz(int n, int k, double p_rewire, RandomSource& rng) {
  if (n < 3) throw InvalidParam("gen_watts_strogatz: need n >= 3");
  if (k <= 0 || k % 2 != 0) throw InvalidParam("gen_watts_strogatz: k must be positive and even");
  if (k >= n) throw InvalidParam("gen_watts_strogatz: need k < n");
  if (p_rewire < 0.0 || p_rewire > 1.0) {
    throw InvalidParam("gen_watts_strogatz: p_rewire must be in [0, 1]");
  }
  for (int attempt = 0; attempt < 200; ++attempt) {
    std::vector<std::set<int>> adj(n);
    auto has = [&](int a, int b) { return adj[a].count(b) > 0; };
    auto add = [&](int a, int b) {
      adj[a].insert(b);
      adj[b].insert(a);
    };
    auto remove = [&](int a, int b) {
      adj[a].erase(b);
      adj[b].erase(a);
    };
    for (int i = 0; i < n; ++i) {
      for (int j = 1; j <= k / 2; ++j) add(i, (i + j) % n);
    }
    // One pass in lattice order; only the far endpoint moves.
    for (int i = 0; i < n; ++i) {
      for (int j = 1; j <= k / 2; ++j) {
        const int t = (i + j) % n;
        if (rng.uniform() >= p_rewire) continue;
        if (static_cast<int>(adj[i].size()) >= n - 1) continue;  // nowhere to rewire
        if (!has(i, t)) continue;                                // already rewired away
        int u;
        do {
          u = static_cast<int>(rng.integer(static_cast<std::uint64_t>(n)));
        } while (u == i || has(i, u));
        remove(i, t);
        add(i, u);
      }
    }
    Topology topo;
    topo.n = n;
    for (int i = 0; i < n; ++i) {
      for (int j : adj[i]) {
        if (i < j) topo.edges.emplace_back(i, j);
      }
    }
    std::sort(topo.edges.begin(), topo.edges.end());
    if (is_connected(topo)) return topo;
  }
  throw GenerationFailure("gen_watts_strogatz: no connected graph after 200 attempts");
}

/// G_nm topology: uniform over simple graphs with exactly n vertices and
/// m edges, conditioned on connectivity by rejection. The m = n-1 case
/// is sampled directly as a uniform labeled tree, since rejection is
/// hopeless there.
inline Topology gen_gnm(int n, int m, RandomSource& rng) {
  if (n < 1) throw InvalidParam("gen_gnm: need n >= 1");
  const long long max_edges = static_cast<long long>(n) * (n - 1) / 2;
  if (m < n - 1 || m > max_edges) {
    throw InvalidParam("gen_gnm: need n-1 <= m <= n(n-1)/2");
  }
  if (m == n - 1) return detail::pruefer_tree(n, rng);

  std::vector<std::pair<int, int>> all;
  all.reserve(static_cast<std::size_t>(max_edges));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) all.emplace_back(i, j);
  }
  for (int attempt = 0; attempt < 1000; ++attempt) {
    // Partial Fisher-Yates: the first m entries are a uniform m-subset.
    for (int t = 0; t < m; ++t) {
      const std::size_t pick =
          t + static_cast<std::size_t>(rng.integer(all.size() - static_cast<std::size_t>(t)));
      std::swap(all[t], all[pick]);
    }
    Topology topo;
    topo.n = n;
    topo.edges.assign(all.begin(), all.begin() + m);
    std::sort(topo.edges.begin(), topo.edges.end());
    if (is_connected(topo)) return topo;
  }
  throw GenerationFailure("gen_gnm: no connected graph after 1000 attempts");
}

/// An edge with its relative-rotation measurement, stored with i < j.
struct MeasuredEdge {
  int i = 0;
  int j = 0;
  Rotation measurement;  // measures R_i R_j^T
};

/// A rotation averaging problem instance: an undirected connected graph
/// with one relative-rotation measurement per edge. Edges are stored
/// canonically with i < j; querying (j, i) returns the transpose.
class ViewGraph {
 public:
  ViewGraph(int n, std::vector<MeasuredEdge> edges) : n_(n), edges_(std::move(edges)) {
    if (n_ < 1) throw InvalidParam("ViewGraph: need n >= 1");
    for (auto& e : edges_) {
      if (e.i == e.j) throw InvalidParam("ViewGraph: self-loop");
      if (e.i < 0 || e.j < 0 || e.i >= n_ || e.j >= n_) {
        throw InvalidParam("ViewGraph: vertex index out of range");
      }
      if (e.i > e.j) {
        std::swap(e.i, e.j);
        e.measurement = e.measurement.transposed();
      }
    }
    std::sort(edges_.begin(), edges_.end(),
              [](const MeasuredEdge& a, const MeasuredEdge& b) {
                return std::make_pair(a.i, a.j) < std::make_pair(b.i, b.j);
              });
    for (std::size_t t = 1; t < edges_.size(); ++t) {
      if (edges_[t].i == edges_[t - 1].i && edges_[t].j == edges_[t - 1].j) {
        throw InvalidParam("ViewGraph: duplicate edge");
      }
    }
    std::vector<std::pair<int, int>> bare;
    bare.reserve(edges_.size());
    for (const auto& e : edges_) bare.emplace_back(e.i, e.j);
    if (!is_connected(n_, bare)) throw InvalidParam("ViewGraph: graph is not connected");
  }

  int num_vertices() const { return n_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const std::vector<MeasuredEdge>& edges() const { return edges_; }

  bool has_edge(int i, int j) const { return find_edge(i, j) >= 0; }

  /// Measurement in the (i, j) direction; the stored transpose when the
  /// query is against the canonical orientation.
  Rotation measurement(int i, int j) const {
    if (i < j) {
      const int idx = find_edge(i, j);
      if (idx < 0) throw InvalidParam("ViewGraph: no such edge");
      return edges_[idx].measurement;
    }
    const int idx = find_edge(j, i);
    if (idx < 0) throw InvalidParam("ViewGraph: no such edge");
    return edges_[idx].measurement.transposed();
  }

  Topology topology() const {
    Topology t;
    t.n = n_;
    t.edges.reserve(edges_.size());
    for (const auto& e : edges_) t.edges.emplace_back(e.i, e.j);
    return t;
  }

 private:
  int find_edge(int i, int j) const {
    auto it = std::lower_bound(edges_.begin(), edges_.end(), std::make_pair(i, j),
                               [](const MeasuredEdge& e, const std::pair<int, int>& key) {
                                 return std::make_pair(e.i, e.j) < key;
                               });
    if (it == edges_.end() || it->i != i || it->j != j) return -1;
    return static_cast<int>(it - edges_.begin());
  }

  int n_;
  std::vector<MeasuredEdge> edges_;
};

/// One point of SO(3)^n: an absolute rotation per vertex.
struct Solution {
  std::vector<Rotation> rotations;

  int size() const { return static_cast<int>(rotations.size()); }
};

struct NoiseSpec {
  double sigma_n = 0.0;          // radians, inlier tangent Gaussian std-dev
  double outlier_fraction = 0.0; // per-edge independent Bernoulli
  std::uint64_t seed = 0;        // recorded into problem metadata
};

struct SynthesisResult {
  ViewGraph graph;
  Solution ground_truth;
};

/// Ground truth sampled Haar-uniformly; each inlier measurement is
/// (R_i R_j^T) * exp_map(N(0, sigma_n^2 I_3)), and with probability
/// outlier_fraction the measurement is replaced by a Haar-uniform
/// rotation instead.
inline SynthesisResult synthesize(const Topology& topo, const NoiseSpec& noise,
                                  RandomSource& rng) {
  if (noise.sigma_n < 0.0) throw InvalidParam("synthesize: sigma_n must be >= 0");
  if (noise.outlier_fraction < 0.0 || noise.outlier_fraction > 1.0) {
    throw InvalidParam("synthesize: outlier_fraction must be in [0, 1]");
  }
  if (!is_connected(topo)) throw InvalidParam("synthesize: topology must be connected");

  Solution gt;
  gt.rotations.reserve(topo.n);
  for (int v = 0; v < topo.n; ++v) gt.rotations.push_back(random_uniform(rng));

  std::vector<MeasuredEdge> edges;
  edges.reserve(topo.edges.size());
  for (const auto& [i, j] : detail::canonical_edges(topo.edges)) {
    const double u = rng.uniform();  // always drawn, keeps streams aligned
    Rotation meas;
    if (u < noise.outlier_fraction) {
      meas = random_uniform(rng);
    } else {
      const Rotation relative = gt.rotations[i] * gt.rotations[j].transposed();
      meas = relative * exp_map(random_tangent_gaussian(noise.sigma_n, rng));
    }
    edges.push_back({i, j, meas});
  }
  return {ViewGraph(topo.n, std::move(edges)), std::move(gt)};
}

/// Unweighted combinatorial Laplacian L = D - A.
inline Eigen::MatrixXd laplacian(int n, const std::vector<std::pair<int, int>>& edges) {
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [i, j] : edges) {
    l(i, i) += 1.0;
    l(j, j) += 1.0;
    l(i, j) -= 1.0;
    l(j, i) -= 1.0;
  }
  return l;
}

inline Eigen::MatrixXd laplacian(const Topology& t) { return laplacian(t.n, t.edges); }

inline Eigen::MatrixXd laplacian(const ViewGraph& vg) { return laplacian(vg.topology()); }

/// Edge-weighted Laplacian L(w).
inline Eigen::MatrixXd weighted_laplacian(int n, const std::vector<std::pair<int, int>>& edges,
                                          const std::vector<double>& weights) {
  if (edges.size() != weights.size()) {
    throw InvalidParam("weighted_laplacian: one weight per edge required");
  }
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t t = 0; t < edges.size(); ++t) {
    const auto& [i, j] = edges[t];
    const double w = weights[t];
    l(i, i) += w;
    l(j, j) += w;
    l(i, j) -= w;
    l(j, i) -= w;
  }
  return l;
}

}  // namespace rotland
