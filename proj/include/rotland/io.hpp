#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rotland/atlas.hpp"
#include "rotland/certify.hpp"
#include "rotland/errors.hpp"
#include "rotland/graph.hpp"
#include "rotland/rng.hpp"
#include "rotland/so3.hpp"
#include "rotland/solver.hpp"

namespace rotland {

inline constexpr const char* kArtifactVersion = "0.1.0";

using json = nlohmann::json;

inline json rotation_to_json(const Rotation& r) {
  json arr = json::array();
  const Eigen::Matrix3d& m = r.matrix();
  for (int row = 0; row < 3; ++row) {
    for (int col = 0; col < 3; ++col) arr.push_back(m(row, col));
  }
  return arr;
}

inline Rotation rotation_from_json(const json& arr) {
  if (!arr.is_array() || arr.size() != 9) {
    throw InvalidParam("rotation: expected a 9-element row-major array");
  }
  Eigen::Matrix3d m;
  for (int row = 0; row < 3; ++row) {
    for (int col = 0; col < 3; ++col) m(row, col) = arr[3 * row + col].get<double>();
  }
  return Rotation::from_matrix(m);
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParam("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw InvalidParam("JSON parse error in " + path + ": " + e.what());
  }
  return j;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  out << text;
}

// ---------------------------------------------------------------------------
// Problem and solution files

inline json problem_to_json(const ViewGraph& vg, const json& meta) {
  json j;
  j["n"] = vg.num_vertices();
  json edges = json::array();
  for (const auto& e : vg.edges()) {
    edges.push_back({{"i", e.i}, {"j", e.j}, {"R", rotation_to_json(e.measurement)}});
  }
  j["edges"] = std::move(edges);
  j["meta"] = meta;
  return j;
}

struct ProblemFile {
  ViewGraph graph;
  json meta;
};

inline ProblemFile problem_from_json(const json& j) {
  if (!j.contains("n") || !j.contains("edges")) {
    throw InvalidParam("problem file: missing 'n' or 'edges'");
  }
  const int n = j["n"].get<int>();
  std::vector<MeasuredEdge> edges;
  for (const auto& e : j["edges"]) {
    edges.push_back(
        {e["i"].get<int>(), e["j"].get<int>(), rotation_from_json(e["R"])});
  }
  return {ViewGraph(n, std::move(edges)), j.value("meta", json::object())};
}

inline void write_problem(const std::string& path, const ViewGraph& vg, const json& meta) {
  write_text_file(path, problem_to_json(vg, meta).dump(2) + "\n");
}

inline ProblemFile read_problem(const std::string& path) {
  return problem_from_json(read_json_file(path));
}

inline json solution_to_json(const Solution& sol) {
  json rots = json::array();
  for (const auto& r : sol.rotations) rots.push_back(rotation_to_json(r));
  return json{{"rotations", std::move(rots)}};
}

inline Solution solution_from_json(const json& j) {
  if (!j.contains("rotations")) throw InvalidParam("solution file: missing 'rotations'");
  Solution sol;
  for (const auto& r : j["rotations"]) sol.rotations.push_back(rotation_from_json(r));
  return sol;
}

inline void write_solution(const std::string& path, const Solution& sol) {
  write_text_file(path, solution_to_json(sol).dump(2) + "\n");
}

inline Solution read_solution(const std::string& path) {
  return solution_from_json(read_json_file(path));
}

// ---------------------------------------------------------------------------
// Campaign persistence: one JSON record per run, solutions in a sidecar.

inline void write_campaign(const std::string& runs_path, const std::string& solutions_path,
                           const std::vector<SolveResult>& results) {
  std::ostringstream runs;
  json sols = json::array();
  for (int r = 0; r < static_cast<int>(results.size()); ++r) {
    const SolveResult& sr = results[r];
    json rec{{"run_index", r},
             {"cost", sr.final_cost},
             {"converged", sr.converged},
             {"iters", sr.iters},
             {"final_grad_norm", sr.final_grad_norm},
             {"solution_ref", r}};
    runs << rec.dump() << "\n";
    sols.push_back(solution_to_json(sr.solution));
  }
  write_text_file(runs_path, runs.str());
  write_text_file(solutions_path, json{{"solutions", std::move(sols)}}.dump() + "\n");
}

// ---------------------------------------------------------------------------
// Convexity report

inline json report_to_json(const ConvexityReport& rep) {
  auto num = [](double v) -> json {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
    return v;
  };
  json j;
  j["p"] = rep.p;
  j["exact_min_eig"] = num(rep.exact_min_eig);
  j["exact_error"] = rep.exact_error;
  j["lnorm_min"] = num(rep.lnorm_min);
  j["lnorm_pass"] = rep.lnorm_pass;
  j["lnorm_error"] = rep.lnorm_error;
  j["separated_lhs"] = num(rep.separated_lhs);
  j["separated_rhs"] = num(rep.separated_rhs);
  j["separated_pass"] = rep.separated_pass;
  j["separated_error"] = rep.separated_error;
  j["alpha_min"] = num(rep.alpha_min);
  j["max_weighted_degree"] = num(rep.max_weighted_degree);
  j["lambda2_alpha_weighted"] = num(rep.lambda2_alpha_weighted);
  json table = json::array();
  for (const auto& r : rep.residual_table) {
    json row{{"i", r.i}, {"j", r.j}, {"theta", r.theta}};
    try {
      row["alpha"] = alpha_weight(r.theta, rep.p);
    } catch (...) {
      row["alpha"] = nullptr;
    }
    table.push_back(std::move(row));
  }
  j["edges"] = std::move(table);
  return j;
}

// ---------------------------------------------------------------------------
// Atlas outputs: atlas.json, atlas.csv, atlas.svg

inline json atlas_to_json(const MinimaAtlas& atlas, const json& meta) {
  json j;
  j["meta"] = meta;
  j["pct_max"] = atlas.pct_max;
  j["n_runs"] = atlas.n_runs;
  j["n_converged"] = atlas.n_converged;
  j["n_nonconverged"] = atlas.n_nonconverged;
  j["n_ambiguous_pairs"] = atlas.n_ambiguous_pairs;
  j["pct_max_denominator"] = "converged runs";
  json minima = json::array();
  for (int a = 0; a < static_cast<int>(atlas.minima.size()); ++a) {
    const Minimum& m = atlas.minima[a];
    minima.push_back({{"id", a},
                      {"cost", m.cost},
                      {"multiplicity", m.multiplicity},
                      {"representative_run", m.representative_run},
                      {"x", atlas.embedding(a, 0)},
                      {"y", atlas.embedding(a, 1)}});
  }
  j["minima"] = std::move(minima);
  json dist = json::array();
  for (int a = 0; a < atlas.dist.rows(); ++a) {
    json row = json::array();
    for (int b = 0; b < atlas.dist.cols(); ++b) row.push_back(atlas.dist(a, b));
    dist.push_back(std::move(row));
  }
  j["dist"] = std::move(dist);
  return j;
}

inline std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string atlas_to_csv(const MinimaAtlas& atlas) {
  std::ostringstream out;
  out << "id,cost,multiplicity,x,y\n";
  for (int a = 0; a < static_cast<int>(atlas.minima.size()); ++a) {
    const Minimum& m = atlas.minima[a];
    out << a << "," << format_g17(m.cost) << "," << m.multiplicity << ","
        << format_g17(atlas.embedding(a, 0)) << "," << format_g17(atlas.embedding(a, 1))
        << "\n";
  }
  return out.str();
}

namespace detail {

// Cold-to-warm 5-stop palette; index by normalized cost rank.
inline std::string cost_color(double t) {
  static const int stops[5][3] = {
      {59, 76, 192}, {124, 159, 249}, {220, 220, 220}, {245, 156, 125}, {180, 4, 38}};
  t = std::min(std::max(t, 0.0), 1.0);
  const double x = t * 4.0;
  const int lo = std::min(static_cast<int>(x), 3);
  const double f = x - lo;
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                static_cast<int>(stops[lo][0] + f * (stops[lo + 1][0] - stops[lo][0])),
                static_cast<int>(stops[lo][1] + f * (stops[lo + 1][1] - stops[lo][1])),
                static_cast<int>(stops[lo][2] + f * (stops[lo + 1][2] - stops[lo][2])));
  return buf;
}

}  // namespace detail

/// Scatter of the embedded minima: radius and color bucket encode cost
/// (cool colors and small radii are low cost), jittered grey plus-marks
/// behind each point encode multiplicity.
inline std::string atlas_to_svg(const MinimaAtlas& atlas, std::uint64_t jitter_seed = 17) {
  const int width = 640, height = 480, margin = 48;
  const int k = static_cast<int>(atlas.minima.size());
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (k == 0) {
    svg << "</svg>\n";
    return svg.str();
  }

  double xmin = atlas.embedding.col(0).minCoeff(), xmax = atlas.embedding.col(0).maxCoeff();
  double ymin = atlas.embedding.col(1).minCoeff(), ymax = atlas.embedding.col(1).maxCoeff();
  if (xmax - xmin < 1e-12) { xmin -= 0.5; xmax += 0.5; }
  if (ymax - ymin < 1e-12) { ymin -= 0.5; ymax += 0.5; }
  auto px = [&](double x) {
    return margin + (x - xmin) / (xmax - xmin) * (width - 2 * margin);
  };
  auto py = [&](double y) {
    return height - margin - (y - ymin) / (ymax - ymin) * (height - 2 * margin);
  };

  double cmin = atlas.minima[0].cost, cmax = atlas.minima[0].cost;
  for (const auto& m : atlas.minima) {
    cmin = std::min(cmin, m.cost);
    cmax = std::max(cmax, m.cost);
  }
  auto cnorm = [&](double c) { return cmax - cmin < 1e-300 ? 0.0 : (c - cmin) / (cmax - cmin); };

  RandomSource jitter(jitter_seed);
  for (int a = 0; a < k; ++a) {
    const double cx = px(atlas.embedding(a, 0)), cy = py(atlas.embedding(a, 1));
    for (int rep = 0; rep < atlas.minima[a].multiplicity; ++rep) {
      const double jx = cx + (jitter.uniform() - 0.5) * 22.0;
      const double jy = cy + (jitter.uniform() - 0.5) * 22.0;
      svg << "<text x=\"" << jx << "\" y=\"" << jy
          << "\" fill=\"#cccccc\" font-size=\"8\" text-anchor=\"middle\">+</text>\n";
    }
  }
  for (int a = 0; a < k; ++a) {
    const double t = cnorm(atlas.minima[a].cost);
    svg << "<circle cx=\"" << px(atlas.embedding(a, 0)) << "\" cy=\""
        << py(atlas.embedding(a, 1)) << "\" r=\"" << 4.0 + 8.0 * t << "\" fill=\""
        << detail::cost_color(t) << "\" fill-opacity=\"0.85\"/>\n";
  }
  svg << "<text x=\"" << margin << "\" y=\"" << height - 12
      << "\" font-size=\"12\" fill=\"#444444\">pct_max = " << atlas.pct_max
      << ", minima = " << k << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

inline void write_atlas_files(const std::string& out_dir, const MinimaAtlas& atlas,
                              const json& meta) {
  write_text_file(out_dir + "/atlas.json", atlas_to_json(atlas, meta).dump(2) + "\n");
  write_text_file(out_dir + "/atlas.csv", atlas_to_csv(atlas));
  write_text_file(out_dir + "/atlas.svg", atlas_to_svg(atlas));
}

// ---------------------------------------------------------------------------
// Sweep output

inline std::string sweep_to_csv(const std::vector<SweepCell>& cells) {
  std::ostringstream out;
  out << "lambda2,sigma_n_deg,pct_max,n_minima\n";
  for (const auto& c : cells) {
    if (c.failed) continue;
    out << format_g17(c.lambda2) << "," << format_g17(c.sigma_n_deg) << ","
        << format_g17(c.pct_max) << "," << c.n_minima << "\n";
  }
  return out.str();
}

inline std::string hessian_to_csv(const Eigen::MatrixXd& h) {
  std::ostringstream out;
  for (int r = 0; r < h.rows(); ++r) {
    for (int c = 0; c < h.cols(); ++c) {
      if (c) out << ",";
      out << format_g17(h(r, c));
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace rotland
