#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "rotland/cost.hpp"
#include "rotland/errors.hpp"
#include "rotland/gauge.hpp"
#include "rotland/graph.hpp"
#include "rotland/rng.hpp"
#include "rotland/so3.hpp"

namespace rotland {

struct SolveOptions {
  double p = 2.0;
  int max_iters = 200;
  double grad_tol = 1e-8;        // stop on horizontal-projected gradient inf-norm
  double step_tol = 1e-10;       // stop on step inf-norm
  double lm_lambda_init = 1e-4;
  double lm_lambda_up = 10.0;
  double lm_lambda_down = 0.5;
  double max_vertex_step = M_PI / 2.0;  // retraction trust region, radians per vertex
  std::uint64_t seed = 0;        // campaign seed; unused by solve_local
};

struct SolveResult {
  Solution solution;
  double final_cost = 0.0;
  bool converged = false;
  int iters = 0;
  double final_grad_norm = std::numeric_limits<double>::quiet_NaN();
  bool near_zero_residual = false;  // p < 2 pathology encountered
};

namespace detail {

inline Solution retract(const Solution& sol, const Eigen::VectorXd& delta) {
  Solution out;
  out.rotations.reserve(sol.rotations.size());
  for (int i = 0; i < sol.size(); ++i) {
    out.rotations.push_back(sol.rotations[i] * exp_map(delta.segment<3>(3 * i)));
  }
  return out;
}

inline double min_residual_angle(const ViewGraph& vg, const Solution& sol) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : residuals(vg, sol)) m = std::min(m, r.theta);
  return m;
}

}  // namespace detail

/// Damped Newton in the tangent space: solve (P H P + lambda I) d = -P g
/// where P is the horizontal projector, retract per vertex, and adapt
/// lambda multiplicatively. The projection removes the gauge null-space,
/// and the vertical part of d is exactly zero by construction. Steps are
/// clamped to max_vertex_step per vertex, which keeps each retraction
/// inside the chart where the local quadratic model is meaningful.
/// Accepted steps strictly decrease the cost.
inline SolveResult solve_local(const ViewGraph& vg, const Solution& init,
                               const SolveOptions& opts) {
  if (opts.p <= 1.0) throw InvalidParam("solve_local: need p > 1");
  if (opts.grad_tol <= 0.0 || opts.step_tol <= 0.0) {
    throw InvalidParam("solve_local: tolerances must be > 0");
  }
  if (opts.max_iters < 1) throw InvalidParam("solve_local: need max_iters >= 1");
  if (opts.max_vertex_step <= 0.0) {
    throw InvalidParam("solve_local: max_vertex_step must be > 0");
  }
  if (init.size() != vg.num_vertices()) {
    throw InvalidParam("solve_local: init length does not match graph");
  }

  const GaugeBasis basis(vg.num_vertices());

  SolveResult res;
  res.solution = init;
  res.final_cost = cost(vg, init, opts.p);

  const bool guard_small_theta = opts.p < 2.0;
  if (guard_small_theta && detail::min_residual_angle(vg, init) < kThetaMin) {
    res.near_zero_residual = true;
    return res;
  }

  double lambda = opts.lm_lambda_init;
  Eigen::VectorXd grad = gradient(vg, res.solution, opts.p);
  Eigen::VectorXd pgrad = basis.project(grad);
  res.final_grad_norm = pgrad.lpNorm<Eigen::Infinity>();

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    if (res.final_grad_norm < opts.grad_tol) {
      res.converged = true;
      break;
    }
    const Eigen::MatrixXd php = basis.project(hessian(vg, res.solution, opts.p));

    bool stepped = false;
    bool stopped = false;
    for (int inner = 0; inner < 64 && !stepped && !stopped; ++inner) {
      Eigen::MatrixXd a = php;
      a.diagonal().array() += lambda;
      Eigen::LLT<Eigen::MatrixXd> llt(a);
      if (llt.info() != Eigen::Success) {
        lambda *= opts.lm_lambda_up;  // indefinite; raise damping until PD
        continue;
      }
      Eigen::VectorXd delta = llt.solve(-pgrad);
      double worst_vertex = 0.0;
      for (int v = 0; v < vg.num_vertices(); ++v) {
        worst_vertex = std::max(worst_vertex, delta.segment<3>(3 * v).norm());
      }
      if (worst_vertex > opts.max_vertex_step) {
        delta *= opts.max_vertex_step / worst_vertex;
      }
      if (delta.lpNorm<Eigen::Infinity>() < opts.step_tol) {
        res.converged = true;  // step floor: stationary to working precision
        stopped = true;
        break;
      }
      Solution cand = detail::retract(res.solution, delta);
      const double cand_cost = cost(vg, cand, opts.p);
      bool ok = cand_cost < res.final_cost;
      if (ok && guard_small_theta && detail::min_residual_angle(vg, cand) < kThetaMin) {
        ok = false;
        res.near_zero_residual = true;  // retreat: damp and retry
      }
      if (ok) {
        res.solution = std::move(cand);
        res.final_cost = cand_cost;
        lambda = std::max(lambda * opts.lm_lambda_down, 1e-15);
        stepped = true;
      } else {
        lambda *= opts.lm_lambda_up;
        if (lambda > 1e15) {
          stopped = true;  // no acceptable step at any damping
        }
      }
    }
    res.iters = iter + 1;
    if (!stepped) break;

    grad = gradient(vg, res.solution, opts.p);
    pgrad = basis.project(grad);
    res.final_grad_norm = pgrad.lpNorm<Eigen::Infinity>();
    if (res.final_grad_norm < opts.grad_tol) res.converged = true;
  }
  return res;
}

/// N_lm independent solves from Haar-uniform initial guesses. Run r uses
/// the substream (seed, r), so the result list is deterministic given
/// the seed and independent of thread scheduling. Per-run failures are
/// flagged in the results; the campaign itself never aborts.
inline std::vector<SolveResult> random_restart_campaign(const ViewGraph& vg,
                                                        const SolveOptions& opts, int n_lm) {
  if (n_lm < 1) throw InvalidParam("random_restart_campaign: need N_lm >= 1");
  std::vector<SolveResult> results(static_cast<std::size_t>(n_lm));

  auto run_one = [&](int r) {
    RandomSource rng = RandomSource::substream(opts.seed, static_cast<std::uint64_t>(r));
    Solution init;
    init.rotations.reserve(vg.num_vertices());
    for (int v = 0; v < vg.num_vertices(); ++v) init.rotations.push_back(random_uniform(rng));
    results[static_cast<std::size_t>(r)] = solve_local(vg, init, opts);
  };

  const unsigned hw = std::thread::hardware_concurrency();
  const int workers = std::min<int>(n_lm, hw > 1 ? static_cast<int>(hw) : 1);
  if (workers <= 1) {
    for (int r = 0; r < n_lm; ++r) run_one(r);
    return results;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (int r = w; r < n_lm; r += workers) run_one(r);
    });
  }
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace rotland
