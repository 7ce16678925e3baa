#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "gdopsel/errors.hpp"
#include "gdopsel/geometry.hpp"
#include "gdopsel/measurement.hpp"

namespace gdopsel {

struct SolverConfig {
  double mu = 0.05;          ///< base step scale; the fixed step when line_search is off
  int max_iters = 2000;
  double grad_tol = 1e-6;    ///< stop when the gradient norm (metres) drops below
  double step_tol = 1e-9;    ///< stop when the position step (metres) drops below
  bool line_search = true;   ///< two-way backtracking: halve until the cost decreases,
                             ///< reopen the trial step after an accepted move
  double backtrack = 0.5;
  int max_backtracks = 20;
  double mu_growth_cap = 1e6;  ///< trial step never exceeds mu * this
  int divergence_streak = 10;  ///< fixed-step mode: consecutive cost growths before giving up
  std::string trace_path;      ///< per-iteration CSV (iter,x,y,cost,grad_norm) when non-empty
  std::function<void(int iter, Point2 x, double cost, double grad_norm)> on_iteration;

  void validate() const {
    if (!(mu > 0.0)) throw std::invalid_argument("solver: mu must be positive");
    if (!(grad_tol > 0.0) || !(step_tol > 0.0))
      throw std::invalid_argument("solver: tolerances must be positive");
    if (max_iters < 1) throw std::invalid_argument("solver: max_iters must be >= 1");
    if (!(backtrack > 0.0) || !(backtrack < 1.0))
      throw std::invalid_argument("solver: backtrack factor must be in (0, 1)");
  }
};

struct PositionEstimate {
  Point2 x_hat;
  int iterations = 0;
  bool converged = false;
  double final_cost = 0.0;
};

/// Least-squares TDOA cost: the squared norm of the range residuals.
inline double cost(const Point2& x, const TdoaVector& tdoa, const PositionTable& positions) {
  double j = 0.0;
  for (double r : range_residuals(x, tdoa, positions)) j += r * r;
  return j;
}

/// Analytic cost gradient: 2 sum_i e_i(x) (u_i(x) - u_ref(x)), where u_k is
/// the unit vector from x toward station k.
inline Point2 gradient(const Point2& x, const TdoaVector& tdoa, const PositionTable& positions) {
  const Point2 v_ref = positions.at(tdoa.reference_id);
  const double d_ref = distance(x, v_ref);
  if (d_ref < kSingularDistance)
    throw singularity_error("gradient: x coincides with the reference station");
  const Point2 u_ref{(v_ref.x - x.x) / d_ref, (v_ref.y - x.y) / d_ref};

  Point2 g{0.0, 0.0};
  for (const auto& e : tdoa.entries) {
    const Point2 v = positions.at(e.bs_id);
    const double d = distance(x, v);
    if (d < kSingularDistance)
      throw singularity_error("gradient: x coincides with station " + std::to_string(e.bs_id));
    const double res = e.range_diff_m - (d - d_ref);
    g.x += 2.0 * res * ((v.x - x.x) / d - u_ref.x);
    g.y += 2.0 * res * ((v.y - x.y) / d - u_ref.y);
  }
  return g;
}

inline Point2 centroid(const std::vector<Point2>& points) {
  Point2 c{0.0, 0.0};
  for (const Point2& p : points) c = c + p;
  return (1.0 / double(points.size())) * c;
}

/// Centroid of the participating stations, displaced a metre when it lands
/// on one of them (grid layouts can put the centroid exactly on a station).
inline Point2 centroid_init(const std::vector<Point2>& points) {
  Point2 c = centroid(points);
  for (const Point2& p : points)
    if (distance(c, p) < 1e-6) {
      c.x += 1.0;
      c.y += 0.5;
      break;
    }
  return c;
}

/// Steepest-descent minimization of the TDOA cost, x_{k+1} = x_k - mu grad J.
/// With line_search on, mu is halved until the cost decreases; otherwise the
/// step is fixed and sustained cost growth raises divergence_error. Returns
/// the best iterate seen, with converged set on a gradient- or step-tolerance
/// exit.
inline PositionEstimate solve(const TdoaVector& tdoa, const PositionTable& positions,
                              Point2 x_init, const SolverConfig& cfg = {}) {
  cfg.validate();
  if (tdoa.entries.size() < 3)
    throw std::invalid_argument("solve: need at least 4 stations (3 TDOA entries)");
  if (!std::isfinite(x_init.x) || !std::isfinite(x_init.y))
    throw std::invalid_argument("solve: non-finite initial point");

  std::ofstream trace;
  if (!cfg.trace_path.empty()) {
    trace.open(cfg.trace_path);
    if (!trace) throw io_error("solve: cannot open trace file " + cfg.trace_path);
    trace << "iter,x,y,cost,grad_norm\n";
  }
  auto emit = [&](int k, Point2 x, double j, double gn) {
    if (trace.is_open()) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g,%.9g,%.9g\n", k, x.x, x.y, j, gn);
      trace << buf;
    }
    if (cfg.on_iteration) cfg.on_iteration(k, x, j, gn);
  };

  // Candidate steps that land on a station count as rejected, not fatal.
  auto candidate_cost = [&](Point2 p) {
    try {
      return cost(p, tdoa, positions);
    } catch (const singularity_error&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  Point2 x = x_init;
  double j = cost(x, tdoa, positions);
  Point2 best_x = x;
  double best_j = j;
  bool converged = false;
  int k = 0;
  int grow_streak = 0;
  double mu_trial = cfg.mu;

  for (; k < cfg.max_iters; ++k) {
    const Point2 g = gradient(x, tdoa, positions);
    const double gn = norm(g);
    emit(k, x, j, gn);
    if (gn < cfg.grad_tol) {
      converged = true;
      break;
    }

    Point2 x_next;
    double j_next;
    if (cfg.line_search) {
      double mu = mu_trial;
      bool accepted = false;
      for (int t = 0; t <= cfg.max_backtracks; ++t) {
        x_next = x - mu * g;
        j_next = candidate_cost(x_next);
        if (j_next <= j) {
          accepted = true;
          break;
        }
        mu *= cfg.backtrack;
      }
      if (!accepted) break;  // no decreasing step within the backtrack budget
      mu_trial = std::min(mu / cfg.backtrack, cfg.mu * cfg.mu_growth_cap);
    } else {
      x_next = x - cfg.mu * g;
      j_next = candidate_cost(x_next);
      if (j_next > j) {
        if (++grow_streak >= cfg.divergence_streak)
          throw divergence_error("solve: cost grew for " + std::to_string(grow_streak) +
                                 " consecutive steps (mu too large?)");
      } else {
        grow_streak = 0;
      }
      if (!std::isfinite(j_next)) continue;  // singular landing spot, hold position
    }

    const double step = distance(x, x_next);
    x = x_next;
    j = j_next;
    if (j < best_j) {
      best_j = j;
      best_x = x;
    }
    if (step < cfg.step_tol) {
      ++k;
      converged = true;
      break;
    }
  }

  return {best_x, k, converged, best_j};
}

}  // namespace gdopsel
