#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "gdopsel/errors.hpp"
#include "gdopsel/geometry.hpp"
#include "gdopsel/scenario.hpp"

namespace gdopsel {

/// Linearized TDOA design matrix at a candidate point. Row i is the unit
/// vector from the linearization point toward station i minus the unit
/// vector toward the reference station, so every entry lies in [-2, 2] and
/// the matrix depends only on relative geometry.
struct DesignMatrix {
  std::vector<std::array<double, 2>> rows;  ///< (M-1) x 2, list order, reference skipped
  Point2 linearization_point;
  std::size_t reference_index = 0;  ///< index into the station list the matrix was built from
};

/// Build the design matrix for the given stations around x0.
///
/// Throws singularity_error when x0 sits on a station and
/// degenerate_geometry_error when fewer than 3 stations are supplied.
inline DesignMatrix design_matrix(const std::vector<Point2>& bs_positions,
                                  std::size_t reference_index, const Point2& x0) {
  if (bs_positions.size() < 3)
    throw degenerate_geometry_error("design_matrix: need at least 3 stations");
  if (reference_index >= bs_positions.size())
    throw std::invalid_argument("design_matrix: reference index out of range");

  auto unit_to = [&x0](const Point2& v) {
    const double d = distance(x0, v);
    if (d < 1e-9) throw singularity_error("design_matrix: x0 coincides with a station");
    return Point2{(v.x - x0.x) / d, (v.y - x0.y) / d};
  };

  const Point2 u_ref = unit_to(bs_positions[reference_index]);
  DesignMatrix a;
  a.linearization_point = x0;
  a.reference_index = reference_index;
  a.rows.reserve(bs_positions.size() - 1);
  for (std::size_t i = 0; i < bs_positions.size(); ++i) {
    if (i == reference_index) continue;
    const Point2 u = unit_to(bs_positions[i]);
    a.rows.push_back({u.x - u_ref.x, u.y - u_ref.y});
  }
  return a;
}

inline std::vector<double> identity_weight(std::size_t n) {
  std::vector<double> w(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) w[i * n + i] = 1.0;
  return w;
}

/// Inverse covariance of reference-shared TDOA errors built from iid ToA
/// errors, (I + 1 1^T)^-1 = I - 1 1^T / (n + 1). Offered as an optional
/// weighting; the default pipeline keeps W = I.
inline std::vector<double> correlated_tdoa_weight(std::size_t n) {
  std::vector<double> w(n * n, -1.0 / double(n + 1));
  for (std::size_t i = 0; i < n; ++i) w[i * n + i] += 1.0;
  return w;
}

inline constexpr double kGdopConditionLimit = 1e12;

/// Weighted geometric dilution of precision, sqrt(tr((A^T W A)^-1)).
/// w is the (M-1)x(M-1) weight matrix, row major.
///
/// Throws degenerate_geometry_error when A^T W A is singular or its
/// condition number exceeds 1e12.
inline double gdop(const DesignMatrix& a, const std::vector<double>& w) {
  const std::size_t n = a.rows.size();
  if (n < 2) throw degenerate_geometry_error("gdop: need at least two measurement rows");
  if (w.size() != n * n) throw std::invalid_argument("gdop: weight matrix size mismatch");

  // G = A^T W A, accumulated as a symmetric 2x2.
  double g00 = 0.0, g01 = 0.0, g11 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double wa0 = 0.0, wa1 = 0.0;  // (W A) row i
    for (std::size_t j = 0; j < n; ++j) {
      const double wij = w[i * n + j];
      wa0 += wij * a.rows[j][0];
      wa1 += wij * a.rows[j][1];
    }
    g00 += a.rows[i][0] * wa0;
    g01 += a.rows[i][0] * wa1;
    g11 += a.rows[i][1] * wa1;
  }

  const double det = g00 * g11 - g01 * g01;
  const double mean = 0.5 * (g00 + g11);
  const double disc = std::sqrt(std::max(0.0, 0.25 * (g00 - g11) * (g00 - g11) + g01 * g01));
  const double lambda_min = mean - disc;
  const double lambda_max = mean + disc;
  if (!(det > 0.0) || !(lambda_min > 0.0) || lambda_max > kGdopConditionLimit * lambda_min)
    throw degenerate_geometry_error("gdop: rank-deficient or ill-conditioned geometry");
  return std::sqrt((g00 + g11) / det);
}

/// Unweighted form (W = I), the configuration the selection pipeline uses.
inline double gdop(const DesignMatrix& a) {
  return gdop(a, identity_weight(a.rows.size()));
}

inline constexpr double kGdopUndefined = std::numeric_limits<double>::infinity();

struct GdopScore {
  int bs_id = 0;
  double value = kGdopUndefined;  ///< +inf when the score is undefined
};

/// GDOP of the whole set with each member in turn as the reference,
/// evaluated at x0, in set order. Sets with fewer than 3 members, degenerate
/// geometry and x0 on a station all yield the +inf sentinel so callers can
/// still sort.
inline std::vector<GdopScore> per_reference_scores(const std::vector<int>& bs_set,
                                                   const Scenario& sc, const Point2& x0) {
  std::vector<GdopScore> scores;
  scores.reserve(bs_set.size());
  if (bs_set.size() < 3) {
    for (int id : bs_set) scores.push_back({id, kGdopUndefined});
    return scores;
  }

  std::vector<Point2> positions;
  positions.reserve(bs_set.size());
  for (int id : bs_set) positions.push_back(sc.bs(id).position);

  for (std::size_t j = 0; j < bs_set.size(); ++j) {
    double value = kGdopUndefined;
    try {
      value = gdop(design_matrix(positions, j, x0));
    } catch (const degenerate_geometry_error&) {
    } catch (const singularity_error&) {
    }
    scores.push_back({bs_set[j], value});
  }
  return scores;
}

}  // namespace gdopsel
