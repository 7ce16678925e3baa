#pragma once

#include <stdexcept>

namespace gdopsel {

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Rejection sampling ran out of attempts (bounds too tight for the spacing).
struct placement_error : error { using error::error; };

/// A^T W A is rank deficient or ill conditioned.
struct degenerate_geometry_error : error { using error::error; };

/// Evaluation point coincides with a base-station position.
struct singularity_error : error { using error::error; };

/// Fixed-step descent grew the cost for too many consecutive steps.
struct divergence_error : error { using error::error; };

/// The strategy needs at least one LOS base station.
struct no_los_error : error { using error::error; };

/// Unknown base-station id.
struct lookup_error : error { using error::error; };

/// Every beam pair fell below the detection floor.
struct detection_error : error { using error::error; };

/// Malformed or unreadable data file.
struct io_error : error { using error::error; };

}  // namespace gdopsel
