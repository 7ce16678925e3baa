#pragma once

// Umbrella header.

#include "gdopsel/channel.hpp"
#include "gdopsel/errors.hpp"
#include "gdopsel/fft.hpp"
#include "gdopsel/gdop.hpp"
#include "gdopsel/geometry.hpp"
#include "gdopsel/harness.hpp"
#include "gdopsel/measurement.hpp"
#include "gdopsel/ofdm.hpp"
#include "gdopsel/prs.hpp"
#include "gdopsel/rng.hpp"
#include "gdopsel/scenario.hpp"
#include "gdopsel/selection.hpp"
#include "gdopsel/solver.hpp"
#include "gdopsel/toa_signal.hpp"
#include "gdopsel/ura.hpp"
