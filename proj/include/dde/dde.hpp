#pragma once

// Umbrella header for the layered Euler laboratory.

#include "dde/bounds.hpp"
#include "dde/config.hpp"
#include "dde/csv.hpp"
#include "dde/experiment.hpp"
#include "dde/grid.hpp"
#include "dde/metrics.hpp"
#include "dde/noise.hpp"
#include "dde/problems.hpp"
#include "dde/solver.hpp"
#include "dde/svg.hpp"
#include "dde/version.hpp"
