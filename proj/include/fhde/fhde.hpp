#pragma once

// Umbrella header for the hybrid fractional differential equation toolkit.

#include "fhde/contraction.hpp"
#include "fhde/expr.hpp"
#include "fhde/fracops.hpp"
#include "fhde/grid.hpp"
#include "fhde/problem.hpp"
#include "fhde/report.hpp"
#include "fhde/solver.hpp"
#include "fhde/special.hpp"
