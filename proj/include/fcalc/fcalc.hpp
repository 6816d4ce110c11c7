#pragma once

// Umbrella header.

#include "fcalc/calculus.hpp"
#include "fcalc/cli.hpp"
#include "fcalc/config.hpp"
#include "fcalc/grid.hpp"
#include "fcalc/multipliers.hpp"
#include "fcalc/presets.hpp"
#include "fcalc/random.hpp"
#include "fcalc/solvers.hpp"
#include "fcalc/symbols.hpp"
