#pragma once

#include "spde_mlmc/error.hpp"
#include "spde_mlmc/fem.hpp"
#include "spde_mlmc/grid.hpp"
#include "spde_mlmc/metrics.hpp"
#include "spde_mlmc/mlmc.hpp"
#include "spde_mlmc/noise.hpp"
#include "spde_mlmc/parallel.hpp"
#include "spde_mlmc/rng.hpp"
#include "spde_mlmc/statistics.hpp"
