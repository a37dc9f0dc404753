#pragma once

#include "wavegauge/core.hpp"
#include "wavegauge/grid.hpp"
#include "wavegauge/reaction.hpp"
#include "wavegauge/wave.hpp"
#include "wavegauge/constants.hpp"
#include "wavegauge/det_solver.hpp"
#include "wavegauge/noise.hpp"
#include "wavegauge/spde_solver.hpp"
#include "wavegauge/config.hpp"
#include "wavegauge/pipeline.hpp"
#include "wavegauge/verify.hpp"
