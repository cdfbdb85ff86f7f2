#pragma once

#include "errors.hpp"
#include "generators.hpp"
#include "grid.hpp"
#include "io.hpp"
#include "metrics.hpp"
#include "sampling.hpp"
#include "signal.hpp"
#include "sweep.hpp"
#include "transform.hpp"
#include "tv_solver.hpp"
#include "version.hpp"
