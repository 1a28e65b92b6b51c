#pragma once

#include "mrlbm/exact.hpp"
#include "mrlbm/experiment.hpp"
#include "mrlbm/mesh.hpp"
#include "mrlbm/metrics.hpp"
#include "mrlbm/multiresolution.hpp"
#include "mrlbm/scheme.hpp"
#include "mrlbm/solver.hpp"
