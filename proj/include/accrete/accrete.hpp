#pragma once

/// Umbrella header: the whole library in dependency order.

#include "tensor.hpp"
#include "grid.hpp"
#include "field.hpp"
#include "fd_ops.hpp"
#include "material.hpp"
#include "eikonal.hpp"
#include "lbfgs.hpp"
#include "trajectory.hpp"
#include "mechanics.hpp"
#include "coupling.hpp"
#include "isocontour.hpp"
#include "audit.hpp"
#include "io.hpp"
#include "config.hpp"
#include "driver.hpp"
