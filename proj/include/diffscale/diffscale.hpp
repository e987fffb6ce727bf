#pragma once

/**
 * @file diffscale.hpp
 * @brief Umbrella header for the diffscale library.
 */

#include "diffscale/algebra.hpp"
#include "diffscale/core.hpp"
#include "diffscale/cutproject.hpp"
#include "diffscale/io.hpp"
#include "diffscale/numbertheory.hpp"
#include "diffscale/renorm.hpp"
#include "diffscale/riesz.hpp"
#include "diffscale/scaling.hpp"
#include "diffscale/stochastic.hpp"
#include "diffscale/substitution.hpp"
#include "diffscale/systems.hpp"
