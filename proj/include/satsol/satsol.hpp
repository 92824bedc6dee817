#pragma once

// Umbrella header.

#include "satsol/defaults.hpp"
#include "satsol/diagnostics.hpp"
#include "satsol/error.hpp"
#include "satsol/functionals.hpp"
#include "satsol/groundstate.hpp"
#include "satsol/io.hpp"
#include "satsol/propagator.hpp"
#include "satsol/radial.hpp"
#include "satsol/threshold.hpp"
