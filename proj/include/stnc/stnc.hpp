// SPDX-License-Identifier: Apache-2.0
//
// Umbrella header: exact, asymptotic and Monte Carlo symbol error rates of a
// space-time network coded cooperative uplink over Nakagami-m fading.
#pragma once

#include "stnc/asymptotic.hpp"
#include "stnc/config.hpp"
#include "stnc/errors.hpp"
#include "stnc/exact_ser.hpp"
#include "stnc/mc.hpp"
#include "stnc/modulation.hpp"
#include "stnc/quadrature.hpp"
#include "stnc/residue.hpp"
#include "stnc/rng.hpp"
#include "stnc/scenario.hpp"
#include "stnc/sweep.hpp"
