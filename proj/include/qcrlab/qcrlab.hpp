#pragma once

#include "config.hpp"
#include "constants.hpp"
#include "csv.hpp"
#include "errors.hpp"
#include "iv_fit.hpp"
#include "junction.hpp"
#include "nls.hpp"
#include "parallel.hpp"
#include "photon_assisted.hpp"
#include "quadrature.hpp"
#include "resonator.hpp"
#include "resonator_params.hpp"
#include "spectroscopy.hpp"
#include "sweep.hpp"
#include "units.hpp"
#include "version.hpp"
