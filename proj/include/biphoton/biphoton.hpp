#pragma once

#include "biphoton/arcsine.hpp"
#include "biphoton/cd_methods.hpp"
#include "biphoton/dispersion.hpp"
#include "biphoton/drift.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/estimators.hpp"
#include "biphoton/gaussian_analytics.hpp"
#include "biphoton/histogram.hpp"
#include "biphoton/interferogram.hpp"
#include "biphoton/levmar.hpp"
#include "biphoton/quadrature.hpp"
#include "biphoton/rng.hpp"
#include "biphoton/spectrum.hpp"
#include "biphoton/trace.hpp"
#include "biphoton/units.hpp"
#include "biphoton/version.hpp"
