#pragma once

// Umbrella header for the cascade library.

#include "lidc/numerics.hpp"
#include "lidc/rng.hpp"
#include "lidc/levy_model.hpp"
#include "lidc/cone_geometry.hpp"
#include "lidc/field_sampler.hpp"
#include "lidc/cascade.hpp"
#include "lidc/statistics.hpp"
#include "lidc/parallel.hpp"
#include "lidc/moment_analysis.hpp"
#include "lidc/verify.hpp"
#include "lidc/config.hpp"
#include "lidc/commands.hpp"
