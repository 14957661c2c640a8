// vesiclecc.hpp
// Umbrella header for the CC-MSAV vesicle phase-field solver library.

#pragma once

#include "vesiclecc/config.hpp"
#include "vesiclecc/diagnostics.hpp"
#include "vesiclecc/dct.hpp"
#include "vesiclecc/energy.hpp"
#include "vesiclecc/field.hpp"
#include "vesiclecc/grid_ops.hpp"
#include "vesiclecc/init.hpp"
#include "vesiclecc/io.hpp"
#include "vesiclecc/params.hpp"
#include "vesiclecc/runner.hpp"
#include "vesiclecc/spectral.hpp"
#include "vesiclecc/stepper.hpp"
#include "vesiclecc/studies.hpp"
