#pragma once

// Umbrella header.

#include "mpst/analysis/linearity.hpp"
#include "mpst/analysis/report.hpp"
#include "mpst/analysis/unfold.hpp"
#include "mpst/analysis/well_asserted.hpp"
#include "mpst/core/error.hpp"
#include "mpst/core/expr.hpp"
#include "mpst/core/formula.hpp"
#include "mpst/core/global.hpp"
#include "mpst/core/local.hpp"
#include "mpst/core/process.hpp"
#include "mpst/frontend/frontend.hpp"
#include "mpst/logic/presburger.hpp"
#include "mpst/pipeline.hpp"
#include "mpst/projection/projection.hpp"
#include "mpst/runtime/simulator.hpp"
#include "mpst/runtime/value.hpp"
#include "mpst/typing/environment.hpp"
#include "mpst/typing/infer.hpp"
#include "mpst/typing/refine.hpp"
#include "mpst/typing/validate.hpp"
