#pragma once

#include "nudgevisc/errors.hpp"
#include "nudgevisc/format.hpp"
#include "nudgevisc/spectral/grid.hpp"
#include "nudgevisc/spectral/field.hpp"
#include "nudgevisc/spectral/operators.hpp"
#include "nudgevisc/spectral/physical.hpp"
#include "nudgevisc/spectral/random.hpp"
#include "nudgevisc/spectral/snapshot.hpp"
#include "nudgevisc/flow/params.hpp"
#include "nudgevisc/flow/forcing.hpp"
#include "nudgevisc/flow/integrator.hpp"
#include "nudgevisc/flow/checkpoint.hpp"
#include "nudgevisc/diagnostics/functionals.hpp"
#include "nudgevisc/diagnostics/force_stats.hpp"
#include "nudgevisc/diagnostics/record.hpp"
#include "nudgevisc/diagnostics/bounds.hpp"
#include "nudgevisc/estimator/estimator.hpp"
#include "nudgevisc/harness/config.hpp"
#include "nudgevisc/harness/io.hpp"
#include "nudgevisc/harness/verify.hpp"
#include "nudgevisc/harness/experiment.hpp"
