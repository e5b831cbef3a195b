#pragma once

#include "vpr/analytic.hpp"
#include "vpr/channel.hpp"
#include "vpr/csv.hpp"
#include "vpr/errors.hpp"
#include "vpr/fixtures.hpp"
#include "vpr/harness.hpp"
#include "vpr/linkmath.hpp"
#include "vpr/metrics.hpp"
#include "vpr/nse.hpp"
#include "vpr/random.hpp"
#include "vpr/scenario.hpp"
#include "vpr/types.hpp"
#include "vpr/units.hpp"
#include "vpr/verhulst.hpp"
