#pragma once

#include "thzloc/channel.hpp"
#include "thzloc/config.hpp"
#include "thzloc/energy.hpp"
#include "thzloc/localization.hpp"
#include "thzloc/metrics.hpp"
#include "thzloc/random.hpp"
#include "thzloc/ranging.hpp"
#include "thzloc/report.hpp"
#include "thzloc/simulator.hpp"
#include "thzloc/sweep.hpp"
#include "thzloc/topology.hpp"
#include "thzloc/vec3.hpp"
