#pragma once

#include "avgcost/config.hpp"
#include "avgcost/dynamics.hpp"
#include "avgcost/equilibrium.hpp"
#include "avgcost/errors.hpp"
#include "avgcost/format.hpp"
#include "avgcost/market.hpp"
#include "avgcost/mechanism.hpp"
#include "avgcost/metrics.hpp"
