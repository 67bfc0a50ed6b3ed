#pragma once

// Solver library for competitive equilibria of linear and quasi-linear
// Fisher markets: accelerated price adjustment in log-price space, exact-CE
// recovery from approximate prices, max-flow optimality certification, and
// tatonnement / proportional-response baselines.

#include "fisher/adaptive.hpp"
#include "fisher/apm.hpp"
#include "fisher/baselines.hpp"
#include "fisher/certify.hpp"
#include "fisher/generate.hpp"
#include "fisher/io.hpp"
#include "fisher/market.hpp"
#include "fisher/maxflow.hpp"
#include "fisher/objective.hpp"
#include "fisher/recovery.hpp"
