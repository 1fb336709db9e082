#pragma once

#include "analytics.hpp"
#include "experiment.hpp"
#include "model.hpp"
#include "optimizer.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "simulator.hpp"
#include "specfun.hpp"
#include "version.hpp"
