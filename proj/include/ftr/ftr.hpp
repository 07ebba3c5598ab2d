#pragma once

#include "ftr/classify.hpp"
#include "ftr/error.hpp"
#include "ftr/metrics.hpp"
#include "ftr/models.hpp"
#include "ftr/montecarlo.hpp"
#include "ftr/specfun.hpp"
#include "ftr/sweep.hpp"
