#pragma once

#include "dynwalk/asymptotic.hpp"
#include "dynwalk/distribution.hpp"
#include "dynwalk/environment.hpp"
#include "dynwalk/error.hpp"
#include "dynwalk/exact.hpp"
#include "dynwalk/model.hpp"
#include "dynwalk/model_io.hpp"
#include "dynwalk/montecarlo.hpp"
#include "dynwalk/stationary.hpp"
#include "dynwalk/walker.hpp"
