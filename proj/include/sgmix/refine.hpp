#pragma once

#include "sgmix/refine/estimate_b.hpp"
#include "sgmix/refine/leakage.hpp"
#include "sgmix/refine/moment_system.hpp"
#include "sgmix/refine/refine.hpp"
#include "sgmix/refine/region.hpp"
