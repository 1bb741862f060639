#pragma once

#include "sgmix/init/cluster.hpp"
#include "sgmix/init/density_estimate.hpp"
#include "sgmix/init/initialize.hpp"
#include "sgmix/init/maxima.hpp"
#include "sgmix/init/net.hpp"
#include "sgmix/init/sigma_weight.hpp"
