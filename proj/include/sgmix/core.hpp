#pragma once

#include "sgmix/core/density.hpp"
#include "sgmix/core/errors.hpp"
#include "sgmix/core/gaussian_facts.hpp"
#include "sgmix/core/mixture.hpp"
#include "sgmix/core/mixture_io.hpp"
#include "sgmix/core/param_distance.hpp"
#include "sgmix/core/rng.hpp"
#include "sgmix/core/sampling.hpp"
#include "sgmix/core/separation.hpp"
