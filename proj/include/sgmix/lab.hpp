#pragma once

#include "sgmix/lab/collision.hpp"
#include "sgmix/lab/distances.hpp"
#include "sgmix/lab/injective_norm.hpp"
#include "sgmix/lab/moments.hpp"
#include "sgmix/lab/scheffe.hpp"
