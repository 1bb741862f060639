#pragma once

#include "sgmix/numerics/finite_diff.hpp"
#include "sgmix/numerics/linalg.hpp"
#include "sgmix/numerics/newton.hpp"
#include "sgmix/numerics/quadrature.hpp"
