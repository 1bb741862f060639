#pragma once

#include "sgmix/pca/reduce.hpp"
