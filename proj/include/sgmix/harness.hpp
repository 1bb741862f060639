#pragma once

#include "sgmix/harness/config.hpp"
#include "sgmix/harness/generate.hpp"
#include "sgmix/harness/record.hpp"
#include "sgmix/harness/run.hpp"
#include "sgmix/harness/samples_io.hpp"
