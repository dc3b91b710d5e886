#pragma once

#include "twistgap/errors.hpp"
#include "twistgap/numeric.hpp"
#include "twistgap/group.hpp"
#include "twistgap/lgt2d.hpp"
#include "twistgap/pcm1d.hpp"
#include "twistgap/partition_pair.hpp"
#include "twistgap/ising_analytic.hpp"
#include "twistgap/ising_oracle.hpp"
#include "twistgap/twist_mc.hpp"
