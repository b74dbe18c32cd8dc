#pragma once

#include "maxlab/analysis.hpp"
#include "maxlab/errors.hpp"
#include "maxlab/geometry.hpp"
#include "maxlab/grid.hpp"
#include "maxlab/maximal.hpp"
#include "maxlab/profile.hpp"
#include "maxlab/table.hpp"
#include "maxlab/verify.hpp"
