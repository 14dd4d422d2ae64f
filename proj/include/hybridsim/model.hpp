#pragma once

#include "hybridsim/model/params.hpp"
#include "hybridsim/model/response.hpp"
#include "hybridsim/model/dispersion.hpp"
#include "hybridsim/model/bandwidth.hpp"
#include "hybridsim/model/multimode.hpp"
