#pragma once

#include "dpower/params.hpp"
#include "dpower/nonlinearity.hpp"
#include "dpower/criteria.hpp"
#include "dpower/shooting.hpp"
#include "dpower/sweep.hpp"
