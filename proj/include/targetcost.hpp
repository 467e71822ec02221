#pragma once

#include "targetcost/errors.hpp"
#include "targetcost/params.hpp"
#include "targetcost/gaussian.hpp"
#include "targetcost/dopri5.hpp"
#include "targetcost/g_solver.hpp"
#include "targetcost/walk_oracle.hpp"
#include "targetcost/parallel.hpp"
#include "targetcost/path_simulator.hpp"
#include "targetcost/exp_case.hpp"
#include "targetcost/io.hpp"
