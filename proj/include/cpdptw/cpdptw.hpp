#pragma once

#include "cpdptw/common.hpp"
#include "cpdptw/instance.hpp"
#include "cpdptw/network.hpp"
#include "cpdptw/energy.hpp"
#include "cpdptw/env.hpp"
#include "cpdptw/solver.hpp"
#include "cpdptw/simplex.hpp"
#include "cpdptw/coalition.hpp"
#include "cpdptw/policy.hpp"
#include "cpdptw/scenario.hpp"
