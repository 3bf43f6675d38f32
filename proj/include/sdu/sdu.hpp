#pragma once

#include "sdu/baselines.hpp"
#include "sdu/greedy.hpp"
#include "sdu/harness.hpp"
#include "sdu/instance.hpp"
#include "sdu/io.hpp"
#include "sdu/objective.hpp"
#include "sdu/oracle.hpp"
#include "sdu/random.hpp"
#include "sdu/solver.hpp"
#include "sdu/stats.hpp"
#include "sdu/stochastic.hpp"

namespace sdu {
inline constexpr const char* kVersion = "1.0.0";
}
