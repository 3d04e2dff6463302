#pragma once

#include "dess/bench.hpp"
#include "dess/collision.hpp"
#include "dess/config.hpp"
#include "dess/depth_image.hpp"
#include "dess/errors.hpp"
#include "dess/geometry.hpp"
#include "dess/planner.hpp"
#include "dess/platform.hpp"
#include "dess/random.hpp"
#include "dess/sampling.hpp"
#include "dess/simulator.hpp"
#include "dess/steering.hpp"
#include "dess/trajectory.hpp"
#include "dess/world.hpp"
