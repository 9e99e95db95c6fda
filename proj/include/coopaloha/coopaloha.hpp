#pragma once

#include "coopaloha/analysis.hpp"
#include "coopaloha/decoders.hpp"
#include "coopaloha/geometry.hpp"
#include "coopaloha/graph.hpp"
#include "coopaloha/harness.hpp"
#include "coopaloha/random.hpp"
#include "coopaloha/traffic.hpp"
#include "coopaloha/cli.hpp"
#include "coopaloha/fixtures.hpp"
