#pragma once

#include "scldpc/channel.hpp"
#include "scldpc/code.hpp"
#include "scldpc/config.hpp"
#include "scldpc/decoder.hpp"
#include "scldpc/exponent_matrix.hpp"
#include "scldpc/fixed_point.hpp"
#include "scldpc/harness.hpp"
#include "scldpc/rational.hpp"
#include "scldpc/rng.hpp"
#include "scldpc/window.hpp"
