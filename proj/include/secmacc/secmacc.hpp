#pragma once

#include "secmacc/bits.hpp"
#include "secmacc/cyclic.hpp"
#include "secmacc/delivery.hpp"
#include "secmacc/error.hpp"
#include "secmacc/gf2.hpp"
#include "secmacc/index_coding.hpp"
#include "secmacc/placement.hpp"
#include "secmacc/random.hpp"
#include "secmacc/rational.hpp"
#include "secmacc/security.hpp"
#include "secmacc/simulation.hpp"
#include "secmacc/system_model.hpp"
#include "secmacc/tradeoff.hpp"
