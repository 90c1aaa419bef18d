#pragma once

#include "eulerrom/euler.hpp"
#include "eulerrom/fields.hpp"
#include "eulerrom/finite_volume.hpp"
#include "eulerrom/harness.hpp"
#include "eulerrom/inner_products.hpp"
#include "eulerrom/io.hpp"
#include "eulerrom/least_squares.hpp"
#include "eulerrom/pod.hpp"
#include "eulerrom/problems.hpp"
#include "eulerrom/rom.hpp"
#include "eulerrom/turbulence.hpp"
