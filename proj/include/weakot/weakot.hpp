#pragma once

#include "config.hpp"
#include "core.hpp"
#include "costs.hpp"
#include "dual.hpp"
#include "hull.hpp"
#include "ineq.hpp"
#include "io.hpp"
#include "order.hpp"
#include "primal.hpp"
#include "product.hpp"
