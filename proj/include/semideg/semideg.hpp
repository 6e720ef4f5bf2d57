#pragma once

#include "core.hpp"
#include "linalg.hpp"
#include "specialfn.hpp"
#include "companion.hpp"
#include "fusion.hpp"
#include "monodromy.hpp"
#include "ode.hpp"
#include "rigid3pt.hpp"
#include "schlesinger.hpp"
#include "taufun.hpp"
#include "crosscheck.hpp"
#include "random.hpp"
