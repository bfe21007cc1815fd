#pragma once

#include "dce/analytic.hpp"
#include "dce/bogoliubov.hpp"
#include "dce/checks.hpp"
#include "dce/errors.hpp"
#include "dce/io.hpp"
#include "dce/moore.hpp"
#include "dce/parallel.hpp"
#include "dce/quadrature.hpp"
#include "dce/roots.hpp"
#include "dce/scenarios.hpp"
#include "dce/trajectory.hpp"
