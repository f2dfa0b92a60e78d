#pragma once

// Umbrella header.

#include "cosub/banded.hpp"
#include "cosub/checker.hpp"
#include "cosub/expr.hpp"
#include "cosub/families.hpp"
#include "cosub/gaussmeas.hpp"
#include "cosub/hermite.hpp"
#include "cosub/linalg.hpp"
#include "cosub/quadrature.hpp"
#include "cosub/report.hpp"
