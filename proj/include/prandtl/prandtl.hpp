#pragma once

// Convenience header pulling in the whole library.

#include "prandtl/error.hpp"
#include "prandtl/grid.hpp"
#include "prandtl/stencil.hpp"
#include "prandtl/spectral.hpp"
#include "prandtl/lift.hpp"
#include "prandtl/good_unknown.hpp"
#include "prandtl/banded.hpp"
#include "prandtl/norms.hpp"
#include "prandtl/radius.hpp"
#include "prandtl/fit.hpp"
#include "prandtl/solver.hpp"
#include "prandtl/verify.hpp"
#include "prandtl/config.hpp"
#include "prandtl/io.hpp"
#include "prandtl/app.hpp"
