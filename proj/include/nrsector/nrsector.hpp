// Umbrella header: the whole library.

#pragma once

#include "analytic_sector.hpp"
#include "certificate.hpp"
#include "core.hpp"
#include "numerical_range.hpp"
#include "operators.hpp"
#include "optim.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "scalar_forms.hpp"
#include "serialize.hpp"
#include "version.hpp"
