#pragma once

#include "efimov_lab/core.hpp"
#include "efimov_lab/error.hpp"
#include "efimov_lab/hyperangular.hpp"
#include "efimov_lab/meanfield.hpp"
#include "efimov_lab/parallel.hpp"
#include "efimov_lab/radial.hpp"
#include "efimov_lab/roots.hpp"
#include "efimov_lab/stats.hpp"

namespace efimov {
inline constexpr const char* version = "0.1.0";
}
