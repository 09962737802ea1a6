#pragma once

#include "qmf/tensor.hpp"

#include <string>

namespace qmf {

/// 12 significant digits, with -0 normalized to 0. All user-facing text
/// output goes through this so identical inputs yield identical bytes.
std::string fmt12(double v);

/// Complex rendering: "a", "a + bi" or "a - bi" using fmt12 parts; pure
/// real values drop the imaginary term.
std::string fmt12(Complex v);

} // namespace qmf
