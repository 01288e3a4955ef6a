#pragma once

#include <vector>

namespace escvs {

using Vec = std::vector<double>;
using Mat = std::vector<std::vector<double>>; // row-major, rectangular

} // namespace escvs
