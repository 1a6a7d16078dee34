#pragma once

#include <string>

namespace statlab {

/// Shortest decimal text that round-trips to the same double.
std::string format_real(double value);

}  // namespace statlab
