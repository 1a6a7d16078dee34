#include "statlab/format.hpp"

#include <array>
#include <charconv>

namespace statlab {

std::string format_real(double value) {
  std::array<char, 32> buf{};
  const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return {buf.data(), result.ptr};
}

}  // namespace statlab
