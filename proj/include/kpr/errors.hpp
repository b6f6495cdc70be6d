#pragma once

#include <stdexcept>
#include <string>

namespace kpr {

struct dimension_error : std::invalid_argument {
  explicit dimension_error(const std::string& what) : std::invalid_argument(what) {}
};

struct degenerate_input_error : std::invalid_argument {
  explicit degenerate_input_error(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace kpr
