#pragma once

#include <stdexcept>

namespace pbm {

// Argument outside its admissible range (e.g. restriction level m > n).
struct range_error : std::out_of_range {
  using std::out_of_range::out_of_range;
};

// Operands live on different ground sets or simplices.
struct dimension_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Invalid numeric input (negative mass, bad simplex sum, alpha <= 0).
struct domain_error : std::domain_error {
  using std::domain_error::domain_error;
};

// A partition is not an admissible state (more than k blocks).
struct state_error : std::logic_error {
  using std::logic_error::logic_error;
};

// Requested object exceeds the dense size guards.
struct size_error : std::length_error {
  using std::length_error::length_error;
};

// The stationary distribution is not guaranteed to be unique.
struct uniqueness_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pbm
