#pragma once

#include <stdexcept>

namespace qdesign {

// An operation would exceed its enumeration, memory or increment budget.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// No (b, c) pair produced a block of the requested size.
class EmptyStructureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qdesign
