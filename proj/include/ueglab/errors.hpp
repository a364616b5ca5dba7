#pragma once

#include <stdexcept>

namespace ueg {

// Configuration-space budget exhausted; CLI maps this to exit code 3.
class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace ueg
