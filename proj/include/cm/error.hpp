#pragma once

#include <stdexcept>
#include <string>

namespace cm {

// Input that violates an operation's preconditions (bad shape, wrong degree, malformed file).
class InvalidInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Work estimate exceeds the operation's configured budget.
class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cm
