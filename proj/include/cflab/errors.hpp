#pragma once

#include <stdexcept>
#include <string>

namespace cflab {

// Error taxonomy shared by all modules. The CLI maps these onto exit codes:
//   ValidationError -> 2   (bad arguments, bad config, domain violations)
//   BudgetError     -> 3   (enumeration/node caps exceeded)
//   NumericalError  -> 4   (bracket failures, nonconvergence)
struct ValidationError : std::invalid_argument {
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

struct BudgetError : std::runtime_error {
    explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cflab
