#pragma once

#include <stdexcept>
#include <string>

namespace aon {

/// Violated precondition (bad parameters, out-of-range arguments).
/// CLI maps this family to exit code 2.
class PreconditionError : public std::invalid_argument {
public:
    explicit PreconditionError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// A combinatorial computation would exceed the enumeration budget.
class BudgetExceeded : public PreconditionError {
public:
    explicit BudgetExceeded(const std::string& msg) : PreconditionError(msg) {}
};

/// Rejected lambda below the validity boundary of the exact chi-square formula.
class LambdaTooSmall : public PreconditionError {
public:
    explicit LambdaTooSmall(const std::string& msg) : PreconditionError(msg) {}
};

/// Rejection sampler gave up; the conditioning event is too unlikely for the
/// chosen (gamma, tau).
class RejectionBudgetExhausted : public std::runtime_error {
public:
    explicit RejectionBudgetExhausted(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace aon
