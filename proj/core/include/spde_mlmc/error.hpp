#pragma once

#include <stdexcept>
#include <string>

namespace spde_mlmc {

/// Invalid arguments or mismatched objects passed by the caller.
class UsageError : public std::invalid_argument {
public:
    explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

/// A requested size does not fit the integer or counter representation.
class CapacityError : public UsageError {
public:
    explicit CapacityError(const std::string& what) : UsageError(what) {}
};

/// Breakdown inside a numerical kernel (zero pivot, non-finite state).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

#define SPDE_MLMC_REQUIRE(cond, msg)                 \
    do {                                             \
        if (!(cond)) throw ::spde_mlmc::UsageError(msg); \
    } while (false)

}  // namespace spde_mlmc
