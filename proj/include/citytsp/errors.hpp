#pragma once

#include <stdexcept>
#include <string>

namespace citytsp {

/// Bad arguments or violated preconditions. CLI exit code 2.
struct ParameterError : std::invalid_argument {
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// Request exceeds a hard size/capability cap. CLI exit code 3.
struct CapabilityError : std::runtime_error {
    explicit CapabilityError(const std::string& what) : std::runtime_error(what) {}
};

/// A hard invariant failed at runtime. CLI exit code 4.
struct InvariantError : std::runtime_error {
    explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace citytsp
