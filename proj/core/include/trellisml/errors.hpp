#pragma once

#include <stdexcept>
#include <string>

namespace trellisml {

// Bad configuration supplied by the user (non-prime q, invalid generator, ...).
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// A documented precondition of an operation was violated by the caller.
struct contract_error : std::runtime_error {
    explicit contract_error(const std::string& what) : std::runtime_error(what) {}
};

// The request exceeds a configured enumeration/state budget.
struct resource_error : std::runtime_error {
    explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace trellisml
