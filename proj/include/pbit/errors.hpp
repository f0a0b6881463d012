#pragma once

#include <stdexcept>
#include <string>

namespace pbit {

// Invalid parameters or experiment configuration.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Containers that must agree in size do not.
struct shape_error : std::runtime_error {
    explicit shape_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Exhaustive enumeration requested beyond the supported budget.
struct budget_error : std::runtime_error {
    explicit budget_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Problem graph cannot be placed on the fabric's couplers.
struct embed_error : std::runtime_error {
    explicit embed_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace pbit
