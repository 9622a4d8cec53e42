#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace lrlab {

/// Invalid physical or mathematical input (bad spin value, non-Hermitian
/// matrix where a Hermitian one is required, site off the lattice, ...).
class domain_error : public std::runtime_error {
public:
    explicit domain_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A configured cap was exceeded (Hilbert dimension, enumeration node budget).
class resource_error : public std::runtime_error {
public:
    explicit resource_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A numerical backend failed (eigensolver did not converge, ...).
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Configuration text failed to parse or validate. Carries the full list of
/// problems, not just the first one.
class config_error : public std::runtime_error {
public:
    explicit config_error(std::string msg, std::vector<std::string> errs = {})
        : std::runtime_error(std::move(msg)), errors(std::move(errs)) {}
    std::vector<std::string> errors;
};

// Process exit codes used by the CLI.
enum exit_code : int {
    exit_ok = 0,
    exit_config = 2,
    exit_resource = 3,
    exit_numeric = 4,
};

} // namespace lrlab
