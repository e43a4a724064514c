#pragma once

#include <stdexcept>
#include <string>

namespace sgrf {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed files, schema mismatches, bad configuration. Maps to exit code 2
// in the CLI and SGRF_STATUS_INPUT_ERROR in the C API.
class InputError : public Error {
public:
    explicit InputError(const std::string& what) : Error(what) {}
};

// Violated algorithmic preconditions (single-class training data, minority
// class too small, ...). Maps to exit code 1 / SGRF_STATUS_COMPUTE_ERROR.
class ComputeError : public Error {
public:
    explicit ComputeError(const std::string& what) : Error(what) {}
};

}  // namespace sgrf
