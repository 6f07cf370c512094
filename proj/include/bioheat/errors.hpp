#pragma once

#include <stdexcept>
#include <string>

namespace bioheat {

// Invalid configuration, geometry, or data shapes; the CLI maps this to exit code 2.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Linear-solver breakdown (iteration cap hit, non-finite residual); CLI exit code 3.
struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bioheat
