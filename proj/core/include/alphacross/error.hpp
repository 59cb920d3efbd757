#pragma once

#include <stdexcept>
#include <string>

namespace alphacross {

// Bad input or violated precondition. The CLI maps this to exit code 2.
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// Numerically degenerate result (nothing to estimate, singular system). Exit code 3.
class DegenerateError : public std::runtime_error {
public:
    explicit DegenerateError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace alphacross
