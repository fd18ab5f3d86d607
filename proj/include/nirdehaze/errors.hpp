#pragma once

#include <stdexcept>

namespace nirdehaze {

/// A linear system that has no unique solution for the given inputs.
class DegenerateSystemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reading or writing a file failed; the message names the path and the reason.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace nirdehaze
