#pragma once

#include <stdexcept>
#include <string>

namespace ssd {

// Lattice operations require the arctan(1/sqrt(M)) rotation; any other angle
// breaks the integer-coordinate structure they rely on.
struct UnsupportedAngleError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Both fading gains of a symbol are (numerically) zero: the observation
// carries no information and equalization would divide by zero.
struct DegenerateChannelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ssd
