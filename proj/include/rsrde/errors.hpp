#pragma once

#include <stdexcept>
#include <string>

namespace rsrde {

/// Alternating-minimization loop failed to reach its tolerance within the
/// iteration cap. `position` is the source component that failed, or -1.
class NonConvergenceError : public std::runtime_error {
public:
    explicit NonConvergenceError(const std::string& what, int position = -1)
        : std::runtime_error(what), position_(position) {}
    int position() const noexcept { return position_; }

private:
    int position_;
};

/// Requested (rate, distortion) targets lie off the achievable surface.
/// Carries the closest achievable rate at the requested distortion.
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(const std::string& what, double frontier_rate)
        : std::runtime_error(what), frontier_rate_(frontier_rate) {}
    double frontier_rate() const noexcept { return frontier_rate_; }

private:
    double frontier_rate_;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rsrde
