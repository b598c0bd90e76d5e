#pragma once

#include <stdexcept>
#include <string>

namespace eflh {

// Bad user-supplied setup: invalid constants, learner/loss mismatch, malformed scenario.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Vector dimension does not match the domain.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Operation on an expert outside its alive window, or an empty active set.
struct LifecycleError : std::logic_error {
    using std::logic_error::logic_error;
};

// A class index outside the admissible range for the horizon.
struct ScheduleRangeError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

// A runtime invariant the analysis guarantees was breached mid-run
// (loss gap above G*D, pseudo-weight above its ceiling, simplex drift,
// more than one spawn where the schedule promises at most one).
struct ContractViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace eflh
