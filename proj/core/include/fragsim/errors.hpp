#pragma once

#include <stdexcept>
#include <string>

namespace fragsim {

// Base class for everything the simulator can throw on purpose.
struct SimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A gap plan does not match the state it is applied to (bad fill amounts,
// stale gap references, size mismatch).
struct PlanInfeasible : SimError {
    using SimError::SimError;
};

// Requested size exceeds the total free bandwidth. Callers are expected to
// check first; planners throw this defensively.
struct Insufficient : SimError {
    using SimError::SimError;
};

// Channel id is not active in the spectrum.
struct UnknownChannel : SimError {
    using SimError::SimError;
};

// An internal invariant failed. This signals an implementation bug, never a
// legitimate model condition.
struct CorruptState : SimError {
    using SimError::SimError;
};

// Normal fit requested on a sample with fewer than two distinct values.
struct DegenerateSample : SimError {
    using SimError::SimError;
};

// The two analytic routes for the throughput series disagree beyond tolerance.
struct CrossCheckFailure : SimError {
    using SimError::SimError;
};

} // namespace fragsim
