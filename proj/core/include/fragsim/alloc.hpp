#pragma once

#include <optional>
#include <string>

#include "fragsim/spectrum.hpp"

namespace fragsim {

enum class Algorithm {
    LinearScan,       // "ls"  : gaps in increasing position from 0
    CircularScan,     // "cs"  : linear scan resuming where the last one stopped
    LargestFirstScan, // "lfs" : gaps in decreasing size, ties by smaller lo
};

Algorithm parse_algorithm(const std::string& name); // "ls" | "cs" | "lfs"
const char* algorithm_name(Algorithm a);

// Circular-scan position. Empty means start of spectrum (first gap), which
// makes the first CS allocation identical to LS. A non-empty cursor names a
// position known to lie inside some gap; releases may merge that gap with a
// neighbor, so it is re-resolved to the containing gap at plan time.
struct ScanCursor {
    std::optional<double> pos;
};

// All planners require 0 < size and throw Insufficient when size exceeds
// total_gap_size (callers check first; the throw is defensive). Every entry
// except the last covers its gap completely.

GapPlan plan_linear(const SpectrumState& state, double size);

GapPlan plan_largest_first(const SpectrumState& state, double size);

struct CircularPlan {
    GapPlan plan;
    ScanCursor cursor; // where the next scan starts
};
CircularPlan plan_circular(const SpectrumState& state, ScanCursor cursor, double size);

// Dispatch on the algorithm; updates the cursor in place for CircularScan.
GapPlan make_plan(const SpectrumState& state, Algorithm a, ScanCursor& cursor, double size);

} // namespace fragsim
