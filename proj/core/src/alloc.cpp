#include "fragsim/alloc.hpp"

namespace fragsim {

Algorithm parse_algorithm(const std::string& name) {
    if (name == "ls") return Algorithm::LinearScan;
    if (name == "cs") return Algorithm::CircularScan;
    if (name == "lfs") return Algorithm::LargestFirstScan;
    throw std::invalid_argument("unknown algorithm '" + name + "' (expected ls, cs or lfs)");
}

const char* algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::LinearScan: return "ls";
        case Algorithm::CircularScan: return "cs";
        case Algorithm::LargestFirstScan: return "lfs";
    }
    return "?";
}

namespace {

void check_request(const SpectrumState& state, double size) {
    if (!(size > 0)) throw Insufficient("requested size must be positive");
    if (size > state.total_gap_size() + kSliver)
        throw Insufficient("requested size exceeds available bandwidth");
}

// Fill amount for one gap: the whole gap when the remaining need covers it
// up to a sliver, otherwise the remaining need (last entry, left-justified).
double take_from(double len, double rem) {
    return rem >= len - kSliver ? len : rem;
}

} // namespace

GapPlan plan_linear(const SpectrumState& state, double size) {
    check_request(state, size);
    GapPlan plan;
    double rem = size;
    for (const auto& [lo, hi] : state.gaps_by_position()) {
        if (rem < kSliver) break;
        const double take = take_from(hi - lo, rem);
        plan.entries.push_back({lo, take});
        rem -= take;
    }
    if (rem >= kSliver) throw Insufficient("gap scan exhausted before size was met");
    return plan;
}

GapPlan plan_largest_first(const SpectrumState& state, double size) {
    check_request(state, size);
    GapPlan plan;
    double rem = size;
    // Size index keys are (-length, lo): forward order is size desc, lo asc.
    for (const auto& [neg_len, lo] : state.gaps_by_size()) {
        if (rem < kSliver) break;
        const double take = take_from(-neg_len, rem);
        plan.entries.push_back({lo, take});
        rem -= take;
    }
    if (rem >= kSliver) throw Insufficient("gap scan exhausted before size was met");
    return plan;
}

CircularPlan plan_circular(const SpectrumState& state, ScanCursor cursor, double size) {
    check_request(state, size);
    const auto& gaps = state.gaps_by_position();
    if (gaps.empty()) throw Insufficient("no gaps");

    // Resolve the cursor to the gap containing it, else the next gap in
    // circular order.
    auto start = gaps.begin();
    if (cursor.pos) {
        auto it = gaps.upper_bound(*cursor.pos);
        if (it != gaps.begin()) {
            auto prev = std::prev(it);
            if (prev->second > *cursor.pos) it = prev;
        }
        if (it == gaps.end()) it = gaps.begin();
        start = it;
    }

    CircularPlan out;
    double rem = size;
    auto it = start;
    const std::size_t n_gaps = gaps.size();
    std::size_t used = 0;
    bool last_full = false;
    double last_lo = 0, last_take = 0;
    while (rem >= kSliver && used < n_gaps) {
        const double len = it->second - it->first;
        const double take = take_from(len, rem);
        out.plan.entries.push_back({it->first, take});
        last_lo = it->first;
        last_take = take;
        last_full = len - take < kSliver;
        rem -= take;
        ++used;
        ++it;
        if (it == gaps.end()) it = gaps.begin(); // wrap past the end of [0,1]
    }
    if (rem >= kSliver) throw Insufficient("gap scan exhausted before size was met");

    if (!last_full) {
        out.cursor.pos = last_lo + last_take; // residual gap of the last gap used
    } else if (used == n_gaps) {
        out.cursor.pos.reset(); // every gap consumed; restart from the first gap
    } else {
        out.cursor.pos = it->first; // advance to the next gap in circular order
    }
    return out;
}

GapPlan make_plan(const SpectrumState& state, Algorithm a, ScanCursor& cursor, double size) {
    switch (a) {
        case Algorithm::LinearScan: return plan_linear(state, size);
        case Algorithm::LargestFirstScan: return plan_largest_first(state, size);
        case Algorithm::CircularScan: {
            CircularPlan cp = plan_circular(state, cursor, size);
            cursor = cp.cursor;
            return std::move(cp.plan);
        }
    }
    throw std::invalid_argument("bad algorithm");
}

} // namespace fragsim
