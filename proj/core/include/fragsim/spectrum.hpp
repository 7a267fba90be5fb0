#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <utility>
#include <vector>

#include "fragsim/errors.hpp"

namespace fragsim {

using ChannelId = std::int64_t;
inline constexpr ChannelId kGapOwner = -1;

// Residual gaps shorter than this are treated as exact fits and merged away,
// so rounding can never leave degenerate slivers in the segment sequence.
inline constexpr double kSliver = 1e-12;

// Absolute tolerance for length conservation checks.
inline constexpr double kLengthTol = 1e-9;

struct SegmentView {
    double lo;
    double hi;
    ChannelId owner; // kGapOwner for gaps
    bool is_gap() const { return owner < 0; }
};

// Counts of fragments by type (a fragment is of type i if it touches exactly
// i other fragments), plus the gap count and the boundary indicators.
//
// For states where a gap touches the right boundary (always the case under
// Linear Scan), identity_holds() reduces to g == n0 + n1/2 + i_origin.
// Circular and Largest-First scans can cover the spectrum end with a
// fragment, which removes one gap from that count; the i_end term below
// accounts for it, so the identity is exact for every reachable state.
struct TypeCensus {
    int n0 = 0;
    int n1 = 0;
    int n2 = 0;
    int g = 0;
    int i_origin = 0; // 1 iff a gap starts at position 0
    int i_end = 0;    // 1 iff a gap ends at position 1

    int f() const { return n0 + n1 + n2; }
    int sigma() const { return f() + g; }

    bool identity_holds() const {
        return 2 * g == 2 * n0 + n1 + 2 * (i_origin + i_end - 1);
    }
    bool operator==(const TypeCensus&) const = default;
};

// Per-departure observables of one channel release.
// Types are measured immediately before the fragments are freed.
struct ReleaseSummary {
    int d0 = 0;
    int d1 = 0;
    int d2 = 0;
    int j = 0;       // 1 iff a departing fragment starts at position 0
    int j_end = 0;   // 1 iff a departing fragment ends at position 1
    int g_minus = 0; // gap count after the release, before any admissions
};

// One planner decision: fill `fill` of the gap starting at `gap_lo`.
struct PlanEntry {
    double gap_lo;
    double fill;
};

// Ordered list of gaps to fill for one admission. Every entry except
// possibly the last covers its gap completely; the last fragment is
// left-justified in the last gap.
struct GapPlan {
    std::vector<PlanEntry> entries;

    double total_fill() const {
        double s = 0;
        for (const auto& e : entries) s += e.fill;
        return s;
    }
};

// The spectrum [0,1] as an ordered partition into channel fragments and
// maximal gaps.
//
// Segments are kept in a position-ordered map (stable iterators, O(1)
// neighbor access), with two auxiliary gap indexes: by position for the
// linear/circular scans and by (length desc, position asc) for the
// largest-first scan. The type census is maintained incrementally; census()
// recounts from scratch for cross-checking.
class SpectrumState {
  public:
    // Initial state: one gap covering (0,1).
    SpectrumState();

    // --- queries ---------------------------------------------------------

    // Total free bandwidth h = 1 - sum of channel sizes.
    double total_gap_size() const { return gap_total_; }
    // Sum of active channel sizes.
    double occupied_total() const { return size_total_; }

    int gap_count() const { return gaps_n_; }
    int fragment_count() const { return counts_[0] + counts_[1] + counts_[2]; }
    int channel_count() const { return static_cast<int>(channels_.size()); }
    int segment_count() const { return static_cast<int>(segs_.size()); }

    // Incrementally maintained census, O(1).
    TypeCensus current_census() const;
    // From-scratch adjacency walk over the segment sequence.
    TypeCensus census() const;

    bool has_channel(ChannelId id) const { return channels_.count(id) != 0; }
    double channel_size(ChannelId id) const;
    int channel_fragment_count(ChannelId id) const;
    double departure_time(ChannelId id) const;
    void set_departure_time(ChannelId id, double t);
    std::vector<ChannelId> active_channels() const;

    std::optional<double> first_gap_lo() const;

    // Gap indexes, exposed for the planners.
    // by position: lo -> hi; by size: key (-length, lo).
    const std::map<double, double>& gaps_by_position() const { return gaps_lo_; }
    const std::set<std::pair<double, double>>& gaps_by_size() const { return gaps_size_; }

    std::vector<SegmentView> segments() const;

    // buf[k] = number of active channels with exactly k fragments.
    void fragment_count_histogram(std::vector<std::uint32_t>& buf) const;

    // --- mutations -------------------------------------------------------

    // Apply a gap plan: each fully-filled gap becomes one fragment of the
    // new channel; the last gap splits into a left-justified fragment plus a
    // residual gap (dropped if shorter than kSliver). Throws PlanInfeasible.
    void carve(const GapPlan& plan, ChannelId id, double size);

    // Free every fragment of the channel, merging adjacent gaps. Throws
    // UnknownChannel. The returned summary satisfies, exactly,
    //   g_minus == g_before - d0 + d2 + j + j_end.
    ReleaseSummary release(ChannelId id);

    // --- diagnostics -----------------------------------------------------

    // Full structural check: partition of [0,1], gap maximality, no
    // same-channel adjacency, index consistency, census match, length
    // conservation. Throws CorruptState with a description.
    void validate() const;

    // One line per segment: "lo hi occupant", occupant `G` or the channel id.
    void dump(std::ostream& os) const;

    // Deliberately unbalances the cached census so detector paths can be
    // exercised end to end.
    void corrupt_census_for_tests() { ++counts_[0]; }

  private:
    struct Seg {
        double hi;
        ChannelId owner;
    };
    using SegMap = std::map<double, Seg>; // key = lo
    struct ChannelInfo {
        double size = 0;
        double departure_time = 0;
        std::vector<double> frag_los;
    };

    SegMap segs_;
    std::map<double, double> gaps_lo_;
    std::set<std::pair<double, double>> gaps_size_;
    std::map<ChannelId, ChannelInfo> channels_;
    int counts_[3] = {0, 0, 0}; // fragments by type
    int gaps_n_ = 0;
    double gap_total_ = 0;
    double size_total_ = 0;

    int frag_type(SegMap::const_iterator it) const;
    void bump_type(int type, int delta);
    void index_gap_insert(double lo, double hi);
    void index_gap_erase(double lo, double hi);
    void fill_gap_fully(SegMap::iterator it, ChannelId id, ChannelInfo& ch);
    void fill_gap_partially(SegMap::iterator it, double fill, ChannelId id, ChannelInfo& ch);
    void free_fragment(SegMap::iterator it);
    void check_identity(const char* where) const;
};

} // namespace fragsim
