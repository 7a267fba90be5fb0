#include "fragsim/spectrum.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace fragsim {

namespace {

std::string describe(double lo, double hi) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "(%.17g,%.17g)", lo, hi);
    return buf;
}

} // namespace

SpectrumState::SpectrumState() {
    segs_.emplace(0.0, Seg{1.0, kGapOwner});
    gaps_lo_.emplace(0.0, 1.0);
    gaps_size_.emplace(-1.0, 0.0);
    gaps_n_ = 1;
    gap_total_ = 1.0;
}

TypeCensus SpectrumState::current_census() const {
    TypeCensus c;
    c.n0 = counts_[0];
    c.n1 = counts_[1];
    c.n2 = counts_[2];
    c.g = gaps_n_;
    c.i_origin = segs_.begin()->second.owner < 0 ? 1 : 0;
    c.i_end = std::prev(segs_.end())->second.owner < 0 ? 1 : 0;
    return c;
}

TypeCensus SpectrumState::census() const {
    TypeCensus c;
    for (auto it = segs_.begin(); it != segs_.end(); ++it) {
        if (it->second.owner < 0) {
            ++c.g;
            if (it == segs_.begin()) c.i_origin = 1;
            if (std::next(it) == segs_.end()) c.i_end = 1;
        } else {
            switch (frag_type(it)) {
                case 0: ++c.n0; break;
                case 1: ++c.n1; break;
                default: ++c.n2; break;
            }
        }
    }
    return c;
}

double SpectrumState::channel_size(ChannelId id) const {
    auto it = channels_.find(id);
    if (it == channels_.end()) throw UnknownChannel("channel " + std::to_string(id) + " not active");
    return it->second.size;
}

int SpectrumState::channel_fragment_count(ChannelId id) const {
    auto it = channels_.find(id);
    if (it == channels_.end()) throw UnknownChannel("channel " + std::to_string(id) + " not active");
    return static_cast<int>(it->second.frag_los.size());
}

double SpectrumState::departure_time(ChannelId id) const {
    auto it = channels_.find(id);
    if (it == channels_.end()) throw UnknownChannel("channel " + std::to_string(id) + " not active");
    return it->second.departure_time;
}

void SpectrumState::set_departure_time(ChannelId id, double t) {
    auto it = channels_.find(id);
    if (it == channels_.end()) throw UnknownChannel("channel " + std::to_string(id) + " not active");
    it->second.departure_time = t;
}

std::vector<ChannelId> SpectrumState::active_channels() const {
    std::vector<ChannelId> out;
    out.reserve(channels_.size());
    for (const auto& [id, info] : channels_) out.push_back(id);
    return out;
}

std::optional<double> SpectrumState::first_gap_lo() const {
    if (gaps_lo_.empty()) return std::nullopt;
    return gaps_lo_.begin()->first;
}

std::vector<SegmentView> SpectrumState::segments() const {
    std::vector<SegmentView> out;
    out.reserve(segs_.size());
    for (const auto& [lo, seg] : segs_) out.push_back({lo, seg.hi, seg.owner});
    return out;
}

void SpectrumState::fragment_count_histogram(std::vector<std::uint32_t>& buf) const {
    buf.clear();
    for (const auto& [id, info] : channels_) {
        const std::size_t n = info.frag_los.size();
        if (buf.size() <= n) buf.resize(n + 1, 0);
        ++buf[n];
    }
}

int SpectrumState::frag_type(SegMap::const_iterator it) const {
    int t = 0;
    if (it != segs_.begin() && std::prev(it)->second.owner >= 0) ++t;
    if (std::next(it) != segs_.end() && std::next(it)->second.owner >= 0) ++t;
    return t;
}

void SpectrumState::bump_type(int type, int delta) {
    counts_[type] += delta;
}

void SpectrumState::index_gap_insert(double lo, double hi) {
    gaps_lo_[lo] = hi;
    gaps_size_.emplace(-(hi - lo), lo);
    ++gaps_n_;
}

void SpectrumState::index_gap_erase(double lo, double hi) {
    gaps_lo_.erase(lo);
    gaps_size_.erase({-(hi - lo), lo});
    --gaps_n_;
}

void SpectrumState::fill_gap_fully(SegMap::iterator it, ChannelId id, ChannelInfo& ch) {
    const double lo = it->first;
    const double hi = it->second.hi;
    const auto prev = it == segs_.begin() ? segs_.end() : std::prev(it);
    const auto next = std::next(it);

    // Neighbors of a gap are fragments; each gains one touching fragment.
    if (prev != segs_.end()) {
        const int t = frag_type(prev);
        bump_type(t, -1);
        bump_type(t + 1, +1);
    }
    if (next != segs_.end()) {
        const int t = frag_type(next);
        bump_type(t, -1);
        bump_type(t + 1, +1);
    }
    bump_type((prev != segs_.end() ? 1 : 0) + (next != segs_.end() ? 1 : 0), +1);

    index_gap_erase(lo, hi);
    gap_total_ -= hi - lo;
    it->second.owner = id;
    ch.frag_los.push_back(lo);
}

void SpectrumState::fill_gap_partially(SegMap::iterator it, double fill, ChannelId id,
                                       ChannelInfo& ch) {
    const double lo = it->first;
    const double hi = it->second.hi;
    const double mid = lo + fill;
    const auto prev = it == segs_.begin() ? segs_.end() : std::prev(it);

    if (prev != segs_.end()) {
        const int t = frag_type(prev);
        bump_type(t, -1);
        bump_type(t + 1, +1);
    }
    // New fragment touches the residual gap on its right.
    bump_type(prev != segs_.end() ? 1 : 0, +1);

    index_gap_erase(lo, hi);
    index_gap_insert(mid, hi);
    gap_total_ -= fill;
    it->second = Seg{mid, id};
    segs_.emplace_hint(std::next(it), mid, Seg{hi, kGapOwner});
    ch.frag_los.push_back(lo);
}

void SpectrumState::carve(const GapPlan& plan, ChannelId id, double size) {
    if (plan.entries.empty()) throw PlanInfeasible("empty plan");
    if (channels_.count(id)) throw PlanInfeasible("channel id already active");

    double total = 0;
    std::set<double> seen;
    for (std::size_t i = 0; i < plan.entries.size(); ++i) {
        const auto& e = plan.entries[i];
        if (!seen.insert(e.gap_lo).second)
            throw PlanInfeasible("plan references the same gap twice");
        auto git = gaps_lo_.find(e.gap_lo);
        if (git == gaps_lo_.end())
            throw PlanInfeasible("plan references no gap at lo=" + std::to_string(e.gap_lo));
        const double len = git->second - git->first;
        if (e.fill <= 0 || e.fill > len + kSliver)
            throw PlanInfeasible("fill amount exceeds gap length at " + describe(git->first, git->second));
        const bool full = len - e.fill < kSliver;
        if (!full && i + 1 != plan.entries.size())
            throw PlanInfeasible("non-final plan entry does not cover its gap");
        total += e.fill;
    }
    if (std::abs(total - size) > 1e-12)
        throw PlanInfeasible("plan fills do not sum to the requested size");

    auto [cit, inserted] = channels_.emplace(id, ChannelInfo{size, 0.0, {}});
    ChannelInfo& ch = cit->second;
    ch.frag_los.reserve(plan.entries.size());

    for (const auto& e : plan.entries) {
        auto it = segs_.find(e.gap_lo);
        const double len = it->second.hi - e.gap_lo;
        if (len - e.fill < kSliver)
            fill_gap_fully(it, id, ch);
        else
            fill_gap_partially(it, e.fill, id, ch);
    }
    size_total_ += size;
    check_identity("carve");
}

void SpectrumState::free_fragment(SegMap::iterator it) {
    const double lo = it->first;
    const double hi = it->second.hi;
    auto prev = it == segs_.begin() ? segs_.end() : std::prev(it);
    auto next = std::next(it);
    const bool prev_gap = prev != segs_.end() && prev->second.owner < 0;
    const bool next_gap = next != segs_.end() && next->second.owner < 0;
    const bool prev_frag = prev != segs_.end() && !prev_gap;
    const bool next_frag = next != segs_.end() && !next_gap;

    bump_type((prev_frag ? 1 : 0) + (next_frag ? 1 : 0), -1);
    if (prev_frag) {
        const int t = frag_type(prev);
        bump_type(t, -1);
        bump_type(t - 1, +1);
    }
    if (next_frag) {
        const int t = frag_type(next);
        bump_type(t, -1);
        bump_type(t - 1, +1);
    }

    const double merged_lo = prev_gap ? prev->first : lo;
    const double merged_hi = next_gap ? next->second.hi : hi;
    if (prev_gap) {
        index_gap_erase(prev->first, prev->second.hi);
        prev->second.hi = merged_hi;
        segs_.erase(it);
    } else {
        it->second = Seg{merged_hi, kGapOwner};
    }
    if (next_gap) {
        index_gap_erase(next->first, next->second.hi);
        segs_.erase(next);
    }
    index_gap_insert(merged_lo, merged_hi);
    gap_total_ += hi - lo;
}

ReleaseSummary SpectrumState::release(ChannelId id) {
    auto cit = channels_.find(id);
    if (cit == channels_.end())
        throw UnknownChannel("channel " + std::to_string(id) + " not active");
    ChannelInfo& ch = cit->second;

    ReleaseSummary sum;
    const int g_before = gaps_n_;
    // Types first, on the untouched state. Fragments of one channel are never
    // contiguous, so these counts match a one-by-one measurement in any order.
    for (double lo : ch.frag_los) {
        auto it = segs_.find(lo);
        switch (frag_type(it)) {
            case 0: ++sum.d0; break;
            case 1: ++sum.d1; break;
            default: ++sum.d2; break;
        }
        if (lo == 0.0) sum.j = 1;
        if (it->second.hi == 1.0) sum.j_end = 1;
    }
    for (double lo : ch.frag_los) free_fragment(segs_.find(lo));

    size_total_ -= ch.size;
    channels_.erase(cit);
    sum.g_minus = gaps_n_;
    if (sum.g_minus != g_before - sum.d0 + sum.d2 + sum.j + sum.j_end)
        throw CorruptState("gap-count relation failed on release of channel " + std::to_string(id));
    check_identity("release");
    return sum;
}

void SpectrumState::check_identity(const char* where) const {
    const TypeCensus c = current_census();
    if (!c.identity_holds()) {
        std::ostringstream os;
        os << "census identity failed after " << where << ": g=" << c.g << " n0=" << c.n0
           << " n1=" << c.n1 << " n2=" << c.n2 << " i0=" << c.i_origin << " i1=" << c.i_end;
        throw CorruptState(os.str());
    }
}

void SpectrumState::validate() const {
    auto fail = [](const std::string& msg) { throw CorruptState("validate: " + msg); };

    if (segs_.empty()) fail("no segments");
    if (segs_.begin()->first != 0.0) fail("first segment does not start at 0");
    if (std::prev(segs_.end())->second.hi != 1.0) fail("last segment does not end at 1");

    double len_sum = 0;
    double gap_sum = 0;
    int gaps = 0;
    for (auto it = segs_.begin(); it != segs_.end(); ++it) {
        const double lo = it->first;
        const double hi = it->second.hi;
        if (!(lo < hi)) fail("zero-length segment at " + describe(lo, hi));
        len_sum += hi - lo;
        auto next = std::next(it);
        if (next != segs_.end()) {
            if (next->first != hi) fail("segments not contiguous at " + describe(lo, hi));
            if (it->second.owner < 0 && next->second.owner < 0)
                fail("adjacent gaps at " + describe(lo, hi));
            if (it->second.owner >= 0 && it->second.owner == next->second.owner)
                fail("same-channel adjacency at " + describe(lo, hi));
        }
        if (it->second.owner < 0) {
            ++gaps;
            gap_sum += hi - lo;
            auto git = gaps_lo_.find(lo);
            if (git == gaps_lo_.end() || git->second != hi)
                fail("gap missing from position index at " + describe(lo, hi));
            if (!gaps_size_.count({-(hi - lo), lo}))
                fail("gap missing from size index at " + describe(lo, hi));
        }
    }
    if (std::abs(len_sum - 1.0) > kLengthTol) fail("segment lengths do not sum to 1");
    if (gaps != gaps_n_) fail("gap count mismatch");
    if (static_cast<int>(gaps_lo_.size()) != gaps || static_cast<int>(gaps_size_.size()) != gaps)
        fail("gap index size mismatch");
    if (std::abs(gap_sum - gap_total_) > kLengthTol) fail("gap total drifted");
    if (std::abs(size_total_ + gap_total_ - 1.0) > kLengthTol) fail("length conservation failed");

    double sizes = 0;
    for (const auto& [id, info] : channels_) {
        if (info.frag_los.empty()) fail("channel " + std::to_string(id) + " has no fragments");
        double s = 0;
        for (double lo : info.frag_los) {
            auto it = segs_.find(lo);
            if (it == segs_.end() || it->second.owner != id)
                fail("stale fragment reference in channel " + std::to_string(id));
            s += it->second.hi - it->first;
        }
        if (std::abs(s - info.size) > kLengthTol * std::max(1.0, info.size))
            fail("fragment lengths do not sum to channel size for " + std::to_string(id));
        sizes += s;
    }
    if (std::abs(sizes + gap_sum - 1.0) > kLengthTol) fail("partition does not cover [0,1]");

    if (census() != current_census()) fail("incremental census does not match recount");
    if (!current_census().identity_holds()) fail("census identity violated");
}

void SpectrumState::dump(std::ostream& os) const {
    char buf[96];
    for (const auto& [lo, seg] : segs_) {
        if (seg.owner < 0)
            std::snprintf(buf, sizeof(buf), "%.17g %.17g G\n", lo, seg.hi);
        else
            std::snprintf(buf, sizeof(buf), "%.17g %.17g %lld\n", lo, seg.hi,
                          static_cast<long long>(seg.owner));
        os << buf;
    }
}

} // namespace fragsim
