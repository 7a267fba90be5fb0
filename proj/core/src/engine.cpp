#include "fragsim/engine.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace fragsim {

double draw_size(Xoshiro256pp& stream, double alpha) {
    // (0,1] * alpha: never zero, at most alpha.
    return stream.uniform_open_closed() * alpha;
}

double draw_residence(Xoshiro256pp& stream) {
    // Inverse CDF of a mean-1 exponential on a uniform in (0,1): strictly positive.
    return -std::log(stream.uniform_open_open());
}

Engine::Engine(const RunConfig& cfg)
    : cfg_(cfg),
      size_rng_(make_stream(cfg.seed, RngStream::RequestSizes)),
      residence_rng_(make_stream(cfg.seed, RngStream::ResidenceTimes)) {
    cfg_.validate();
    // Initial fill: consecutive channels from 0 until the head no longer
    // fits. With a single gap all three scan rules place identically.
    head_ = draw_size();
    while (head_ <= sp_.total_gap_size()) {
        const ChannelId id = next_id_++;
        GapPlan plan = make_plan(sp_, cfg_.algorithm, cursor_, head_);
        sp_.carve(plan, id, head_);
        const double dep = t_ + draw_residence();
        sp_.set_departure_time(id, dep);
        pending_.emplace(dep, id);
        head_ = draw_size();
    }
}

double Engine::draw_size() { return fragsim::draw_size(size_rng_, cfg_.alpha); }
double Engine::draw_residence() { return fragsim::draw_residence(residence_rng_); }

void Engine::fill_record_state(DepartureRecord& rec) const {
    const TypeCensus c = sp_.current_census();
    rec.r = sp_.channel_count();
    rec.g = c.g;
    rec.f = c.f();
    rec.n0 = c.n0;
    rec.n1 = c.n1;
    rec.n2 = c.n2;
    rec.sigma = c.sigma();
    const auto fg = sp_.first_gap_lo();
    rec.first_gap_lo = fg ? *fg : std::numeric_limits<double>::quiet_NaN();
    rec.gap_total = sp_.total_gap_size();
    sp_.fragment_count_histogram(rec.channel_frag_hist);
}

DepartureRecord Engine::initial_record() const {
    DepartureRecord rec;
    rec.k = 0;
    rec.t = 0;
    fill_record_state(rec);
    rec.delta_sigma = 0;
    return rec;
}

DepartureRecord Engine::step() {
    if (pending_.empty()) throw CorruptState("no pending departures");

    const TypeCensus before = sp_.current_census();
    const int sigma_prev = before.sigma();
    const int g_prev = before.g;
    const int r_prev = sp_.channel_count();

    auto [t_dep, id] = pending_.top();
    pending_.pop();
    t_ = t_dep;
    ++k_;

    DepartureRecord rec;
    rec.k = k_;
    rec.t = t_;

    const ReleaseSummary rel = sp_.release(id);
    rec.d0 = rel.d0;
    rec.d1 = rel.d1;
    rec.d2 = rel.d2;
    rec.j = rel.j;
    rec.j_end = rel.j_end;
    rec.g_minus = rel.g_minus;

    // FCFS admissions: the queue never empties, so the head is simply
    // replaced after each admission.
    while (head_ <= sp_.total_gap_size()) {
        if (rec.a == 0) rec.first_admit_gap_count = sp_.gap_count();
        const ChannelId cid = next_id_++;
        GapPlan plan = make_plan(sp_, cfg_.algorithm, cursor_, head_);
        sp_.carve(plan, cid, head_);
        const double dep = t_ + draw_residence();
        sp_.set_departure_time(cid, dep);
        pending_.emplace(dep, cid);
        ++rec.a;
        head_ = draw_size();
    }

    fill_record_state(rec);
    rec.delta_sigma = rec.sigma - sigma_prev;

    verify(rec, g_prev, sigma_prev, r_prev);
    if (cfg_.deep_checks && k_ % cfg_.deep_check_interval == 0) {
        sp_.validate();
        if (!(sp_.census() == sp_.current_census()))
            throw CorruptState("census recount mismatch at event " + std::to_string(k_));
    }
    return rec;
}

void Engine::verify(const DepartureRecord& rec, int g_prev, int sigma_prev, int r_prev) const {
    auto fail = [&](const char* what) {
        std::ostringstream os;
        os << "event " << rec.k << ": " << what << " (a=" << rec.a << " d0=" << rec.d0
           << " d1=" << rec.d1 << " d2=" << rec.d2 << " j=" << rec.j << " j_end=" << rec.j_end
           << " g_prev=" << g_prev << " g_minus=" << rec.g_minus << " sigma_prev=" << sigma_prev
           << " sigma=" << rec.sigma << ")";
        throw CorruptState(os.str());
    };
    if (rec.delta_sigma != rec.a - 2 * rec.d0 - rec.d1 + rec.j + rec.j_end)
        fail("sigma drift relation failed");
    if (rec.g_minus != g_prev - rec.d0 + rec.d2 + rec.j + rec.j_end)
        fail("gap-count relation failed");
    if (rec.r - r_prev != rec.a - 1) fail("channel-count delta is not a-1");
    if (!(head_ > sp_.total_gap_size())) fail("queue head fits after admission loop");
    if (std::abs(sp_.occupied_total() + sp_.total_gap_size() - 1.0) > kLengthTol)
        fail("length conservation failed");
}

void write_trace_header(std::ostream& os) {
    os << "# k t_k a d0 d1 d2 j g_minus r g f sigma\n";
}

void write_trace_line(std::ostream& os, const DepartureRecord& rec) {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "%llu\t%.17g\t%d\t%d\t%d\t%d\t%d\t%d\t%d\t%d\t%d\t%d\n",
                  static_cast<unsigned long long>(rec.k), rec.t, rec.a, rec.d0, rec.d1, rec.d2,
                  rec.j, rec.g_minus, rec.r, rec.g, rec.f, rec.sigma);
    os << buf;
}

} // namespace fragsim
