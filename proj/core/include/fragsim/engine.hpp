#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "fragsim/alloc.hpp"
#include "fragsim/rng.hpp"
#include "fragsim/spectrum.hpp"

namespace fragsim {

struct RunConfig {
    double alpha = 0.1; // request sizes are uniform on (0, alpha]
    Algorithm algorithm = Algorithm::LinearScan;
    std::uint64_t seed = 1;
    std::uint64_t total_events = 2'000'000;  // departures to simulate
    std::uint64_t warmup_events = 1'000'000; // events excluded from statistics
    bool record_trace = false;
    // Structural re-validation cadence (full state walk + census recount).
    bool deep_checks = false;
    std::uint64_t deep_check_interval = 10'000;

    void validate() const {
        if (!(alpha > 0.0) || alpha > 1.0) throw std::invalid_argument("alpha must be in (0,1]");
        if (total_events == 0) throw std::invalid_argument("total_events must be positive");
        if (warmup_events >= total_events)
            throw std::invalid_argument("warmup_events must be smaller than total_events");
    }
};

// Everything observed at one departure epoch. The exact relations
//   delta_sigma == a - 2*d0 - d1 + j + j_end
//   g_minus     == g_prev - d0 + d2 + j + j_end
// are asserted by the engine at every event (the j_end terms vanish under
// Linear Scan, where a gap always touches the right boundary).
struct DepartureRecord {
    std::uint64_t k = 0; // event index, 1-based
    double t = 0;        // simulation time of the departure

    int a = 0; // admissions at this event
    int d0 = 0, d1 = 0, d2 = 0;
    int j = 0, j_end = 0;
    int g_minus = 0;

    // Post-event state.
    int r = 0, g = 0, f = 0;
    int n0 = 0, n1 = 0, n2 = 0;
    int sigma = 0;
    int delta_sigma = 0;
    double first_gap_lo = 0; // NaN when the spectrum has no gap
    double gap_total = 0;
    int first_admit_gap_count = -1; // gap count seen by the first admission; -1 if a == 0

    // channel_frag_hist[n] = number of active channels with exactly n fragments.
    std::vector<std::uint32_t> channel_frag_hist;
};

// At-capacity event loop: a never-empty FCFS queue of uniform requests, one
// departure per step, admissions after each departure until the head no
// longer fits.
class Engine {
  public:
    explicit Engine(const RunConfig& cfg);

    // Process the earliest pending departure and the admission loop after it.
    DepartureRecord step();

    // Snapshot of the post-fill state at t = 0 (before the first departure).
    DepartureRecord initial_record() const;

    const SpectrumState& spectrum() const { return sp_; }
    double queue_head() const { return head_; }
    double clock() const { return t_; }
    std::uint64_t events_processed() const { return k_; }
    const RunConfig& config() const { return cfg_; }

    void inject_corruption_for_tests() { sp_.corrupt_census_for_tests(); }

  private:
    RunConfig cfg_;
    SpectrumState sp_;
    Xoshiro256pp size_rng_;
    Xoshiro256pp residence_rng_;
    using Pending = std::pair<double, ChannelId>;
    std::priority_queue<Pending, std::vector<Pending>, std::greater<>> pending_;
    ScanCursor cursor_;
    double head_ = 0;
    double t_ = 0;
    std::uint64_t k_ = 0;
    ChannelId next_id_ = 1;

    double draw_size();
    double draw_residence();
    void admit(ChannelId id);
    void fill_record_state(DepartureRecord& rec) const;
    void verify(const DepartureRecord& rec, int g_prev, int sigma_prev, int r_prev) const;
};

// Convenience streams matching the engine's derivation, for tests and for
// replaying the request/residence sequences outside the engine.
double draw_size(Xoshiro256pp& stream, double alpha);
double draw_residence(Xoshiro256pp& stream);

// Tab-separated event trace: "k t_k a d0 d1 d2 j g_minus r g f sigma".
void write_trace_header(std::ostream& os);
void write_trace_line(std::ostream& os, const DepartureRecord& rec);

} // namespace fragsim
