#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "fragsim/engine.hpp"

namespace fragsim {

struct NormalFitResult {
    double mean = 0;
    double std = 0;
    double ks_distance = 1; // sup distance between the ECDF and the fitted normal CDF
    int m = 0;              // floor(1/alpha)
    double beta_hat = 0;    // mean / m^2
    double theta_hat = 0;   // std / m^(3/2)
};

// Weighted integer histogram; weights are exact counts for event-weighted
// statistics and accumulated durations for time-weighted ones.
using CountHist = std::map<int, std::uint64_t>;
using WeightHist = std::map<int, double>;

struct SummaryStats {
    RunConfig config;
    std::string rng_id;
    std::uint64_t recorded_events = 0;
    double t_begin = 0; // time of the last warm-up event
    double t_end = 0;

    // Time-averaged state quantities (weight = sojourn in each state).
    double mean_r = 0;
    double mean_g = 0;
    double mean_f = 0;
    double mean_frags_per_channel = 0; // time average of F/R
    double mean_gap_size = 0;          // time average of h/G
    double mean_fragment_size = 0;     // time average of (1-h)/F
    double mean_first_gap_lo = 0;

    // Event-averaged counterparts at departure epochs.
    double mean_r_event = 0;
    double mean_g_event = 0;
    double mean_f_event = 0;
    double mean_admissions = 0; // should be 1 in steady state

    // E[G/R] at departure epochs, as a mean of per-event ratios, plus the
    // ratio of event means for comparison.
    double mean_g_over_r = 0;
    double g_over_r_ratio_of_means = 0;

    double type_fractions[3] = {0, 0, 0}; // share of n0/n1/n2 in f, event-weighted

    // Per-channel fragment counts sampled over all active channels at each
    // departure epoch.
    CountHist frags_per_channel_pmf;
    double frags_per_channel_pmf_mean = 0;
    double frags_per_channel_pmf_std = 0;

    // Gap-count distributions at the three epoch types.
    WeightHist gap_pmf_random_time;      // time-weighted
    CountHist gap_pmf_first_admission;   // given at least one admission
    CountHist gap_pmf_post_departure;    // G- right after each departure

    // Total fragment count at departure epochs and its normal fit.
    CountHist fragment_total_hist;
    NormalFitResult normal_fit;
    bool normal_fit_valid = false;
    NormalFitResult first_admission_fit; // reported, no acceptance target
    bool first_admission_fit_valid = false;

    // Stationarity diagnostics on sigma = F + G.
    double sigma_first_half_mean = 0;
    double sigma_second_half_mean = 0;
    double sigma_relative_gap = 0; // |m2 - m1| / (m1 + m2)
    std::vector<double> sigma_thinned;
};

// Sample-moment normal fit of an integer histogram. Throws DegenerateSample
// when the histogram has fewer than two distinct values.
NormalFitResult fit_normal(const CountHist& hist, int m);

// Spearman rank correlation of values against their index order.
double spearman_against_index(const std::vector<double>& values);

int scale_m(double alpha); // floor(1/alpha), robust to representation error

// Streaming accumulator for one simulation window. Event-weighted sums use
// the record at each departure; time-weighted sums attribute the elapsed
// interval to the state that held during it (the previous record).
class StatsAccumulator {
  public:
    StatsAccumulator(const RunConfig& cfg, std::uint64_t expected_records);

    // Install the state the measurement window starts from (the last warm-up
    // record, or the post-fill snapshot when warmup is zero).
    void seed_interval_state(const DepartureRecord& rec);

    // Fold in one post-warm-up record; dt is the time elapsed since the
    // previous event.
    void record(const DepartureRecord& rec, double dt);

    // Combine two accumulators over disjoint windows (order-insensitive for
    // all weighted sums; thinned sigma samples concatenate).
    void merge(const StatsAccumulator& other);

    std::uint64_t recorded() const { return n_events_; }

    // (first-half mean, second-half mean, |m2-m1|/(m1+m2)) of sigma.
    struct Halves {
        double first = 0, second = 0, relative_gap = 0;
    };
    Halves sigma_stationarity() const;

    SummaryStats finalize() const;

  private:
    RunConfig cfg_;
    std::uint64_t expected_ = 0;
    std::uint64_t half_point_ = 0;
    std::uint64_t thin_stride_ = 1;

    bool have_prev_ = false;
    struct Snapshot {
        double t = 0;
        int r = 0, g = 0, f = 0;
        double gap_total = 0;
        double first_gap_lo = 0;
    } prev_;

    // event-weighted
    std::uint64_t n_events_ = 0;
    double sum_r_ = 0, sum_g_ = 0, sum_f_ = 0, sum_a_ = 0;
    double sum_n_[3] = {0, 0, 0};
    double sum_g_over_r_ = 0;
    double sum_sigma_first_ = 0, sum_sigma_second_ = 0;
    std::uint64_t n_first_ = 0, n_second_ = 0;
    CountHist frag_per_channel_;
    CountHist g_minus_pmf_;
    CountHist first_admit_pmf_;
    CountHist f_total_hist_;
    std::vector<double> sigma_thinned_;

    // time-weighted
    double total_dt_ = 0;
    double tsum_r_ = 0, tsum_g_ = 0, tsum_f_ = 0;
    double tsum_f_over_r_ = 0;
    double tsum_gap_size_ = 0, tsum_frag_size_ = 0;
    double tsum_first_gap_lo_ = 0, dt_with_gap_ = 0;
    WeightHist g_random_time_pmf_;

    friend SummaryStats run_simulation(const RunConfig&, std::ostream*);
};

// Full experiment: initial fill, total_events departures, statistics over
// the post-warm-up window. Deterministic for a fixed config. The optional
// stream receives the tab-separated event trace (all events, including
// warm-up) when config.record_trace is set.
SummaryStats run_simulation(const RunConfig& cfg, std::ostream* trace = nullptr);

} // namespace fragsim
