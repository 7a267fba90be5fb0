#include "fragsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fragsim {

int scale_m(double alpha) {
    return static_cast<int>(std::floor(1.0 / alpha + 1e-9));
}

namespace {

double normal_cdf(double x, double mean, double std) {
    return 0.5 * std::erfc(-(x - mean) / (std * std::sqrt(2.0)));
}

template <typename Hist>
void moments(const Hist& hist, double& mean, double& std, double& total) {
    total = 0;
    double s1 = 0;
    for (const auto& [v, w] : hist) {
        total += static_cast<double>(w);
        s1 += static_cast<double>(w) * v;
    }
    mean = s1 / total;
    double s2 = 0;
    for (const auto& [v, w] : hist) {
        const double d = v - mean;
        s2 += static_cast<double>(w) * d * d;
    }
    std = std::sqrt(s2 / total);
}

} // namespace

NormalFitResult fit_normal(const CountHist& hist, int m) {
    if (hist.size() < 2) throw DegenerateSample("normal fit needs at least two distinct values");
    NormalFitResult fit;
    fit.m = m;
    double total = 0;
    moments(hist, fit.mean, fit.std, total);
    if (fit.std <= 0) throw DegenerateSample("normal fit on a zero-variance sample");

    // ECDF vs fitted CDF at the jump points. Values are integers, so the
    // model CDF is taken at the cell boundaries v +/- 1/2; without that
    // continuity correction the lattice itself contributes ~pdf(mode)/2 to
    // the distance and swamps any actual shape mismatch.
    double cum = 0;
    double d = 0;
    for (const auto& [v, w] : hist) {
        d = std::max(d, std::abs(cum / total - normal_cdf(v - 0.5, fit.mean, fit.std)));
        cum += static_cast<double>(w);
        d = std::max(d, std::abs(cum / total - normal_cdf(v + 0.5, fit.mean, fit.std)));
    }
    fit.ks_distance = d;
    fit.beta_hat = fit.mean / (static_cast<double>(m) * m);
    fit.theta_hat = fit.std / std::pow(static_cast<double>(m), 1.5);
    return fit;
}

double spearman_against_index(const std::vector<double>& values) {
    const std::size_t n = values.size();
    if (n < 2) return 0;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double avg = 0.5 * (i + j) + 1.0; // average rank for ties
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
        i = j + 1;
    }
    const double mean_rank = 0.5 * (n + 1);
    double num = 0, den_x = 0, den_y = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double dx = static_cast<double>(k + 1) - mean_rank;
        const double dy = rank[k] - mean_rank;
        num += dx * dy;
        den_x += dx * dx;
        den_y += dy * dy;
    }
    if (den_x == 0 || den_y == 0) return 0;
    return num / std::sqrt(den_x * den_y);
}

StatsAccumulator::StatsAccumulator(const RunConfig& cfg, std::uint64_t expected_records)
    : cfg_(cfg), expected_(expected_records) {
    half_point_ = expected_ / 2;
    thin_stride_ = std::max<std::uint64_t>(1, expected_ / 100);
}

void StatsAccumulator::seed_interval_state(const DepartureRecord& rec) {
    prev_ = Snapshot{rec.t, rec.r, rec.g, rec.f, rec.gap_total, rec.first_gap_lo};
    have_prev_ = true;
}

void StatsAccumulator::record(const DepartureRecord& rec, double dt) {
    // Time-weighted quantities describe the state that held during the
    // interval ending at this event.
    if (have_prev_ && dt > 0) {
        total_dt_ += dt;
        tsum_r_ += dt * prev_.r;
        tsum_g_ += dt * prev_.g;
        tsum_f_ += dt * prev_.f;
        if (prev_.r > 0) tsum_f_over_r_ += dt * (static_cast<double>(prev_.f) / prev_.r);
        if (prev_.g > 0) tsum_gap_size_ += dt * (prev_.gap_total / prev_.g);
        if (prev_.f > 0) tsum_frag_size_ += dt * ((1.0 - prev_.gap_total) / prev_.f);
        if (!std::isnan(prev_.first_gap_lo)) {
            tsum_first_gap_lo_ += dt * prev_.first_gap_lo;
            dt_with_gap_ += dt;
        }
        g_random_time_pmf_[prev_.g] += dt;
    }

    ++n_events_;
    sum_r_ += rec.r;
    sum_g_ += rec.g;
    sum_f_ += rec.f;
    sum_a_ += rec.a;
    sum_n_[0] += rec.n0;
    sum_n_[1] += rec.n1;
    sum_n_[2] += rec.n2;
    if (rec.r > 0) sum_g_over_r_ += static_cast<double>(rec.g) / rec.r;

    if (n_events_ <= half_point_) {
        sum_sigma_first_ += rec.sigma;
        ++n_first_;
    } else {
        sum_sigma_second_ += rec.sigma;
        ++n_second_;
    }
    if (n_events_ % thin_stride_ == 0 && sigma_thinned_.size() < 100)
        sigma_thinned_.push_back(rec.sigma);

    for (std::size_t n = 0; n < rec.channel_frag_hist.size(); ++n)
        if (rec.channel_frag_hist[n]) frag_per_channel_[static_cast<int>(n)] += rec.channel_frag_hist[n];
    ++g_minus_pmf_[rec.g_minus];
    if (rec.a >= 1) ++first_admit_pmf_[rec.first_admit_gap_count];
    ++f_total_hist_[rec.f];

    seed_interval_state(rec);
}

void StatsAccumulator::merge(const StatsAccumulator& other) {
    n_events_ += other.n_events_;
    sum_r_ += other.sum_r_;
    sum_g_ += other.sum_g_;
    sum_f_ += other.sum_f_;
    sum_a_ += other.sum_a_;
    for (int i = 0; i < 3; ++i) sum_n_[i] += other.sum_n_[i];
    sum_g_over_r_ += other.sum_g_over_r_;
    sum_sigma_first_ += other.sum_sigma_first_;
    sum_sigma_second_ += other.sum_sigma_second_;
    n_first_ += other.n_first_;
    n_second_ += other.n_second_;
    for (const auto& [v, w] : other.frag_per_channel_) frag_per_channel_[v] += w;
    for (const auto& [v, w] : other.g_minus_pmf_) g_minus_pmf_[v] += w;
    for (const auto& [v, w] : other.first_admit_pmf_) first_admit_pmf_[v] += w;
    for (const auto& [v, w] : other.f_total_hist_) f_total_hist_[v] += w;
    sigma_thinned_.insert(sigma_thinned_.end(), other.sigma_thinned_.begin(),
                          other.sigma_thinned_.end());
    total_dt_ += other.total_dt_;
    tsum_r_ += other.tsum_r_;
    tsum_g_ += other.tsum_g_;
    tsum_f_ += other.tsum_f_;
    tsum_f_over_r_ += other.tsum_f_over_r_;
    tsum_gap_size_ += other.tsum_gap_size_;
    tsum_frag_size_ += other.tsum_frag_size_;
    tsum_first_gap_lo_ += other.tsum_first_gap_lo_;
    dt_with_gap_ += other.dt_with_gap_;
    for (const auto& [v, w] : other.g_random_time_pmf_) g_random_time_pmf_[v] += w;
    expected_ += other.expected_;
}

StatsAccumulator::Halves StatsAccumulator::sigma_stationarity() const {
    Halves h;
    if (n_first_ > 0) h.first = sum_sigma_first_ / static_cast<double>(n_first_);
    if (n_second_ > 0) h.second = sum_sigma_second_ / static_cast<double>(n_second_);
    const double denom = h.first + h.second;
    h.relative_gap = denom > 0 ? std::abs(h.second - h.first) / denom : 0;
    return h;
}

SummaryStats StatsAccumulator::finalize() const {
    SummaryStats s;
    s.config = cfg_;
    s.rng_id = rng_id();
    s.recorded_events = n_events_;

    const double ne = n_events_ > 0 ? static_cast<double>(n_events_) : 1.0;
    s.mean_r_event = sum_r_ / ne;
    s.mean_g_event = sum_g_ / ne;
    s.mean_f_event = sum_f_ / ne;
    s.mean_admissions = sum_a_ / ne;
    s.mean_g_over_r = sum_g_over_r_ / ne;
    s.g_over_r_ratio_of_means = sum_r_ > 0 ? sum_g_ / sum_r_ : 0;
    const double ftot = sum_n_[0] + sum_n_[1] + sum_n_[2];
    for (int i = 0; i < 3; ++i) s.type_fractions[i] = ftot > 0 ? sum_n_[i] / ftot : 0;

    if (total_dt_ > 0) {
        s.mean_r = tsum_r_ / total_dt_;
        s.mean_g = tsum_g_ / total_dt_;
        s.mean_f = tsum_f_ / total_dt_;
        s.mean_frags_per_channel = tsum_f_over_r_ / total_dt_;
        s.mean_gap_size = tsum_gap_size_ / total_dt_;
        s.mean_fragment_size = tsum_frag_size_ / total_dt_;
    }
    if (dt_with_gap_ > 0) s.mean_first_gap_lo = tsum_first_gap_lo_ / dt_with_gap_;

    s.frags_per_channel_pmf = frag_per_channel_;
    if (!frag_per_channel_.empty()) {
        double total = 0;
        moments(frag_per_channel_, s.frags_per_channel_pmf_mean, s.frags_per_channel_pmf_std,
                total);
    }
    s.gap_pmf_random_time = g_random_time_pmf_;
    s.gap_pmf_first_admission = first_admit_pmf_;
    s.gap_pmf_post_departure = g_minus_pmf_;
    s.fragment_total_hist = f_total_hist_;

    const int m = scale_m(cfg_.alpha);
    try {
        s.normal_fit = fit_normal(f_total_hist_, m);
        s.normal_fit_valid = true;
    } catch (const DegenerateSample&) {
    }
    try {
        s.first_admission_fit = fit_normal(first_admit_pmf_, m);
        s.first_admission_fit_valid = true;
    } catch (const DegenerateSample&) {
    }

    const Halves h = sigma_stationarity();
    s.sigma_first_half_mean = h.first;
    s.sigma_second_half_mean = h.second;
    s.sigma_relative_gap = h.relative_gap;
    s.sigma_thinned = sigma_thinned_;
    return s;
}

SummaryStats run_simulation(const RunConfig& cfg, std::ostream* trace) {
    cfg.validate();
    Engine eng(cfg);
    StatsAccumulator acc(cfg, cfg.total_events - cfg.warmup_events);

    if (cfg.record_trace && trace) write_trace_header(*trace);
    if (cfg.warmup_events == 0) acc.seed_interval_state(eng.initial_record());

    double prev_t = 0;
    SummaryStats out;
    for (std::uint64_t k = 1; k <= cfg.total_events; ++k) {
        DepartureRecord rec = eng.step();
        if (cfg.record_trace && trace) write_trace_line(*trace, rec);
        if (k == cfg.warmup_events) {
            acc.seed_interval_state(rec);
            out.t_begin = rec.t;
        } else if (k > cfg.warmup_events) {
            acc.record(rec, rec.t - prev_t);
            out.t_end = rec.t;
        }
        prev_t = rec.t;
    }
    const double t_begin = out.t_begin;
    const double t_end = out.t_end;
    out = acc.finalize();
    out.t_begin = t_begin;
    out.t_end = t_end;
    return out;
}

} // namespace fragsim
