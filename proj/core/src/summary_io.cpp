#include "fragsim/summary_io.hpp"

#include <cstdio>

#include <json.hpp>

namespace fragsim {

namespace {

using ordered_json = nlohmann::ordered_json;

template <typename Hist>
ordered_json hist_to_json(const Hist& h) {
    ordered_json arr = ordered_json::array();
    for (const auto& [v, w] : h) arr.push_back({v, w});
    return arr;
}

ordered_json fit_to_json(const NormalFitResult& fit, bool valid) {
    return ordered_json{{"valid", valid},      {"mean", fit.mean},
                        {"std", fit.std},      {"ks_distance", fit.ks_distance},
                        {"m", fit.m},          {"beta_hat", fit.beta_hat},
                        {"theta_hat", fit.theta_hat}};
}

} // namespace

std::string summary_to_json(const SummaryStats& s) {
    ordered_json j;
    j["config"] = {
        {"alpha", s.config.alpha},
        {"algorithm", algorithm_name(s.config.algorithm)},
        {"seed", s.config.seed},
        {"total_events", s.config.total_events},
        {"warmup_events", s.config.warmup_events},
    };
    j["rng"] = s.rng_id;
    j["recorded_events"] = s.recorded_events;
    j["t_begin"] = s.t_begin;
    j["t_end"] = s.t_end;
    j["mean_r"] = s.mean_r;
    j["mean_g"] = s.mean_g;
    j["mean_f"] = s.mean_f;
    j["mean_frags_per_channel"] = s.mean_frags_per_channel;
    j["mean_gap_size"] = s.mean_gap_size;
    j["mean_fragment_size"] = s.mean_fragment_size;
    j["mean_first_gap_lo"] = s.mean_first_gap_lo;
    j["mean_r_event"] = s.mean_r_event;
    j["mean_g_event"] = s.mean_g_event;
    j["mean_f_event"] = s.mean_f_event;
    j["mean_admissions"] = s.mean_admissions;
    j["mean_g_over_r"] = s.mean_g_over_r;
    j["g_over_r_ratio_of_means"] = s.g_over_r_ratio_of_means;
    j["type_fractions"] = {s.type_fractions[0], s.type_fractions[1], s.type_fractions[2]};
    j["frags_per_channel_pmf_mean"] = s.frags_per_channel_pmf_mean;
    j["frags_per_channel_pmf_std"] = s.frags_per_channel_pmf_std;
    j["sigma_first_half_mean"] = s.sigma_first_half_mean;
    j["sigma_second_half_mean"] = s.sigma_second_half_mean;
    j["sigma_relative_gap"] = s.sigma_relative_gap;
    j["normal_fit"] = fit_to_json(s.normal_fit, s.normal_fit_valid);
    j["first_admission_fit"] = fit_to_json(s.first_admission_fit, s.first_admission_fit_valid);
    j["sigma_thinned"] = s.sigma_thinned;
    j["pmf"] = {
        {"frags_per_channel", hist_to_json(s.frags_per_channel_pmf)},
        {"gap_random_time", hist_to_json(s.gap_pmf_random_time)},
        {"gap_first_admission", hist_to_json(s.gap_pmf_first_admission)},
        {"gap_post_departure", hist_to_json(s.gap_pmf_post_departure)},
        {"fragment_total", hist_to_json(s.fragment_total_hist)},
    };
    return j.dump(2) + "\n";
}

namespace {

void put(std::ostream& os, const char* key, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << key << ',' << buf << '\n';
}

void put(std::ostream& os, const char* key, std::uint64_t v) { os << key << ',' << v << '\n'; }

void put_hist(std::ostream& os, const char* name, const CountHist& h) {
    for (const auto& [v, w] : h) os << "pmf." << name << ',' << v << ',' << w << '\n';
}

void put_hist(std::ostream& os, const char* name, const WeightHist& h) {
    char buf[64];
    for (const auto& [v, w] : h) {
        std::snprintf(buf, sizeof(buf), "%.17g", w);
        os << "pmf." << name << ',' << v << ',' << buf << '\n';
    }
}

} // namespace

void write_summary_flat(std::ostream& os, const SummaryStats& s) {
    put(os, "alpha", s.config.alpha);
    os << "algorithm," << algorithm_name(s.config.algorithm) << '\n';
    put(os, "seed", s.config.seed);
    put(os, "total_events", s.config.total_events);
    put(os, "warmup_events", s.config.warmup_events);
    os << "rng," << s.rng_id << '\n';
    put(os, "recorded_events", s.recorded_events);
    put(os, "mean_r", s.mean_r);
    put(os, "mean_g", s.mean_g);
    put(os, "mean_f", s.mean_f);
    put(os, "mean_frags_per_channel", s.mean_frags_per_channel);
    put(os, "mean_gap_size", s.mean_gap_size);
    put(os, "mean_fragment_size", s.mean_fragment_size);
    put(os, "mean_first_gap_lo", s.mean_first_gap_lo);
    put(os, "mean_r_event", s.mean_r_event);
    put(os, "mean_g_event", s.mean_g_event);
    put(os, "mean_f_event", s.mean_f_event);
    put(os, "mean_admissions", s.mean_admissions);
    put(os, "mean_g_over_r", s.mean_g_over_r);
    put(os, "g_over_r_ratio_of_means", s.g_over_r_ratio_of_means);
    put(os, "type0_frac", s.type_fractions[0]);
    put(os, "type1_frac", s.type_fractions[1]);
    put(os, "type2_frac", s.type_fractions[2]);
    put(os, "frags_per_channel_pmf_mean", s.frags_per_channel_pmf_mean);
    put(os, "frags_per_channel_pmf_std", s.frags_per_channel_pmf_std);
    put(os, "normal_fit.mean", s.normal_fit.mean);
    put(os, "normal_fit.std", s.normal_fit.std);
    put(os, "normal_fit.ks", s.normal_fit.ks_distance);
    put(os, "normal_fit.beta_hat", s.normal_fit.beta_hat);
    put(os, "normal_fit.theta_hat", s.normal_fit.theta_hat);
    put(os, "sigma_first_half_mean", s.sigma_first_half_mean);
    put(os, "sigma_second_half_mean", s.sigma_second_half_mean);
    put(os, "sigma_relative_gap", s.sigma_relative_gap);
    put_hist(os, "frags_per_channel", s.frags_per_channel_pmf);
    put_hist(os, "gap_random_time", s.gap_pmf_random_time);
    put_hist(os, "gap_first_admission", s.gap_pmf_first_admission);
    put_hist(os, "gap_post_departure", s.gap_pmf_post_departure);
    put_hist(os, "fragment_total", s.fragment_total_hist);
}

} // namespace fragsim
