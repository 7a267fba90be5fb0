#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "fragsim/stats.hpp"

namespace fragsim {

struct SweepSpec {
    std::vector<double> alphas;
    std::vector<Algorithm> algorithms;
    int replications = 1;
    std::uint64_t base_seed = 1;
    std::uint64_t events = 2'000'000;
    std::uint64_t warmup = 1'000'000;
    int workers = 1;

    std::size_t cell_count() const {
        return alphas.size() * algorithms.size() * static_cast<std::size_t>(replications);
    }
};

// Pinned seed derivation: the seed for the cell with 1-based linear index k
// (alpha outermost, then algorithm, then replication) is the k-th output of
// SplitMix64 seeded with base_seed.
std::uint64_t derive_cell_seed(std::uint64_t base_seed, std::size_t cell_index);

struct SweepCell {
    double alpha = 0;
    Algorithm algorithm = Algorithm::LinearScan;
    int replication = 0;
    std::uint64_t seed = 0;
    SummaryStats stats;
};

// One aggregated row per (alpha, algorithm): plain means across replications.
struct SweepRow {
    double alpha = 0;
    Algorithm algorithm = Algorithm::LinearScan;
    double mean_r = 0, mean_g = 0, mean_f = 0;
    double frags_per_channel = 0;
    double g_over_r = 0;
    double type0_frac = 0, type1_frac = 0, type2_frac = 0;
    double mean_gap_size = 0, mean_frag_size = 0;
    double first_gap_lo = 0;
    double beta_hat = 0, theta_hat = 0, ks = 0;
};

// Runs every cell on a bounded worker pool. Results are ordered by cell
// index, so the output is independent of the worker count.
std::vector<SweepCell> run_sweep(const SweepSpec& spec);

std::vector<SweepRow> aggregate_sweep(const SweepSpec& spec, const std::vector<SweepCell>& cells);

// Fixed schema:
// alpha,alg,mean_r,mean_g,mean_f,frags_per_channel,g_over_r,type0_frac,
// type1_frac,type2_frac,mean_gap_size,mean_frag_size,first_gap_lo,beta_hat,
// theta_hat,ks
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

} // namespace fragsim
