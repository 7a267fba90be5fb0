#pragma once

#include <cstdint>
#include <string>

namespace fragsim {

enum class OracleMethod { Exact, MonteCarlo, Hybrid };

const char* oracle_method_name(OracleMethod m);

struct IrwinHallCdf {
    double value = 0;        // clamped to [0,1]
    bool precision_loss = false;
};

// P(sum of n iid Uniform(0,1) <= x) by the alternating binomial series,
// evaluated in 50-digit floating point. precision_loss is set when the
// unclamped result leaves [-1e-9, 1+1e-9] or when cancellation consumed the
// working precision; callers should fall back to Monte Carlo.
IrwinHallCdf irwin_hall_cdf(int n, double x);

// Same series evaluated in exact rational arithmetic with x = 1/alpha taken
// as the exact rational of the double alpha. Valid whenever 1/alpha <= 20
// and n <= 80 (the guaranteed-exact envelope used by the throughput series).
double irwin_hall_cdf_exact_inv_alpha(int n, double alpha);

struct TermProbability {
    double p = 0;
    double std_error = 0; // 0 unless Monte Carlo
    OracleMethod method = OracleMethod::Exact;
};

struct McOptions {
    std::uint64_t samples = 10'000'000;
    std::uint64_t seed = 1;
};

// P(S_n > 1) for S_n a sum of n iid Uniform(0,alpha]. Exact when the
// rational envelope applies, high-precision floating point otherwise, and a
// seeded Monte Carlo estimate when that loses precision.
TermProbability p_sum_exceeds_one(int n, double alpha, const McOptions& mc = {});

struct OracleResult {
    double alpha = 0;
    double expected_r = 0;
    OracleMethod method = OracleMethod::Exact;
    double std_error = 0; // 0 for exact
    int terms_used = 0;
};

struct OracleOptions {
    double tol = 1e-6;
    bool force_monte_carlo = false;
    std::uint64_t mc_paths = 10'000'000;
    std::uint64_t seed = 1;
};

// Maximum throughput E(R) = 1 / sum_{n>=2} P(S_n > 1) / (n(n-1)).
//
// The series is truncated at the first n with P(S_n > 1) > 1 - 1e-12 and
// closed with the telescoping tail sum_{m>=n} 1/(m(m-1)) = 1/(n-1). The
// equivalent route 1 / sum_{n>=1} (1/n) P(S_n <= 1 < S_{n+1}) is evaluated
// as a cross-check (independent sample paths in Monte Carlo mode);
// disagreement beyond max(tol, 3 sigma) throws CrossCheckFailure.
OracleResult expected_r(double alpha, const OracleOptions& opts = {});

} // namespace fragsim
