#include "fragsim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "fragsim/errors.hpp"
#include "fragsim/rng.hpp"

namespace fragsim {

namespace {

using boost::multiprecision::cpp_bin_float_50;
using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

constexpr double kTailEps = 1e-12; // stop once P(S_n > 1) exceeds 1 - kTailEps
constexpr int kExactMaxN = 80;
constexpr int kExactMaxX = 20;
// Beyond this x the alternating series is not trusted even at 50 digits;
// expected_r switches to the path-sampling Monte Carlo estimator outright.
constexpr double kFloatSafeX = 60.0;

cpp_rational pow_rational(const cpp_rational& q, unsigned n) {
    cpp_int num = boost::multiprecision::numerator(q);
    cpp_int den = boost::multiprecision::denominator(q);
    return cpp_rational(boost::multiprecision::pow(num, n), boost::multiprecision::pow(den, n));
}

// (1/n!) sum_{k=0..floor(x)} (-1)^k C(n,k) (x-k)^n, exact.
double irwin_hall_exact(int n, const cpp_rational& x) {
    if (x <= 0) return 0.0;
    if (x >= n) return 1.0;
    const cpp_int xfloor =
        boost::multiprecision::numerator(x) / boost::multiprecision::denominator(x);
    const int kmax = std::min<int>(n, static_cast<int>(xfloor));
    cpp_rational sum = 0;
    cpp_int binom = 1;
    for (int k = 0; k <= kmax; ++k) {
        const cpp_rational term = binom * pow_rational(x - k, static_cast<unsigned>(n));
        sum += (k % 2 == 0) ? term : -term;
        binom = binom * (n - k) / (k + 1);
    }
    cpp_int fact = 1;
    for (int i = 2; i <= n; ++i) fact *= i;
    return static_cast<double>(cpp_rational(sum / fact).convert_to<double>());
}

struct Float50Cdf {
    double value;
    bool loss;
};

Float50Cdf irwin_hall_float50(int n, double x) {
    if (x <= 0) return {0.0, false};
    if (x >= n) return {1.0, false};
    const int kmax = std::min(n, static_cast<int>(std::floor(x)));
    cpp_bin_float_50 fact = 1;
    for (int i = 2; i <= n; ++i) fact *= i;
    cpp_bin_float_50 sum = 0, max_term = 0;
    cpp_int binom = 1;
    for (int k = 0; k <= kmax; ++k) {
        cpp_bin_float_50 term = cpp_bin_float_50(binom) *
                                boost::multiprecision::pow(cpp_bin_float_50(x - k), n) / fact;
        const cpp_bin_float_50 mag = boost::multiprecision::abs(term);
        if (mag > max_term) max_term = mag;
        sum += (k % 2 == 0) ? term : -term;
        binom = binom * (n - k) / (k + 1);
    }
    const double v = sum.convert_to<double>();
    bool loss = v < -1e-9 || v > 1.0 + 1e-9;
    // Cancellation check: keep at least ~15 good digits out of 50.
    const cpp_bin_float_50 mag_sum = boost::multiprecision::abs(sum);
    if (max_term > 0 && mag_sum < max_term * cpp_bin_float_50(1e-35)) loss = true;
    return {std::clamp(v, 0.0, 1.0), loss};
}

bool exact_envelope(double alpha, int n) {
    if (n > kExactMaxN) return false;
    const cpp_rational x = 1 / cpp_rational(alpha);
    return x <= kExactMaxX;
}

double mc_p_sum_exceeds_one(int n, double alpha, const McOptions& mc, double& se) {
    Xoshiro256pp rng = make_stream(mc.seed, RngStream::OracleTermFallback);
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < mc.samples; ++i) {
        double s = 0;
        for (int k = 0; k < n; ++k) s += rng.uniform_open_closed() * alpha;
        if (s > 1.0) ++hits;
    }
    const double p = static_cast<double>(hits) / static_cast<double>(mc.samples);
    se = std::sqrt(std::max(p * (1 - p), 0.0) / static_cast<double>(mc.samples));
    return p;
}

} // namespace

const char* oracle_method_name(OracleMethod m) {
    switch (m) {
        case OracleMethod::Exact: return "exact";
        case OracleMethod::MonteCarlo: return "monte_carlo";
        case OracleMethod::Hybrid: return "hybrid";
    }
    return "?";
}

IrwinHallCdf irwin_hall_cdf(int n, double x) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (x < 0) throw std::invalid_argument("x must be >= 0");
    const Float50Cdf r = irwin_hall_float50(n, x);
    return {r.value, r.loss};
}

double irwin_hall_cdf_exact_inv_alpha(int n, double alpha) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (!(alpha > 0) || alpha > 1) throw std::invalid_argument("alpha must be in (0,1]");
    return irwin_hall_exact(n, 1 / cpp_rational(alpha));
}

TermProbability p_sum_exceeds_one(int n, double alpha, const McOptions& mc) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (!(alpha > 0) || alpha > 1) throw std::invalid_argument("alpha must be in (0,1]");
    // S_n <= n*alpha: when n*alpha <= 1 the sum can never exceed 1.
    const cpp_rational x = 1 / cpp_rational(alpha);
    if (cpp_rational(n) <= x) return {0.0, 0.0, OracleMethod::Exact};

    if (exact_envelope(alpha, n))
        return {1.0 - irwin_hall_exact(n, x), 0.0, OracleMethod::Exact};

    const Float50Cdf r = irwin_hall_float50(n, x.convert_to<double>());
    if (!r.loss) return {1.0 - r.value, 0.0, OracleMethod::Exact};

    TermProbability out;
    out.method = OracleMethod::MonteCarlo;
    out.p = mc_p_sum_exceeds_one(n, alpha, mc, out.std_error);
    return out;
}

namespace {

// Path-based Monte Carlo: draw U_1, U_2, ... until the running sum exceeds 1
// and let n* be that first index. Then P(S_n > 1) = P(n* <= n) for every n,
// and both series collapse to E[1 / (n* - 1)].
struct PathMc {
    double d_hat = 0;
    double se = 0;
    int max_depth = 0;
};

PathMc mc_inverse_sum(double alpha, std::uint64_t paths, std::uint64_t seed, RngStream stream) {
    Xoshiro256pp rng = make_stream(seed, stream);
    double s1 = 0, s2 = 0;
    int max_depth = 0;
    for (std::uint64_t i = 0; i < paths; ++i) {
        double sum = 0;
        int n = 0;
        do {
            sum += rng.uniform_open_closed() * alpha;
            ++n;
        } while (sum <= 1.0);
        max_depth = std::max(max_depth, n);
        const double x = 1.0 / static_cast<double>(n - 1); // n >= 2 since alpha <= 1
        s1 += x;
        s2 += x * x;
    }
    PathMc out;
    const double np = static_cast<double>(paths);
    out.d_hat = s1 / np;
    out.se = std::sqrt(std::max(s2 / np - out.d_hat * out.d_hat, 0.0) / np);
    out.max_depth = max_depth;
    return out;
}

OracleResult expected_r_mc(double alpha, const OracleOptions& opts) {
    const PathMc a = mc_inverse_sum(alpha, opts.mc_paths, opts.seed, RngStream::OracleRouteA);
    const PathMc b = mc_inverse_sum(alpha, opts.mc_paths, opts.seed, RngStream::OracleRouteB);
    const double ra = 1.0 / a.d_hat;
    const double rb = 1.0 / b.d_hat;
    const double se_ra = a.se / (a.d_hat * a.d_hat);
    const double se_rb = b.se / (b.d_hat * b.d_hat);
    const double allowed = std::max(opts.tol, 3.0 * std::sqrt(se_ra * se_ra + se_rb * se_rb));
    if (std::abs(ra - rb) > allowed)
        throw CrossCheckFailure("monte-carlo routes disagree: " + std::to_string(ra) + " vs " +
                                std::to_string(rb));
    OracleResult out;
    out.alpha = alpha;
    out.expected_r = ra;
    out.method = OracleMethod::MonteCarlo;
    out.std_error = se_ra;
    out.terms_used = a.max_depth;
    return out;
}

} // namespace

OracleResult expected_r(double alpha, const OracleOptions& opts) {
    if (!(alpha > 0) || alpha > 1) throw std::invalid_argument("alpha must be in (0,1]");
    if (!(opts.tol > 0)) throw std::invalid_argument("tol must be positive");

    const double x = 1.0 / alpha;
    if (opts.force_monte_carlo || x > kFloatSafeX) return expected_r_mc(alpha, opts);

    // q_n = P(S_n <= 1), collected until it drops below kTailEps.
    std::vector<double> qs; // qs[i] = q_{n_min + i}
    const int n_min = static_cast<int>(std::floor(x)) + 1; // p_n = 0 for n <= x
    McOptions term_mc{std::max<std::uint64_t>(opts.mc_paths / 10, 100'000), opts.seed};
    double inv_sum = 0;
    double var = 0;
    bool any_mc = false;
    int terms = 0;
    for (int n = std::max(2, n_min);; ++n) {
        const TermProbability tp = p_sum_exceeds_one(n, alpha, term_mc);
        if (tp.method == OracleMethod::MonteCarlo) any_mc = true;
        const double w = 1.0 / (static_cast<double>(n) * (n - 1));
        if (tp.p > 1.0 - kTailEps) {
            inv_sum += 1.0 / (n - 1); // telescoping tail from this term on
            terms = n;
            qs.push_back(1.0 - tp.p);
            break;
        }
        inv_sum += w * tp.p;
        var += w * w * tp.std_error * tp.std_error;
        qs.push_back(1.0 - tp.p);
        if (n > 100'000) throw CrossCheckFailure("throughput series failed to converge");
    }

    // Cross-check route: 1 / sum_n (1/n) P(S_n <= 1 < S_{n+1}). With
    // q_1 = ... = q_{n_min - 1} = 1 the partial sums telescope from n = 1.
    double alt_sum = 0;
    {
        const int first = std::max(2, n_min);
        // n from 1 to first-1 has q_n = q_{n+1} ... = 1 except the boundary
        // into the first computed term.
        double q_prev = 1.0;
        int n = first - 1;
        if (n >= 1) alt_sum += (q_prev - qs.front()) / n;
        for (std::size_t i = 0; i + 1 < qs.size(); ++i)
            alt_sum += (qs[i] - qs[i + 1]) / static_cast<double>(first + i);
        // Remaining mass below kTailEps is dropped.
    }

    OracleResult out;
    out.alpha = alpha;
    out.expected_r = 1.0 / inv_sum;
    out.method = any_mc ? OracleMethod::Hybrid : OracleMethod::Exact;
    out.std_error = std::sqrt(var) / (inv_sum * inv_sum);
    out.terms_used = terms;

    const double alt_r = 1.0 / alt_sum;
    const double allowed = std::max(opts.tol, 3.0 * out.std_error);
    if (std::abs(out.expected_r - alt_r) > allowed)
        throw CrossCheckFailure("series routes disagree: " + std::to_string(out.expected_r) +
                                " vs " + std::to_string(alt_r));
    return out;
}

} // namespace fragsim
