#include <doctest.h>

#include <cmath>

#include <boost/multiprecision/cpp_int.hpp>

#include "fragsim/errors.hpp"
#include "fragsim/oracle.hpp"
#include "fragsim/rng.hpp"

using namespace fragsim;

TEST_CASE("uniform-sum cdf reference points") {
    CHECK(irwin_hall_cdf(1, 0.5).value == doctest::Approx(0.5));
    CHECK(irwin_hall_cdf(2, 1.0).value == doctest::Approx(0.5));
    CHECK(irwin_hall_cdf(3, 1.0).value == doctest::Approx(1.0 / 6));
    CHECK(irwin_hall_cdf(5, 5.0).value == doctest::Approx(1.0));
    CHECK(irwin_hall_cdf(5, 0.0).value == 0.0);
    CHECK(irwin_hall_cdf(4, 2.0).value == doctest::Approx(0.5)); // symmetry at the mean
    CHECK_FALSE(irwin_hall_cdf(3, 1.0).precision_loss);
    CHECK_THROWS_AS(irwin_hall_cdf(0, 1.0), std::invalid_argument);

    // exact rational route agrees
    CHECK(irwin_hall_cdf_exact_inv_alpha(3, 1.0) == doctest::Approx(1.0 / 6).epsilon(1e-15));
    CHECK(irwin_hall_cdf_exact_inv_alpha(7, 0.25) ==
          doctest::Approx(irwin_hall_cdf(7, 4.0).value).epsilon(1e-12));
}

TEST_CASE("cdf is monotone in x and spans [0,1]") {
    for (int n : {1, 2, 5, 12, 30}) {
        double prev = -1;
        for (double x = 0; x <= n + 0.5; x += 0.25) {
            const double v = irwin_hall_cdf(n, x).value;
            CHECK(v >= prev);
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
            prev = v;
        }
        CHECK(irwin_hall_cdf(n, 0.0).value == 0.0);
        CHECK(irwin_hall_cdf(n, static_cast<double>(n)).value == 1.0);
    }
}

TEST_CASE("probability that n uniforms exceed the spectrum") {
    CHECK(p_sum_exceeds_one(1, 1.0).p == 0.0);
    CHECK(p_sum_exceeds_one(2, 1.0).p == doctest::Approx(0.5));
    CHECK(p_sum_exceeds_one(3, 1.0).p == doctest::Approx(5.0 / 6));
    CHECK(p_sum_exceeds_one(10, 0.1).p == 0.0);  // n*alpha == 1 exactly: never exceeds
    CHECK(p_sum_exceeds_one(20, 0.05).p == 0.0);

    SUBCASE("barely-exceeding sums have the factorial tail probability") {
        // 21 uniforms on (0,0.05] exceed 1 only in a sliver of the cube:
        // P = 1/21!. The rational route resolves it; Monte Carlo sees zero
        // hits, consistent within its uncertainty.
        const TermProbability exact = p_sum_exceeds_one(21, 0.05);
        CHECK(exact.method == OracleMethod::Exact);
        double fact = 1;
        for (int i = 2; i <= 21; ++i) fact *= i;
        CHECK(exact.p == doctest::Approx(1.0 / fact).epsilon(1e-9));
    }

    SUBCASE("monte-carlo agrees with the exact value at a middling term") {
        const int n = 40;
        const double alpha = 0.05;
        const TermProbability exact = p_sum_exceeds_one(n, alpha);
        CHECK(exact.method == OracleMethod::Exact);
        CHECK(exact.p > 0.1);
        CHECK(exact.p < 0.9);
        Xoshiro256pp rng = make_stream(99, RngStream::OracleTermFallback);
        const std::uint64_t samples = 1'000'000;
        std::uint64_t hits = 0;
        for (std::uint64_t i = 0; i < samples; ++i) {
            double s = 0;
            for (int k = 0; k < n; ++k) s += rng.uniform_open_closed() * alpha;
            if (s > 1.0) ++hits;
        }
        const double p_mc = static_cast<double>(hits) / static_cast<double>(samples);
        const double se = std::sqrt(p_mc * (1 - p_mc) / static_cast<double>(samples));
        CHECK(std::abs(p_mc - exact.p) < 3 * se);
    }
}

TEST_CASE("telescoping tail identity, exact over a wide range") {
    using boost::multiprecision::cpp_rational;
    for (int N = 2; N <= 100; ++N) {
        cpp_rational partial = 0;
        const int M = 400;
        for (int n = N; n <= M; ++n) partial += cpp_rational(1) / (cpp_rational(n) * (n - 1));
        const cpp_rational expect = cpp_rational(1, N - 1) - cpp_rational(1, M);
        CHECK(partial == expect);
    }
}

TEST_CASE("maximum throughput at alpha = 1 matches the closed form") {
    const OracleResult r = expected_r(1.0);
    CHECK(r.method == OracleMethod::Exact);
    CHECK(r.std_error == 0.0);
    CHECK(r.expected_r == doctest::Approx(1.0 / (std::exp(1.0) - 2.0)).epsilon(1e-9));
}

TEST_CASE("maximum throughput spot values") {
    // Frozen from the exact rational evaluation; independently confirmed by a
    // hand computation of the series at alpha = 0.25 and by Monte Carlo.
    CHECK(expected_r(0.5).expected_r == doctest::Approx(3.280787).epsilon(1e-5));
    CHECK(expected_r(0.25).expected_r == doctest::Approx(7.301476).epsilon(1e-5));
    CHECK(expected_r(0.1).expected_r == doctest::Approx(19.321671).epsilon(1e-5));
}

TEST_CASE("throughput is decreasing in alpha") {
    double prev = 1e9;
    for (int i = 1; i <= 20; ++i) {
        const double alpha = std::min(1.0, i * 0.05);
        const double r = expected_r(alpha).expected_r;
        CHECK(r < prev);
        CHECK(r >= 1.0);
        prev = r;
    }
}

TEST_CASE("monte-carlo mode brackets the exact value") {
    OracleOptions opts;
    opts.force_monte_carlo = true;
    opts.mc_paths = 1'000'000;
    opts.seed = 5;
    const OracleResult mc = expected_r(0.1, opts);
    const OracleResult exact = expected_r(0.1);
    CHECK(mc.method == OracleMethod::MonteCarlo);
    CHECK(mc.std_error > 0.0);
    CHECK(std::abs(mc.expected_r - exact.expected_r) < 4 * mc.std_error);
    CHECK(mc.terms_used >= 20);
}

TEST_CASE("oracle rejects bad arguments") {
    CHECK_THROWS_AS(expected_r(0.0), std::invalid_argument);
    CHECK_THROWS_AS(expected_r(1.5), std::invalid_argument);
    OracleOptions opts;
    opts.tol = 0.0;
    CHECK_THROWS_AS(expected_r(0.5, opts), std::invalid_argument);
}
