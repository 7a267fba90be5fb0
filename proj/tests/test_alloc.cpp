#include <doctest.h>

#include <random>

#include "fragsim/alloc.hpp"

using namespace fragsim;

namespace {

void admit_ls(SpectrumState& s, ChannelId id, double size) {
    s.carve(plan_linear(s, size), id, size);
}

// Gaps (0.1,0.2), (0.5,0.6), (0.9,1.0).
SpectrumState three_gaps() {
    SpectrumState s;
    admit_ls(s, 1, 0.1);  // (0,0.1)
    admit_ls(s, 2, 0.1);  // (0.1,0.2)
    admit_ls(s, 3, 0.3);  // (0.2,0.5)
    admit_ls(s, 4, 0.1);  // (0.5,0.6)
    admit_ls(s, 5, 0.3);  // (0.6,0.9)
    s.release(2);
    s.release(4);
    return s;
}

} // namespace

TEST_CASE("algorithm names round-trip") {
    CHECK(parse_algorithm("ls") == Algorithm::LinearScan);
    CHECK(parse_algorithm("cs") == Algorithm::CircularScan);
    CHECK(parse_algorithm("lfs") == Algorithm::LargestFirstScan);
    CHECK(algorithm_name(Algorithm::LargestFirstScan) == std::string("lfs"));
    CHECK_THROWS_AS(parse_algorithm("first-fit"), std::invalid_argument);
}

TEST_CASE("linear scan takes gaps in position order") {
    SpectrumState s = three_gaps();
    const GapPlan plan = plan_linear(s, 0.15);
    REQUIRE(plan.entries.size() == 2);
    CHECK(plan.entries[0].gap_lo == doctest::Approx(0.1));
    CHECK(plan.entries[0].fill == doctest::Approx(0.1));
    CHECK(plan.entries[1].gap_lo == doctest::Approx(0.5));
    CHECK(plan.entries[1].fill == doctest::Approx(0.05));

    SpectrumState empty;
    const GapPlan single = plan_linear(empty, 0.4);
    REQUIRE(single.entries.size() == 1);
    CHECK(single.entries[0].fill == doctest::Approx(0.4));

    // size exactly the first gap's length: one full entry
    const GapPlan exact = plan_linear(s, s.gaps_by_position().begin()->second - 0.1);
    REQUIRE(exact.entries.size() == 1);
    s.carve(exact, 100, exact.total_fill());
    CHECK(s.channel_fragment_count(100) == 1);
}

TEST_CASE("circular scan resumes from the cursor and wraps") {
    SpectrumState s = three_gaps();

    SUBCASE("from a mid-spectrum cursor") {
        ScanCursor cur{0.5};
        const CircularPlan cp = plan_circular(s, cur, 0.12);
        REQUIRE(cp.plan.entries.size() == 2);
        CHECK(cp.plan.entries[0].gap_lo == doctest::Approx(0.5));
        CHECK(cp.plan.entries[0].fill == doctest::Approx(0.1));
        CHECK(cp.plan.entries[1].gap_lo == doctest::Approx(0.9));
        CHECK(cp.plan.entries[1].fill == doctest::Approx(0.02));
        REQUIRE(cp.cursor.pos.has_value());
        CHECK(*cp.cursor.pos == doctest::Approx(0.92));
    }

    SUBCASE("wraps past the end of the spectrum") {
        ScanCursor cur{0.9};
        const CircularPlan cp = plan_circular(s, cur, 0.15);
        REQUIRE(cp.plan.entries.size() == 2);
        CHECK(cp.plan.entries[0].gap_lo == doctest::Approx(0.9));
        CHECK(cp.plan.entries[0].fill == doctest::Approx(0.1));
        CHECK(cp.plan.entries[1].gap_lo == doctest::Approx(0.1));
        CHECK(cp.plan.entries[1].fill == doctest::Approx(0.05));
    }

    SUBCASE("exactly exhausted last gap advances the cursor") {
        ScanCursor cur{0.5};
        const CircularPlan cp = plan_circular(s, cur, 0.1);
        REQUIRE(cp.plan.entries.size() == 1);
        CHECK(cp.plan.entries[0].fill == doctest::Approx(0.1));
        REQUIRE(cp.cursor.pos.has_value());
        CHECK(*cp.cursor.pos == doctest::Approx(0.9)); // next gap in circular order
    }

    SUBCASE("empty cursor starts at the first gap, like LS") {
        ScanCursor cur;
        const CircularPlan cp = plan_circular(s, cur, 0.15);
        const GapPlan ls = plan_linear(s, 0.15);
        REQUIRE(cp.plan.entries.size() == ls.entries.size());
        for (std::size_t i = 0; i < ls.entries.size(); ++i) {
            CHECK(cp.plan.entries[i].gap_lo == ls.entries[i].gap_lo);
            CHECK(cp.plan.entries[i].fill == ls.entries[i].fill);
        }
    }

    SUBCASE("cursor inside a merged gap resolves to the containing gap") {
        // Cursor sits at 0.55; releasing (0.2,0.5) merges its neighbor gaps
        // into (0.1,0.6), which now contains the cursor.
        SpectrumState t = three_gaps();
        t.release(3);
        ScanCursor cur{0.55};
        const CircularPlan cp = plan_circular(t, cur, 0.05);
        CHECK(cp.plan.entries[0].gap_lo == doctest::Approx(0.1));
    }
}

TEST_CASE("largest-first takes gaps by decreasing size") {
    SpectrumState s;
    admit_ls(s, 1, 0.05); // will be released -> gap (0.0,0.05)
    admit_ls(s, 2, 0.25);
    admit_ls(s, 3, 0.12); // -> gap (0.3,0.42)
    admit_ls(s, 4, 0.28);
    admit_ls(s, 5, 0.08); // -> gap (0.7,0.78)
    admit_ls(s, 6, 0.22); // fills through (1.0)
    s.release(1);
    s.release(3);
    s.release(5);
    REQUIRE(s.gap_count() == 3); // sizes 0.05, 0.12, 0.08

    SUBCASE("spans the two largest") {
        const GapPlan plan = plan_largest_first(s, 0.15);
        REQUIRE(plan.entries.size() == 2);
        CHECK(plan.entries[0].gap_lo == doctest::Approx(0.3));
        CHECK(plan.entries[0].fill == doctest::Approx(0.12));
        CHECK(plan.entries[1].gap_lo == doctest::Approx(0.7));
        CHECK(plan.entries[1].fill == doctest::Approx(0.03));
        s.carve(plan, 7, 0.15);
        CHECK(s.channel_fragment_count(7) == 2);
    }

    SUBCASE("fits in the largest alone") {
        const GapPlan plan = plan_largest_first(s, 0.10);
        REQUIRE(plan.entries.size() == 1);
        CHECK(plan.entries[0].gap_lo == doctest::Approx(0.3));
        CHECK(plan.entries[0].fill == doctest::Approx(0.10));
    }
}

TEST_CASE("largest-first breaks exact size ties by position") {
    // Binary-exact gap lengths so the tie is real: (0.25,0.5) and (0.625,0.875).
    SpectrumState s;
    admit_ls(s, 1, 0.25);    // (0,0.25)
    admit_ls(s, 2, 0.25);    // (0.25,0.5)
    admit_ls(s, 3, 0.125);   // (0.5,0.625)
    admit_ls(s, 4, 0.25);    // (0.625,0.875)
    admit_ls(s, 5, 0.125);   // (0.875,1.0)
    s.release(2);
    s.release(4);
    const GapPlan plan = plan_largest_first(s, 0.3);
    REQUIRE(plan.entries.size() == 2);
    CHECK(plan.entries[0].gap_lo == doctest::Approx(0.25)); // leftmost of the tied pair
    CHECK(plan.entries[0].fill == doctest::Approx(0.25));
    CHECK(plan.entries[1].gap_lo == doctest::Approx(0.625));
    CHECK(plan.entries[1].fill == doctest::Approx(0.05));
}

TEST_CASE("planners reject infeasible requests") {
    SpectrumState s = three_gaps();
    CHECK_THROWS_AS(plan_linear(s, 0.9), Insufficient);
    CHECK_THROWS_AS(plan_largest_first(s, 0.9), Insufficient);
    CHECK_THROWS_AS(plan_circular(s, ScanCursor{}, 0.9), Insufficient);
    CHECK_THROWS_AS(plan_linear(s, 0.0), Insufficient);
    CHECK_THROWS_AS(plan_linear(s, -0.1), Insufficient);
}

TEST_CASE("plan properties on random states") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        // Build a random fragmented state.
        SpectrumState s;
        std::vector<ChannelId> live;
        ChannelId next = 1;
        ScanCursor cursor;
        for (int i = 0; i < 120; ++i) {
            const double u = std::uniform_real_distribution<>(0.005, 0.12)(rng);
            if (u <= s.total_gap_size()) {
                auto cp = plan_circular(s, cursor, u);
                cursor = cp.cursor;
                s.carve(cp.plan, next, u);
                live.push_back(next++);
            }
            if (!live.empty() && (rng() % 3 == 0)) {
                const std::size_t pick = rng() % live.size();
                s.release(live[pick]);
                live.erase(live.begin() + pick);
                cursor = ScanCursor{};
            }
        }
        if (s.total_gap_size() < 0.01) continue;
        const double size = std::uniform_real_distribution<>(0.25, 0.95)(rng) * s.total_gap_size();

        const GapPlan ls = plan_linear(s, size);
        const GapPlan lfs = plan_largest_first(s, size);
        const CircularPlan cs = plan_circular(s, ScanCursor{0.4}, size);

        // The same plan for the same inputs (purity).
        const GapPlan ls2 = plan_linear(s, size);
        REQUIRE(ls.entries.size() == ls2.entries.size());
        for (std::size_t i = 0; i < ls.entries.size(); ++i)
            CHECK(ls.entries[i].gap_lo == ls2.entries[i].gap_lo);

        // Greedy by size uses the fewest gaps of the three scans.
        CHECK(lfs.entries.size() <= ls.entries.size());
        CHECK(lfs.entries.size() <= cs.plan.entries.size());

        for (const GapPlan* plan : {&ls, &lfs, &cs.plan}) {
            CHECK(std::abs(plan->total_fill() - size) < 1e-9);
            // Every entry but the last covers its gap.
            const auto& gaps = s.gaps_by_position();
            for (std::size_t i = 0; i + 1 < plan->entries.size(); ++i) {
                const auto it = gaps.find(plan->entries[i].gap_lo);
                REQUIRE(it != gaps.end());
                CHECK(plan->entries[i].fill == doctest::Approx(it->second - it->first));
            }
            // carve() accepts the plan and produces one fragment per entry.
            SpectrumState copy = s;
            copy.carve(*plan, 1000, size);
            CHECK(copy.channel_fragment_count(1000) == static_cast<int>(plan->entries.size()));
            copy.validate();
        }
    }
}
