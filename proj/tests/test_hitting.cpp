#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "covertime/hitting.hpp"
#include "covertime/simulate.hpp"
#include "support/chains.hpp"
#include "support/oracles.hpp"

using namespace covertime;
namespace ct = covertime::testing;

TEST_CASE("finite_hitting_set: targets = whole space") {
    const MarkovChain chain = ct::three_state_loop();
    const StateSet all = StateSet::full(3);
    CHECK(finite_hitting_set(chain, all) == all);
}

TEST_CASE("finite_hitting_set: unreachable head of the one-way chain") {
    const MarkovChain chain = ct::seven_state_one_way();
    const StateId x = chain.require("x");
    CHECK(finite_hitting_set(chain, StateSet::of(7, {x})) == StateSet::of(7, {x}));
}

TEST_CASE("finite_hitting_set: irreducible chains have B(S) = Omega") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 2 + trial % 5;
        const MarkovChain chain = ct::random_irreducible_chain(rng, n);
        StateSet targets(n);
        targets.set(rng() % n);
        CHECK(finite_hitting_set(chain, targets) == StateSet::full(n));
    }
}

TEST_CASE("finite_hitting_set rejects empty targets") {
    CHECK_THROWS_AS(finite_hitting_set(ct::cycle3(), StateSet(3)), EmptyTargetSet);
    CHECK_THROWS_AS(hitting_times(ct::cycle3(), StateSet(3)), EmptyTargetSet);
}

TEST_CASE("finite_hitting_set agrees with the per-state path characterization") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 2 + trial % 6;
        MarkovChain chain = ct::random_irreducible_chain(rng, n);
        if (trial % 3 == 0) chain = ct::seven_state_one_way();  // include a reducible one
        const std::size_t m = chain.size();
        StateSet targets(m);
        targets.set(rng() % m);
        if (rng() % 2) targets.set(rng() % m);

        // unreachable region = states that cannot reach S at all
        StateSet bad(m);
        for (StateId s = 0; s < m; ++s)
            if (!can_reach_avoiding(chain, s, targets, StateSet(m))) bad.set(s);

        const StateSet finite = finite_hitting_set(chain, targets);
        for (StateId s = 0; s < m; ++s) {
            const bool expected =
                targets.test(s) || !can_reach_avoiding(chain, s, bad, targets);
            CHECK(finite.test(s) == expected);
        }
    }
}

TEST_CASE("hitting_times: target states have time zero") {
    const MarkovChain chain = ct::three_state_loop();
    const auto sol = hitting_times(chain, StateSet::of(3, {1}));
    CHECK(sol.times.at(1) == 0);
}

TEST_CASE("hitting_times: two-state chain with r = 5/2") {
    const MarkovChain chain = ct::two_state(Rational(5, 2));
    const auto sol = hitting_times(chain, StateSet::of(2, {1}));
    CHECK(sol.times.at(0) == Rational(5, 2));
    CHECK(sol.times.at(1) == 0);
}

TEST_CASE("hitting_times: deterministic 3-cycle counts steps") {
    const auto sol = hitting_times(ct::cycle3(), StateSet::of(3, {2}));
    CHECK(sol.times.at(0) == 2);
    CHECK(sol.times.at(1) == 1);
    CHECK(sol.times.at(2) == 0);
}

TEST_CASE("hitting_times from the one-way chain head matches Monte Carlo") {
    const MarkovChain chain = ct::seven_state_one_way();
    const StateSet targets = StateSet::of(7, {chain.require("f")});
    const auto sol = hitting_times(chain, targets);
    const Rational exact = sol.times.at(chain.require("x"));

    const SimSummary sim = simulate_hitting(chain, chain.require("x"), targets,
                                            {.trials = 1'000'000, .seed = 20260810, .max_steps = 100'000});
    CHECK(std::abs(sim.mean - static_cast<double>(exact)) <= 3 * sim.std_error);
}

TEST_CASE("one-step equation holds exactly at every non-target state") {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + trial % 5;
        const MarkovChain chain = ct::random_irreducible_chain(rng, n);
        StateSet targets(n);
        targets.set(rng() % n);
        const auto sol = hitting_times(chain, targets);
        for (const auto& [x, value] : sol.times) {
            if (targets.test(x)) {
                CHECK(value == 0);
                continue;
            }
            Rational expected = 1;
            for (const auto& t : chain.row(x)) expected += t.prob * sol.times.at(t.to);
            CHECK(value == expected);
        }
    }
}

TEST_CASE("enlarging the target set shrinks neither B(S) nor grows times") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 3 + trial % 4;
        const MarkovChain chain = ct::random_irreducible_chain(rng, n);
        StateSet small(n);
        small.set(rng() % n);
        StateSet large = small;
        large.set(rng() % n);

        const auto sol_small = hitting_times(chain, small);
        const auto sol_large = hitting_times(chain, large);
        CHECK(sol_large.finite_set.contains(sol_small.finite_set));
        for (const auto& [x, t_small] : sol_small.times)
            if (sol_large.finite_set.test(x)) CHECK(sol_large.times.at(x) <= t_small);
    }
}

TEST_CASE("truncated series lower-bounds the exact value and converges") {
    // every non-target state moves straight into the target with prob >= 1/4
    const MarkovChain chain = MarkovChain::from_edges({{"a", "a", "1/2"},
                                                       {"a", "b", "1/4"},
                                                       {"a", "c", "1/4"},
                                                       {"b", "a", "1/4"},
                                                       {"b", "b", "1/4"},
                                                       {"b", "c", "1/2"},
                                                       {"c", "c", "1"}});
    const StateSet targets = StateSet::of(3, {2});
    const auto sol = hitting_times(chain, targets);
    CHECK(sol.times.at(0) == Rational(16, 5));
    CHECK(sol.times.at(1) == Rational(12, 5));

    for (StateId start : {StateId(0), StateId(1)}) {
        const auto series = ct::hitting_series(chain, targets, start, 60);
        const Rational exact = sol.times.at(start);
        CHECK(series.partial_sum < exact);  // strict: some mass always survives here
        CHECK(static_cast<double>(exact - series.partial_sum) < 1e-6);

        // exact identity: E = partial + T*surv_mass + sum_x surv(x)*E_x
        Rational reconstructed = series.partial_sum;
        for (const auto& [s, mass] : series.survivors)
            reconstructed += mass * (Rational(60) + sol.times.at(s));
        CHECK(reconstructed == exact);
    }
}

TEST_CASE("series partial sums never exceed exact hitting times") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 15; ++trial) {
        const std::size_t n = 2 + trial % 3;
        const MarkovChain chain = ct::random_irreducible_chain(rng, n);
        StateSet targets(n);
        targets.set(rng() % n);
        const auto sol = hitting_times(chain, targets);
        for (StateId s = 0; s < n; ++s) {
            const auto series = ct::hitting_series(chain, targets, s, 40);
            CHECK(series.partial_sum <= sol.times.at(s));
            Rational reconstructed = series.partial_sum;
            for (const auto& [y, mass] : series.survivors)
                reconstructed += mass * (Rational(40) + sol.times.at(y));
            CHECK(reconstructed == sol.times.at(s));
        }
    }
}

TEST_CASE("exact hitting times match the double-precision absorbing solve") {
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 15; ++trial) {
        const std::size_t n = 2 + trial % 3;
        const MarkovChain chain = ct::random_irreducible_chain(rng, n);
        StateSet targets(n);
        targets.set(rng() % n);
        const auto sol = hitting_times(chain, targets);
        const auto approx = ct::hitting_times_double(chain, targets, sol.finite_set);
        for (const auto& [x, value] : sol.times)
            CHECK(std::abs(static_cast<double>(value) - approx.at(x)) < 1e-9);
    }
}
