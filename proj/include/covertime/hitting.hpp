#pragma once

#include <deque>
#include <map>
#include <vector>

#include "covertime/chain.hpp"
#include "covertime/linalg.hpp"

namespace covertime {

// Exact expected hitting times over the finite set B(S).
struct HittingSolution {
    StateSet finite_set;                 // B(S): starts with finite expected hitting time
    std::map<StateId, Rational> times;   // defined exactly on members of finite_set
};

// B(S) = states whose expected hitting time of `targets` is finite. A state
// belongs to B(S) iff no path from it can dodge S and still reach a state
// from which S is unreachable.
inline StateSet finite_hitting_set(const MarkovChain& chain, const StateSet& targets) {
    if (targets.empty()) throw EmptyTargetSet();
    const std::size_t n = chain.size();

    std::vector<std::vector<StateId>> reverse(n);
    for (StateId s = 0; s < n; ++s)
        for (const auto& t : chain.row(s)) reverse[t.to].push_back(s);

    // states that can reach S at all
    StateSet can_reach = targets;
    std::deque<StateId> frontier;
    for (std::size_t s : targets.members()) frontier.push_back(static_cast<StateId>(s));
    while (!frontier.empty()) {
        const StateId s = frontier.front();
        frontier.pop_front();
        for (StateId p : reverse[s])
            if (!can_reach.test(p)) {
                can_reach.set(p);
                frontier.push_back(p);
            }
    }

    // escaping = states with a path to the unreachable region whose vertices
    // all avoid S; expected hitting time from them is infinite
    StateSet escaping(n);
    for (StateId s = 0; s < n; ++s)
        if (!can_reach.test(s)) {
            escaping.set(s);
            frontier.push_back(s);
        }
    while (!frontier.empty()) {
        const StateId s = frontier.front();
        frontier.pop_front();
        for (StateId p : reverse[s])
            if (!targets.test(p) && !escaping.test(p)) {
                escaping.set(p);
                frontier.push_back(p);
            }
    }

    StateSet finite(n);
    for (StateId s = 0; s < n; ++s)
        if (!escaping.test(s)) finite.set(s);
    return finite;
}

// The linear system for expected hitting times, assembled over B(S) only.
// Row order is ascending StateId. Target states keep their trivial
// h(s) = 0 rows, so the dominance certificate can be checked as stated.
struct HittingSystem {
    std::vector<StateId> index_to_state;  // row -> chain state
    RationalMatrix matrix;                // A = I_b - M
    RationalVector rhs;                   // 1 on non-target rows, 0 on target rows
};

inline HittingSystem assemble_hitting_system(const MarkovChain& chain, const StateSet& targets,
                                             const StateSet& finite_set) {
    const auto members = finite_set.members();
    const std::size_t b = members.size();
    std::vector<std::size_t> row_of(chain.size(), b);
    for (std::size_t i = 0; i < b; ++i) row_of[members[i]] = i;

    HittingSystem system{std::vector<StateId>(), RationalMatrix(b), RationalVector(b, Rational(0))};
    system.index_to_state.reserve(b);
    for (std::size_t m : members) system.index_to_state.push_back(static_cast<StateId>(m));

    for (std::size_t i = 0; i < b; ++i) {
        const StateId x = system.index_to_state[i];
        system.matrix.set(i, i, 1);
        if (targets.test(x)) continue;  // trivial equation h(x) = 0
        system.rhs[i] = 1;
        for (const auto& t : chain.row(x)) {
            if (!finite_set.test(t.to))
                throw InternalError("state in B(S) has a transition leaving B(S)");
            if (targets.test(t.to)) continue;
            const std::size_t j = row_of[t.to];
            system.matrix.set(i, j, system.matrix.get(i, j) - t.prob);
        }
    }
    return system;
}

inline HittingSystem assemble_hitting_system(const MarkovChain& chain, const StateSet& targets) {
    return assemble_hitting_system(chain, targets, finite_hitting_set(chain, targets));
}

// Exact expected hitting times E_x[time to reach S] for every x in B(S).
inline HittingSolution hitting_times(const MarkovChain& chain, const StateSet& targets) {
    const StateSet finite = finite_hitting_set(chain, targets);
    const HittingSystem system = assemble_hitting_system(chain, targets, finite);
    if (!is_wcdd(system.matrix)) throw InternalNonWcdd();
    const RationalVector h = solve_linear(system.matrix, system.rhs);

    HittingSolution solution{finite, {}};
    for (std::size_t i = 0; i < h.size(); ++i)
        solution.times.emplace(system.index_to_state[i], h[i]);

    // one-step equation, re-checked exactly against the original chain
    for (const auto& [x, value] : solution.times) {
        if (value < 0) throw InternalError("negative expected hitting time");
        if (targets.test(x)) {
            if (value != 0) throw InternalError("nonzero hitting time on a target state");
            continue;
        }
        Rational expected = 1;
        for (const auto& t : chain.row(x)) expected += t.prob * solution.times.at(t.to);
        if (expected != value) throw InternalError("one-step equation violated after solve");
    }
    return solution;
}

}  // namespace covertime
