#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "covertime/chain.hpp"
#include "covertime/hitting.hpp"

namespace covertime {

// Positions of the k walks, one base-chain state per walk.
using WalkVector = std::vector<StateId>;

// One state of the auxiliary chain: where the k walks stand, plus the set of
// base states any of them has visited so far. Every walk position is a
// member of the visited set.
struct AuxState {
    WalkVector walks;
    StateSet visited;

    bool operator==(const AuxState&) const = default;
};

struct AuxStateHash {
    std::size_t operator()(const AuxState& s) const {
        std::size_t h = s.visited.hash();
        for (StateId p : s.walks) h = (h ^ (p + 0x9e3779b9u)) * 1099511628211ull;
        return h;
    }
};

using AuxStateId = std::uint32_t;

struct AuxTransition {
    AuxStateId to;
    Rational prob;

    bool operator==(const AuxTransition&) const = default;
};

inline constexpr std::size_t kDefaultStateBudget = 1'000'000;

// The portion of the k-walk auxiliary chain reachable from a start state.
// States are interned in BFS discovery order, which makes rebuilding and
// exporting deterministic.
class AuxChain {
public:
    std::size_t size() const { return states_.size(); }
    std::size_t walk_count() const { return k_; }
    const AuxState& state(AuxStateId id) const { return states_[id]; }
    const std::vector<AuxTransition>& row(AuxStateId id) const { return rows_[id]; }
    AuxStateId start() const { return start_; }

    // Reachable states whose visited set is the whole base space; empty when
    // covering is impossible from the start.
    const std::vector<AuxStateId>& targets() const { return targets_; }

    const std::vector<std::string>& base_labels() const { return base_labels_; }

private:
    friend AuxChain build_aux_chain(const MarkovChain&, std::size_t, const WalkVector&,
                                    std::size_t);

    std::size_t k_ = 0;
    AuxStateId start_ = 0;
    std::vector<AuxState> states_;
    std::vector<std::vector<AuxTransition>> rows_;
    std::vector<AuxStateId> targets_;
    std::vector<std::string> base_labels_;
};

// Transition weight between two auxiliary states: the product of the k
// per-walk probabilities if the visited set grows by exactly the new walk
// positions, zero otherwise.
inline Rational aux_kernel(const MarkovChain& chain, const AuxState& from, const AuxState& to) {
    StateSet expected = from.visited;
    for (StateId p : to.walks) expected.set(p);
    if (to.visited != expected) return 0;
    Rational product = 1;
    for (std::size_t j = 0; j < from.walks.size(); ++j) {
        product *= chain.prob(from.walks[j], to.walks[j]);
        if (product == 0) return 0;
    }
    return product;
}

// Breadth-first construction of the reachable auxiliary chain. Transition
// probabilities are exact k-fold products; parallel branches that land on
// the same auxiliary state are merged by summation.
inline AuxChain build_aux_chain(const MarkovChain& chain, std::size_t k, const WalkVector& start,
                                std::size_t budget = kDefaultStateBudget) {
    if (k < 1) throw InternalError("walk count k must be at least 1");
    if (start.size() != k)
        throw DimensionMismatch("start vector has " + std::to_string(start.size()) +
                                " positions, expected k = " + std::to_string(k));
    const std::size_t n = chain.size();
    for (StateId p : start)
        if (p >= n) throw UnknownStateLabel("state index " + std::to_string(p));

    AuxChain aux;
    aux.k_ = k;
    aux.base_labels_ = chain.labels();

    std::unordered_map<AuxState, AuxStateId, AuxStateHash> intern;
    auto intern_state = [&](AuxState s) {
        auto it = intern.find(s);
        if (it != intern.end()) return it->second;
        if (aux.states_.size() >= budget) throw StateSpaceBudgetExceeded(budget);
        const auto id = static_cast<AuxStateId>(aux.states_.size());
        intern.emplace(s, id);
        aux.states_.push_back(std::move(s));
        return id;
    };

    StateSet initial_visited(n);
    for (StateId p : start) initial_visited.set(p);
    aux.start_ = intern_state(AuxState{start, initial_visited});

    std::deque<AuxStateId> frontier{aux.start_};
    aux.rows_.resize(1);
    while (!frontier.empty()) {
        const AuxStateId id = frontier.front();
        frontier.pop_front();
        const AuxState source = aux.states_[id];  // copy: states_ reallocates below

        std::map<AuxStateId, Rational> out;
        WalkVector dest(k);
        std::vector<std::size_t> choice(k, 0);
        while (true) {
            Rational prob = 1;
            StateSet visited = source.visited;
            for (std::size_t j = 0; j < k; ++j) {
                const Transition& t = chain.row(source.walks[j])[choice[j]];
                prob *= t.prob;
                dest[j] = t.to;
                visited.set(t.to);
            }
            const std::size_t before = aux.states_.size();
            const AuxStateId to = intern_state(AuxState{dest, visited});
            if (aux.states_.size() > before) frontier.push_back(to);
            out[to] += prob;

            // odometer over the k per-walk transition lists
            std::size_t j = 0;
            for (; j < k; ++j) {
                if (++choice[j] < chain.row(source.walks[j]).size()) break;
                choice[j] = 0;
            }
            if (j == k) break;
        }

        aux.rows_.resize(aux.states_.size());
        auto& row = aux.rows_[id];
        Rational sum = 0;
        for (const auto& [to, prob] : out) {
            row.push_back({to, prob});
            sum += prob;
        }
        if (sum != 1) throw InternalError("auxiliary chain row does not sum to 1");
    }

    for (AuxStateId id = 0; id < aux.states_.size(); ++id)
        if (aux.states_[id].visited.is_full()) aux.targets_.push_back(id);
    return aux;
}

inline const std::vector<AuxStateId>& target_set(const AuxChain& aux) { return aux.targets(); }

// "(x, {a,b})" for one walk, "((x,y), {a,b})" for several.
inline std::string render_aux_state(const AuxChain& aux, AuxStateId id) {
    const AuxState& s = aux.state(id);
    std::ostringstream text;
    text << "(";
    if (s.walks.size() == 1) {
        text << aux.base_labels()[s.walks[0]];
    } else {
        text << "(";
        for (std::size_t j = 0; j < s.walks.size(); ++j) {
            if (j > 0) text << ",";
            text << aux.base_labels()[s.walks[j]];
        }
        text << ")";
    }
    text << ", {";
    bool first = true;
    for (std::size_t m : s.visited.members()) {
        if (!first) text << ",";
        text << aux.base_labels()[m];
        first = false;
    }
    text << "})";
    return text.str();
}

// View of the auxiliary chain as an ordinary Markov chain, with rendered
// auxiliary states as labels. State ids are preserved.
inline MarkovChain to_markov_chain(const AuxChain& aux) {
    std::vector<std::string> labels;
    labels.reserve(aux.size());
    for (AuxStateId id = 0; id < aux.size(); ++id) labels.push_back(render_aux_state(aux, id));
    std::vector<std::vector<Transition>> rows(aux.size());
    for (AuxStateId id = 0; id < aux.size(); ++id)
        for (const auto& t : aux.row(id)) rows[id].push_back({t.to, t.prob});
    return MarkovChain::from_rows(std::move(labels), std::move(rows));
}

namespace detail {
inline std::string dot_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}
}  // namespace detail

// Deterministic DOT rendering: nodes and edges follow interning order, so
// repeated exports of the same chain are byte-identical. Target states are
// drawn with a second periphery.
inline std::string export_dot(const AuxChain& aux) {
    std::ostringstream out;
    out << "digraph aux_chain {\n  rankdir=LR;\n  node [shape=circle];\n";
    for (AuxStateId id = 0; id < aux.size(); ++id) {
        out << "  n" << id << " [label=\"" << detail::dot_escape(render_aux_state(aux, id))
            << "\"";
        if (aux.state(id).visited.is_full()) out << ", peripheries=2";
        out << "];\n";
    }
    for (AuxStateId id = 0; id < aux.size(); ++id)
        for (const auto& t : aux.row(id))
            out << "  n" << id << " -> n" << t.to << " [label=\""
                << detail::dot_escape(render_rational(t.prob)) << "\"];\n";
    out << "}\n";
    return out.str();
}

// Expected number of steps for k walks from `start` to visit every state,
// exactly; nullopt when full coverage is impossible from there.
using CoverTime = std::optional<Rational>;

inline CoverTime cover_time(const MarkovChain& chain, std::size_t k, const WalkVector& start,
                            std::size_t budget = kDefaultStateBudget) {
    const AuxChain aux = build_aux_chain(chain, k, start, budget);
    if (aux.targets().empty()) return std::nullopt;

    const MarkovChain aux_mc = to_markov_chain(aux);
    StateSet targets(aux.size());
    for (AuxStateId id : aux.targets()) targets.set(id);

    const HittingSolution solution = hitting_times(aux_mc, targets);
    if (!solution.finite_set.test(aux.start())) return std::nullopt;
    return solution.times.at(aux.start());
}

}  // namespace covertime
