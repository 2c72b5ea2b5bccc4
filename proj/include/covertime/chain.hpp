#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "covertime/errors.hpp"
#include "covertime/rational.hpp"
#include "covertime/state_set.hpp"

namespace covertime {

// Dense index of a state; labels exist only at the API boundary.
using StateId = std::uint32_t;

struct Transition {
    StateId to;
    Rational prob;

    bool operator==(const Transition&) const = default;
};

// One labelled edge as it appears in input files: from, to, probability string.
using RawEdge = std::array<std::string, 3>;

// Finite Markov chain with exact rational transition probabilities.
// Invariants, enforced at construction:
//   * labels are unique and non-empty,
//   * every stored probability p satisfies 0 < p <= 1 (zeros are dropped),
//   * every row sums to exactly 1.
class MarkovChain {
public:
    // Validates and builds a chain from labelled edges. When `labels` is
    // empty, states are indexed in first-appearance order over the edges.
    static MarkovChain from_edges(const std::vector<RawEdge>& edges,
                                  const std::vector<std::string>& labels = {}) {
        std::vector<std::string> order = labels;
        std::unordered_map<std::string, StateId> index;
        auto add_label = [&](const std::string& label) {
            if (label.empty()) throw ChainFormatError("state labels must be non-empty");
            if (!index.emplace(label, static_cast<StateId>(index.size())).second)
                throw ChainFormatError("duplicate state label '" + label + "'");
        };
        if (!order.empty()) {
            for (const auto& label : order) add_label(label);
        } else {
            for (const auto& edge : edges) {
                for (const auto* label : {&edge[0], &edge[1]})
                    if (!index.contains(*label)) {
                        add_label(*label);
                        order.push_back(*label);
                    }
            }
        }
        if (order.empty()) throw EmptyChain();

        const std::size_t n = order.size();
        std::vector<std::vector<Transition>> rows(n);
        std::vector<std::vector<bool>> seen(n, std::vector<bool>(n, false));
        for (const auto& edge : edges) {
            auto from_it = index.find(edge[0]);
            auto to_it = index.find(edge[1]);
            if (from_it == index.end()) throw UnknownStateLabel(edge[0]);
            if (to_it == index.end()) throw UnknownStateLabel(edge[1]);
            const StateId from = from_it->second;
            const StateId to = to_it->second;
            if (seen[from][to]) throw DuplicateEdge(edge[0], edge[1]);
            seen[from][to] = true;

            const Rational p = parse_rational(edge[2]);
            if (p < 0 || p > 1) throw ProbabilityOutOfRange(edge[0], edge[1], edge[2]);
            if (p == 0) continue;  // sparse: zero entries are simply absent
            rows[from].push_back({to, p});
        }
        return from_rows(std::move(order), std::move(rows));
    }

    // Builds from already-exact rows (used for derived chains). Performs the
    // same invariant checks except string parsing.
    static MarkovChain from_rows(std::vector<std::string> labels,
                                 std::vector<std::vector<Transition>> rows) {
        if (labels.empty()) throw EmptyChain();
        MarkovChain chain;
        chain.labels_ = std::move(labels);
        chain.rows_ = std::move(rows);
        chain.rows_.resize(chain.labels_.size());
        for (StateId s = 0; s < chain.labels_.size(); ++s) {
            if (chain.labels_[s].empty())
                throw ChainFormatError("state labels must be non-empty");
            if (!chain.index_.emplace(chain.labels_[s], s).second)
                throw ChainFormatError("duplicate state label '" + chain.labels_[s] + "'");
        }
        for (StateId s = 0; s < chain.rows_.size(); ++s) {
            auto& row = chain.rows_[s];
            std::sort(row.begin(), row.end(),
                      [](const Transition& a, const Transition& b) { return a.to < b.to; });
            Rational sum = 0;
            for (const auto& t : row) {
                if (t.to >= chain.size())
                    throw ChainFormatError("transition to unknown state index");
                if (t.prob <= 0 || t.prob > 1)
                    throw ProbabilityOutOfRange(chain.labels_[s], chain.labels_[t.to],
                                                render_rational(t.prob));
                sum += t.prob;
            }
            if (sum != 1) throw RowSumMismatch(chain.labels_[s], render_rational(sum));
        }
        return chain;
    }

    std::size_t size() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::string& label(StateId s) const { return labels_[s]; }

    std::optional<StateId> find(std::string_view label) const {
        auto it = index_.find(std::string(label));
        return it == index_.end() ? std::nullopt : std::optional<StateId>(it->second);
    }

    StateId require(std::string_view label) const {
        auto id = find(label);
        if (!id) throw UnknownStateLabel(std::string(label));
        return *id;
    }

    // Outgoing transitions of `s`, sorted by destination; zero entries absent.
    const std::vector<Transition>& row(StateId s) const { return rows_[s]; }

    Rational prob(StateId from, StateId to) const {
        const auto& row = rows_[from];
        auto it = std::lower_bound(row.begin(), row.end(), to,
                                   [](const Transition& t, StateId id) { return t.to < id; });
        return it != row.end() && it->to == to ? it->prob : Rational(0);
    }

    bool operator==(const MarkovChain& other) const {
        return labels_ == other.labels_ && rows_ == other.rows_;
    }

private:
    MarkovChain() = default;

    std::vector<std::string> labels_;
    std::unordered_map<std::string, StateId> index_;
    std::vector<std::vector<Transition>> rows_;
};

inline MarkovChain validate_chain(const std::vector<RawEdge>& edges,
                                  const std::vector<std::string>& labels = {}) {
    return MarkovChain::from_edges(edges, labels);
}

// States reachable from `start` along nonzero transitions (start included).
inline StateSet reachable_from(const MarkovChain& chain, const StateSet& start) {
    StateSet reached = start;
    std::deque<StateId> frontier;
    for (std::size_t s : start.members()) frontier.push_back(static_cast<StateId>(s));
    while (!frontier.empty()) {
        const StateId s = frontier.front();
        frontier.pop_front();
        for (const auto& t : chain.row(s)) {
            if (!reached.test(t.to)) {
                reached.set(t.to);
                frontier.push_back(t.to);
            }
        }
    }
    return reached;
}

// true iff some path from `from` reaches `targets` while every intermediate
// state avoids `blocked`. Endpoints are exempt: `from` may be blocked, and a
// path may end in a blocked target.
inline bool can_reach_avoiding(const MarkovChain& chain, StateId from,
                               const StateSet& targets, const StateSet& blocked) {
    if (targets.empty()) return false;
    if (targets.test(from)) return true;  // empty path
    StateSet expanded(chain.size());
    expanded.set(from);
    std::deque<StateId> frontier{from};
    while (!frontier.empty()) {
        const StateId s = frontier.front();
        frontier.pop_front();
        for (const auto& t : chain.row(s)) {
            if (targets.test(t.to)) return true;
            if (!blocked.test(t.to) && !expanded.test(t.to)) {
                expanded.set(t.to);
                frontier.push_back(t.to);
            }
        }
    }
    return false;
}

}  // namespace covertime
