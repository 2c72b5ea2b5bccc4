#pragma once

#include <cstddef>
#include <deque>
#include <map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "covertime/errors.hpp"
#include "covertime/rational.hpp"

namespace covertime {

// Square sparse matrix over exact rationals. Absent entries are zero.
class RationalMatrix {
public:
    explicit RationalMatrix(std::size_t n) : rows_(n) {}

    static RationalMatrix identity(std::size_t n) {
        RationalMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1);
        return m;
    }

    std::size_t size() const { return rows_.size(); }

    void set(std::size_t r, std::size_t c, const Rational& value) {
        if (value == 0)
            rows_[r].erase(c);
        else
            rows_[r][c] = value;
    }

    Rational get(std::size_t r, std::size_t c) const {
        auto it = rows_[r].find(c);
        return it == rows_[r].end() ? Rational(0) : it->second;
    }

    const std::map<std::size_t, Rational>& row(std::size_t r) const { return rows_[r]; }

private:
    std::vector<std::map<std::size_t, Rational>> rows_;
};

using RationalVector = std::vector<Rational>;

// A*x - b, exact.
inline RationalVector residual(const RationalMatrix& A, const RationalVector& x,
                               const RationalVector& b) {
    const std::size_t n = A.size();
    if (x.size() != n || b.size() != n)
        throw DimensionMismatch("residual: matrix is " + std::to_string(n) + "x" +
                                std::to_string(n) + ", vectors have " +
                                std::to_string(x.size()) + " and " + std::to_string(b.size()) +
                                " entries");
    RationalVector r(n, Rational(0));
    for (std::size_t i = 0; i < n; ++i) {
        Rational acc = 0;
        for (const auto& [c, v] : A.row(i)) acc += v * x[c];
        r[i] = acc - b[i];
    }
    return r;
}

// Weak chained diagonal dominance: every row weakly diagonally dominant, and
// every row connected through nonzero entries to a strictly dominant row.
// Exact comparisons throughout; there is deliberately no tolerance anywhere.
inline bool is_wcdd(const RationalMatrix& A) {
    const std::size_t n = A.size();
    std::vector<bool> strict(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        Rational diag = 0;
        Rational off = 0;
        for (const auto& [c, v] : A.row(i)) {
            if (c == i)
                diag = abs(v);
            else
                off += abs(v);
        }
        if (diag < off) return false;  // condition (i) fails
        strict[i] = diag > off;
    }

    // condition (ii): backward reachability from the strictly dominant rows
    // along edges r -> c (off-diagonal nonzeros)
    std::vector<std::vector<std::size_t>> into(n);  // into[c] = rows with A(r,c) != 0
    for (std::size_t r = 0; r < n; ++r)
        for (const auto& [c, v] : A.row(r))
            if (c != r) into[c].push_back(r);

    std::vector<bool> chained = strict;
    std::deque<std::size_t> frontier;
    for (std::size_t i = 0; i < n; ++i)
        if (strict[i]) frontier.push_back(i);
    while (!frontier.empty()) {
        const std::size_t c = frontier.front();
        frontier.pop_front();
        for (std::size_t r : into[c])
            if (!chained[r]) {
                chained[r] = true;
                frontier.push_back(r);
            }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!chained[i]) return false;
    return true;
}

namespace detail {

// Augmented row scaled to integers: coefficients and right-hand side share an
// (untracked) positive factor, so the represented equation is unchanged.
struct IntRow {
    std::map<std::size_t, Integer> coeff;
    Integer rhs = 0;

    void normalize_content() {
        Integer g = abs(rhs);
        for (const auto& [c, v] : coeff) {
            if (g == 1) return;
            g = gcd(g, abs(v));
        }
        if (g <= 1) return;
        for (auto& [c, v] : coeff) v /= g;
        rhs /= g;
    }
};

// Strongly connected components of the off-diagonal sparsity digraph,
// iterative Tarjan. Components are emitted successors-first, so eliminating
// them in emission order never spills fill outside the current component:
// by the time a component is processed, its rows can only hold entries in
// its own columns.
inline std::vector<std::vector<std::size_t>> sparsity_components(
    const std::vector<std::vector<std::size_t>>& adj) {
    const std::size_t n = adj.size();
    constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, kUnvisited), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> components;
    std::size_t next_index = 0;

    std::vector<std::pair<std::size_t, std::size_t>> frames;  // (vertex, next child)
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != kUnvisited) continue;
        frames.emplace_back(root, 0);
        while (!frames.empty()) {
            const std::size_t v = frames.back().first;
            std::size_t& child = frames.back().second;
            if (child == 0) {
                index[v] = low[v] = next_index++;
                stack.push_back(v);
                on_stack[v] = true;
            }
            if (child < adj[v].size()) {
                const std::size_t w = adj[v][child++];
                if (index[w] == kUnvisited) {
                    frames.emplace_back(w, 0);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                components.emplace_back();
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    components.back().push_back(w);
                } while (w != v);
            }
            frames.pop_back();
            if (!frames.empty()) low[frames.back().first] = std::min(low[frames.back().first], low[v]);
        }
    }
    return components;
}

}  // namespace detail

// Solves A*x = b exactly over the rationals. Elimination is fraction-free:
// rows are scaled to integers up front, each update is the cross-product
// piv*row_i - v*row_p followed by a content-gcd reduction, and the only
// divisions happen in the final back-substitution. Elimination proceeds one
// irreducible block of the sparsity digraph at a time (successors first),
// which turns block-triangular systems into a cheap back-substitution
// cascade; within a block, pivots prefer the structurally sparsest row and
// its least-populated column.
inline RationalVector solve_linear(const RationalMatrix& A, const RationalVector& b) {
    const std::size_t n = A.size();
    if (b.size() != n)
        throw DimensionMismatch("solve_linear: matrix is " + std::to_string(n) + "x" +
                                std::to_string(n) + ", rhs has " + std::to_string(b.size()) +
                                " entries");

    std::vector<detail::IntRow> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
        Integer scale = denominator(b[i]);
        for (const auto& [c, v] : A.row(i)) scale = lcm(scale, denominator(v));
        for (const auto& [c, v] : A.row(i))
            rows[i].coeff[c] = numerator(v) * (scale / denominator(v));
        rows[i].rhs = numerator(b[i]) * (scale / denominator(b[i]));
    }

    std::vector<std::unordered_set<std::size_t>> col_rows(n);
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& [c, v] : rows[i].coeff) {
            col_rows[c].insert(i);
            if (c != i) adj[i].push_back(c);
        }

    std::vector<std::pair<std::size_t, std::size_t>> pivots;
    pivots.reserve(n);

    for (const std::vector<std::size_t>& block : detail::sparsity_components(adj)) {
        std::vector<std::size_t> remaining = block;
        while (!remaining.empty()) {
            // sparsest remaining row of the block; an all-zero row means the
            // block (and hence the matrix) is singular
            std::size_t best = 0;
            for (std::size_t i = 1; i < remaining.size(); ++i)
                if (rows[remaining[i]].coeff.size() < rows[remaining[best]].coeff.size())
                    best = i;
            const std::size_t pivot_row = remaining[best];
            if (rows[pivot_row].coeff.empty()) throw SingularMatrix();
            remaining[best] = remaining.back();
            remaining.pop_back();

            std::size_t pivot_col = n;
            std::size_t best_count = 0;
            for (const auto& [c, v] : rows[pivot_row].coeff) {
                const std::size_t count = col_rows[c].size();
                if (pivot_col == n || count < best_count) {
                    pivot_col = c;
                    best_count = count;
                }
            }

            const Integer piv = rows[pivot_row].coeff[pivot_col];
            const std::vector<std::size_t> victims(col_rows[pivot_col].begin(),
                                                   col_rows[pivot_col].end());
            for (std::size_t i : victims) {
                if (i == pivot_row) continue;
                detail::IntRow& row = rows[i];
                const Integer v = row.coeff[pivot_col];
                for (auto& [c, val] : row.coeff) val *= piv;
                for (const auto& [c, pval] : rows[pivot_row].coeff) {
                    auto [it, inserted] = row.coeff.try_emplace(c, 0);
                    it->second -= v * pval;
                    if (inserted && it->second != 0) col_rows[c].insert(i);
                }
                row.rhs = piv * row.rhs - v * rows[pivot_row].rhs;
                for (auto it = row.coeff.begin(); it != row.coeff.end();) {
                    if (it->second == 0) {
                        col_rows[it->first].erase(i);
                        it = row.coeff.erase(it);
                    } else {
                        ++it;
                    }
                }
                row.normalize_content();
            }

            for (const auto& [c, v] : rows[pivot_row].coeff) col_rows[c].erase(pivot_row);
            pivots.emplace_back(pivot_row, pivot_col);
        }
    }

    // the pivot rows form a triangular system under the pivot order
    RationalVector x(n, Rational(0));
    for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
        const auto [p, c] = *it;
        Rational acc = Rational(rows[p].rhs);
        for (const auto& [col, coef] : rows[p].coeff)
            if (col != c) acc -= Rational(coef) * x[col];
        x[c] = acc / Rational(rows[p].coeff[c]);
    }
    return x;
}

}  // namespace covertime
