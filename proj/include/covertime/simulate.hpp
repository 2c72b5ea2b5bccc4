#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include "covertime/aux_chain.hpp"
#include "covertime/chain.hpp"

namespace covertime {

struct SimConfig {
    std::uint64_t trials = 10'000;
    std::uint64_t seed = 0;
    std::uint64_t max_steps = 1'000'000;  // truncation guard per trial
};

struct SimSummary {
    std::uint64_t samples;    // trials run
    double mean;              // over non-truncated trials only
    double std_error;
    std::uint64_t truncated;  // trials that hit max_steps before stopping
};

namespace detail {

inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Small splittable generator: each trial derives its own stream from
// (seed, trial index), so results do not depend on how trials are
// partitioned across threads.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

inline SplitMix64 trial_rng(std::uint64_t seed, std::uint64_t trial) {
    return SplitMix64(mix64(mix64(seed) + trial));
}

// Double-precision cumulative transition tables, built once per chain. The
// sampler is an oracle only; exact answers come from the rational engine.
class TransitionSampler {
public:
    explicit TransitionSampler(const MarkovChain& chain) : rows_(chain.size()) {
        for (StateId s = 0; s < chain.size(); ++s) {
            Rational cumulative = 0;
            for (const auto& t : chain.row(s)) {
                cumulative += t.prob;
                rows_[s].push_back({static_cast<double>(cumulative), t.to});
            }
            rows_[s].back().first = 1.0;  // guard against rounding at the top
        }
    }

    StateId step(StateId from, double u) const {
        const auto& row = rows_[from];
        for (const auto& [cum, to] : row)
            if (u < cum) return to;
        return row.back().second;
    }

private:
    std::vector<std::vector<std::pair<double, StateId>>> rows_;
};

// Mergeable mean/variance accumulation; merging in fixed chunk order keeps
// summaries deterministic for any thread count.
struct Accumulator {
    std::uint64_t count = 0;
    std::uint64_t truncated = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++count;
        const double delta = x - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (x - mean);
    }

    void merge(const Accumulator& other) {
        truncated += other.truncated;
        if (other.count == 0) return;
        if (count == 0) {
            count = other.count;
            mean = other.mean;
            m2 = other.m2;
            return;
        }
        const double delta = other.mean - mean;
        const auto total = count + other.count;
        m2 += other.m2 + delta * delta * static_cast<double>(count) *
                             static_cast<double>(other.count) / static_cast<double>(total);
        mean += delta * static_cast<double>(other.count) / static_cast<double>(total);
        count = total;
    }
};

// Runs cfg.trials independent trials; `trial` returns the observed stopping
// time or nullopt when the trial hit max_steps. Trials are split into fixed
// chunks processed by a small thread pool and merged in chunk order.
template <typename Trial>
SimSummary run_trials(const SimConfig& cfg, Trial&& trial) {
    if (cfg.trials < 1) throw InternalError("trials must be at least 1");
    if (cfg.max_steps < 1) throw InternalError("max_steps must be at least 1");

    const std::uint64_t chunks = std::min<std::uint64_t>(64, cfg.trials);
    std::vector<Accumulator> partial(chunks);
    auto run_chunk = [&](std::uint64_t c) {
        const std::uint64_t lo = cfg.trials * c / chunks;
        const std::uint64_t hi = cfg.trials * (c + 1) / chunks;
        for (std::uint64_t t = lo; t < hi; ++t) {
            SplitMix64 rng = trial_rng(cfg.seed, t);
            if (const auto steps = trial(rng))
                partial[c].add(static_cast<double>(*steps));
            else
                partial[c].truncated += 1;
        }
    };

    const unsigned hardware = std::max(1u, std::thread::hardware_concurrency());
    const auto workers = static_cast<unsigned>(
        std::min<std::uint64_t>({hardware, chunks, cfg.trials / 4096 + 1}));
    if (workers <= 1) {
        for (std::uint64_t c = 0; c < chunks; ++c) run_chunk(c);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::uint64_t c = next.fetch_add(1); c < chunks; c = next.fetch_add(1))
                    run_chunk(c);
            });
        for (auto& worker : pool) worker.join();
    }

    Accumulator total;
    for (const auto& chunk : partial) total.merge(chunk);
    if (total.count == 0) throw AllTrialsTruncated(cfg.max_steps);

    const double std_error =
        total.count >= 2 ? std::sqrt(total.m2 / (static_cast<double>(total.count - 1) *
                                                 static_cast<double>(total.count)))
                         : 0.0;
    return SimSummary{cfg.trials, total.mean, std_error, total.truncated};
}

}  // namespace detail

// Monte Carlo estimate of the k-walk cover time from `start`.
inline SimSummary simulate_cover(const MarkovChain& chain, std::size_t k, const WalkVector& start,
                                 const SimConfig& cfg) {
    if (k < 1 || start.size() != k)
        throw DimensionMismatch("start vector must hold exactly k positions");
    const std::size_t n = chain.size();
    for (StateId p : start)
        if (p >= n) throw UnknownStateLabel("state index " + std::to_string(p));

    const detail::TransitionSampler sampler(chain);
    return detail::run_trials(cfg, [&](detail::SplitMix64& rng) -> std::optional<std::uint64_t> {
        StateSet visited(n);
        std::size_t covered = 0;
        WalkVector positions = start;
        for (StateId p : positions)
            if (!visited.test(p)) {
                visited.set(p);
                ++covered;
            }
        if (covered == n) return 0;
        for (std::uint64_t step = 1; step <= cfg.max_steps; ++step) {
            for (auto& p : positions) {
                p = sampler.step(p, rng.next_double());
                if (!visited.test(p)) {
                    visited.set(p);
                    ++covered;
                }
            }
            if (covered == n) return step;
        }
        return std::nullopt;
    });
}

// Monte Carlo estimate of the expected hitting time of `targets` from `start`.
inline SimSummary simulate_hitting(const MarkovChain& chain, StateId start,
                                   const StateSet& targets, const SimConfig& cfg) {
    if (targets.empty()) throw EmptyTargetSet();
    if (start >= chain.size()) throw UnknownStateLabel("state index " + std::to_string(start));

    const detail::TransitionSampler sampler(chain);
    return detail::run_trials(cfg, [&](detail::SplitMix64& rng) -> std::optional<std::uint64_t> {
        if (targets.test(start)) return 0;
        StateId position = start;
        for (std::uint64_t step = 1; step <= cfg.max_steps; ++step) {
            position = sampler.step(position, rng.next_double());
            if (targets.test(position)) return step;
        }
        return std::nullopt;
    });
}

// One k-walk trajectory together with its image in the auxiliary chain: the
// auxiliary state at time t carries the walk positions plus everything
// visited so far. Each step is checked against the auxiliary kernel, so the
// two sequences stay probability-consistent move by move.
struct CoupledTrajectories {
    std::vector<WalkVector> walk;
    std::vector<AuxState> aux;
};

inline CoupledTrajectories coupled_trajectories(const MarkovChain& chain, std::size_t k,
                                                const WalkVector& start, std::uint64_t seed,
                                                std::uint64_t horizon) {
    if (k < 1 || start.size() != k)
        throw DimensionMismatch("start vector must hold exactly k positions");
    if (horizon < 1) throw InternalError("horizon must be at least 1");
    const std::size_t n = chain.size();
    for (StateId p : start)
        if (p >= n) throw UnknownStateLabel("state index " + std::to_string(p));

    const detail::TransitionSampler sampler(chain);
    detail::SplitMix64 rng = detail::trial_rng(seed, 0);

    CoupledTrajectories result;
    result.walk.reserve(horizon + 1);
    result.aux.reserve(horizon + 1);

    StateSet visited(n);
    for (StateId p : start) visited.set(p);
    result.walk.push_back(start);
    result.aux.push_back(AuxState{start, visited});

    for (std::uint64_t t = 0; t < horizon; ++t) {
        const WalkVector& current = result.walk.back();
        WalkVector next(k);
        Rational step_prob = 1;
        for (std::size_t j = 0; j < k; ++j) {
            next[j] = sampler.step(current[j], rng.next_double());
            step_prob *= chain.prob(current[j], next[j]);
            visited.set(next[j]);
        }
        AuxState aux_next{next, visited};
        if (aux_kernel(chain, result.aux.back(), aux_next) != step_prob || step_prob == 0)
            throw InternalError("coupled step disagrees with the auxiliary kernel");
        result.walk.push_back(std::move(next));
        result.aux.push_back(std::move(aux_next));
    }
    return result;
}

}  // namespace covertime
