#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "pursuit/power_optimizer.hpp"
#include "pursuit/random.hpp"
#include "pursuit/simulator.hpp"

namespace pursuit {

struct StrategySolution {
    TransitionStrategy strategy;
    PowerProfile profile;  // incumbent optimized powers, full length
    double fitness = 0.0;
    RiderOrder order;
};

struct SearchConfig {
    int outer_budget = 100;  // candidate evaluations (cache hits included)
    CmaConfig inner;
    std::uint64_t seed = 1;
    int max_hl = 3;
    bool exhaustive = false;  // RLS: ignore the budget, stop at neighbourhood exhaustion
};

// Evaluates a candidate strategy given the incumbent's power profile as the
// inner optimiser's starting point; returns (race time, optimized profile).
// Tests inject mock evaluators here.
using StrategyEvaluator = std::function<std::pair<double, PowerProfile>(
    const TransitionStrategy&, const PowerProfile& incumbent_profile, std::uint64_t seed)>;

// The bilevel fitness: one whole CMA-ES run over the candidate's live power
// entries, seeded from the incumbent profile (positional transfer; entries
// that become live keep whatever the full-length vector carries).
inline std::pair<double, PowerProfile> bilevel_fitness(const TransitionStrategy& strategy,
                                                       const RiderOrder& order,
                                                       const PowerProfile& incumbent_profile,
                                                       const RaceConfig& config,
                                                       const CmaConfig& inner) {
    const PowerOptResult r = optimize_powers_cmaes(strategy, order, incumbent_profile, config, inner);
    return {r.best_fitness, r.best_profile};
}

inline StrategyEvaluator make_bilevel_evaluator(const RiderOrder& order, const RaceConfig& config,
                                                const CmaConfig& inner) {
    return [order, &config, inner](const TransitionStrategy& strategy,
                                   const PowerProfile& incumbent, std::uint64_t seed) {
        CmaConfig run = inner;
        run.seed = seed;
        return bilevel_fitness(strategy, order, incumbent, config, run);
    };
}

// All strategies reachable by +-1 on one live entry, kept within [1, max_hl].
inline std::vector<TransitionStrategy> neighbors(const TransitionStrategy& strategy, int max_hl) {
    const int live = effective_length(strategy);
    std::vector<TransitionStrategy> out;
    for (int i = 0; i < live; ++i) {
        for (int delta : {-1, +1}) {
            const int v = strategy.hl[static_cast<std::size_t>(i)] + delta;
            if (v < 1 || v > max_hl) continue;
            TransitionStrategy neighbor = strategy;
            neighbor.hl[static_cast<std::size_t>(i)] = v;
            out.push_back(std::move(neighbor));
        }
    }
    return out;
}

// Each live entry mutates independently with probability 1/m to a uniformly
// random different value in [1, max_hl]; one change expected per offspring.
inline TransitionStrategy mutate(const TransitionStrategy& strategy, int max_hl, Rng& rng) {
    const int live = effective_length(strategy);
    TransitionStrategy offspring = strategy;
    for (int i = 0; i < live; ++i) {
        if (rng.uniform01() >= 1.0 / live) continue;
        const int old = offspring.hl[static_cast<std::size_t>(i)];
        int value = rng.uniform_int(1, max_hl - 1);
        if (value >= old) ++value;  // skip the previous value
        offspring.hl[static_cast<std::size_t>(i)] = value;
    }
    return offspring;
}

inline TransitionStrategy random_strategy(int units, int max_hl, Rng& rng) {
    TransitionStrategy strategy;
    strategy.hl.resize(static_cast<std::size_t>(units));
    for (int& v : strategy.hl) v = rng.uniform_int(1, max_hl);
    return strategy;
}

namespace detail {

// Memoises (live strategy prefix -> evaluation) within one search run; a
// repeat candidate reuses the cached time and profile instead of re-running
// the inner optimiser. Budget accounting still charges every consideration.
class EvaluationCache {
  public:
    std::pair<double, PowerProfile> evaluate(const TransitionStrategy& strategy,
                                             const PowerProfile& incumbent, std::uint64_t seed,
                                             const StrategyEvaluator& evaluator) {
        std::vector<int> key(strategy.hl.begin(),
                             strategy.hl.begin() + effective_length(strategy));
        if (const auto it = cache_.find(key); it != cache_.end()) return it->second;
        auto result = evaluator(strategy, incumbent, seed);
        cache_.emplace(std::move(key), result);
        return result;
    }

  private:
    std::map<std::vector<int>, std::pair<double, PowerProfile>> cache_;
};

inline constexpr int kExhaustiveConsiderationCap = 1000000;

}  // namespace detail

// Random local search: visit the incumbent's neighbours in seeded random
// order; accept the first one that is no worse and restart the neighbourhood
// from it. Stops when a whole neighbourhood is exhausted without acceptance
// or when the evaluation budget runs out.
inline StrategySolution rls(StrategySolution start, const SearchConfig& search,
                            const StrategyEvaluator& evaluator) {
    Rng rng(search.seed);
    detail::EvaluationCache cache;
    StrategySolution incumbent = std::move(start);

    int considered = 0;
    const auto budget_left = [&] {
        if (search.exhaustive) return considered < detail::kExhaustiveConsiderationCap;
        return considered < search.outer_budget;
    };

    bool exhausted = false;
    while (!exhausted && budget_left()) {
        std::vector<TransitionStrategy> unseen = neighbors(incumbent.strategy, search.max_hl);
        rng.shuffle(unseen);
        exhausted = true;
        for (const TransitionStrategy& candidate : unseen) {
            if (!budget_left()) {
                exhausted = false;
                break;
            }
            ++considered;
            auto [fitness, profile] =
                cache.evaluate(candidate, incumbent.profile, rng.next_u64(), evaluator);
            if (fitness <= incumbent.fitness) {
                incumbent.strategy = candidate;
                incumbent.profile = std::move(profile);
                incumbent.fitness = fitness;
                exhausted = false;
                break;  // neighbourhood resets around the new incumbent
            }
        }
    }
    return incumbent;
}

// (1+1) EA over strategies: mutate, evaluate with the incumbent profile as
// the inner starting point, accept when no worse.
inline StrategySolution simple_ea(StrategySolution start, const SearchConfig& search,
                                  const StrategyEvaluator& evaluator) {
    Rng rng(search.seed);
    detail::EvaluationCache cache;
    StrategySolution incumbent = std::move(start);

    for (int generation = 0; generation < search.outer_budget; ++generation) {
        const TransitionStrategy offspring = mutate(incumbent.strategy, search.max_hl, rng);
        auto [fitness, profile] =
            cache.evaluate(offspring, incumbent.profile, rng.next_u64(), evaluator);
        if (fitness <= incumbent.fitness) {
            incumbent.strategy = offspring;
            incumbent.profile = std::move(profile);
            incumbent.fitness = fitness;
        }
    }
    return incumbent;
}

// Convenience overloads running against the real race model.
inline StrategySolution rls(StrategySolution start, const RaceConfig& config,
                            const SearchConfig& search) {
    const RiderOrder order = start.order;
    return rls(std::move(start), search, make_bilevel_evaluator(order, config, search.inner));
}

inline StrategySolution simple_ea(StrategySolution start, const RaceConfig& config,
                                  const SearchConfig& search) {
    const RiderOrder order = start.order;
    return simple_ea(std::move(start), search, make_bilevel_evaluator(order, config, search.inner));
}

// Builds and evaluates a search start point (fresh 400 W profile incumbent).
inline StrategySolution make_start_solution(TransitionStrategy strategy, const RiderOrder& order,
                                            const RaceConfig& config, const CmaConfig& inner,
                                            std::uint64_t seed) {
    StrategySolution start;
    start.order = order;
    start.strategy = std::move(strategy);
    const PowerProfile fresh =
        uniform_profile(static_cast<int>(start.strategy.hl.size()), kFreshProfileWatts);
    CmaConfig run = inner;
    run.seed = seed;
    auto [fitness, profile] = bilevel_fitness(start.strategy, order, fresh, config, run);
    start.fitness = fitness;
    start.profile = std::move(profile);
    return start;
}

}  // namespace pursuit
