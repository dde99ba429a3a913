#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "pursuit/cmaes.hpp"
#include "pursuit/random.hpp"
#include "pursuit/simulator.hpp"

namespace pursuit {

struct CmaConfig {
    double initial_sigma_w = 10.0;
    int max_evaluations = 2000;
    int population_size = 0;  // 0 -> CMA-ES default for the live dimension
    std::uint64_t seed = 1;
};

struct PowerOptResult {
    PowerProfile best_profile;
    double best_fitness = 0.0;
    int evaluations_used = 0;
};

inline PowerProfile uniform_profile(int units, double watts) {
    PowerProfile profile;
    profile.p.assign(static_cast<std::size_t>(units), watts);
    return profile;
}

// Default starting point when a transition strategy has no power incumbent
// yet: a constant 400 W sits in the feasible constant-power regime.
inline constexpr double kFreshProfileWatts = 400.0;

namespace detail {

inline PowerProfile with_live_entries(const PowerProfile& base, std::span<const double> live) {
    PowerProfile out = base;
    std::copy(live.begin(), live.end(), out.p.begin());
    return out;
}

}  // namespace detail

// Optimises the live prefix of the power profile for a fixed strategy and
// order with CMA-ES started at init_profile. The baseline evaluation of
// init_profile is free; evaluations_used counts sampled candidates only.
// Reporting is elitist: the result never ranks worse than init_profile.
inline PowerOptResult optimize_powers_cmaes(const TransitionStrategy& strategy,
                                            const RiderOrder& order,
                                            const PowerProfile& init_profile,
                                            const RaceConfig& config, const CmaConfig& cma) {
    if (strategy.hl.size() != init_profile.p.size()) {
        throw std::invalid_argument("strategy and power profile must have the same length");
    }
    const int live = effective_length(strategy);

    PowerOptResult result;
    result.best_profile = init_profile;
    result.best_fitness = penalized_fitness(strategy, init_profile, order, config);
    if (cma.max_evaluations <= 0) return result;

    const auto objective = [&](std::span<const double> x) {
        return penalized_fitness(strategy, detail::with_live_entries(init_profile, x), order, config);
    };

    CmaesOptions options;
    options.initial_sigma = cma.initial_sigma_w;
    options.max_evaluations = cma.max_evaluations;
    options.population_size = cma.population_size;
    options.seed = cma.seed;

    const std::span<const double> start(init_profile.p.data(), static_cast<std::size_t>(live));
    const CmaesResult inner = cmaes_minimize(start, options, objective);

    result.evaluations_used = inner.evaluations;
    if (inner.best_f < result.best_fitness) {
        result.best_fitness = inner.best_f;
        result.best_profile = detail::with_live_entries(init_profile, inner.best_x);
    }
    return result;
}

// Baseline comparator: perturb all live entries with uniform noise in
// [-step, step], keep the candidate when it is no worse.
inline PowerOptResult optimize_powers_random(const TransitionStrategy& strategy,
                                             const RiderOrder& order,
                                             const PowerProfile& init_profile,
                                             const RaceConfig& config, int budget, double step_w,
                                             std::uint64_t seed) {
    if (strategy.hl.size() != init_profile.p.size()) {
        throw std::invalid_argument("strategy and power profile must have the same length");
    }
    const int live = effective_length(strategy);

    PowerOptResult result;
    result.best_profile = init_profile;
    result.best_fitness = penalized_fitness(strategy, init_profile, order, config);

    Rng rng(seed);
    PowerProfile candidate = init_profile;
    for (int i = 0; i < budget; ++i) {
        for (int j = 0; j < live; ++j) {
            candidate.p[static_cast<std::size_t>(j)] =
                result.best_profile.p[static_cast<std::size_t>(j)] + rng.uniform(-step_w, step_w);
        }
        const double f = penalized_fitness(strategy, candidate, order, config);
        ++result.evaluations_used;
        if (f <= result.best_fitness) {
            result.best_fitness = f;
            result.best_profile = candidate;
        }
    }
    return result;
}

enum class UnoptimisedKind { high_start, constant };

// The two reference profiles: a 900 W opening effort dropping to 364 W, and
// a flat 409 W ride.
inline PowerProfile unoptimised_profile(UnoptimisedKind kind, const RaceConfig& config) {
    const int units = atomic_unit_count(config.geometry);
    if (kind == UnoptimisedKind::high_start) {
        PowerProfile profile = uniform_profile(units, 364.0);
        profile.p[0] = 900.0;
        return profile;
    }
    return uniform_profile(units, 409.0);
}

enum class AllocationMode { high_start, even };

// Greedy reference allocator: drains the riders' budgets by tuning a
// period-three power pattern (one slot per rider in the rotation),
// coordinate-wise with a halving step, keeping every final energy
// non-negative while minimising their sum. high_start pins the opening
// segment at 900 W; even applies the pattern from the start.
inline PowerProfile iterative_power_allocation(const TransitionStrategy& strategy,
                                               const RiderOrder& order, AllocationMode mode,
                                               const RaceConfig& config) {
    const int units = static_cast<int>(strategy.hl.size());
    const bool fixed_first = mode == AllocationMode::high_start;

    const auto build = [&](const std::array<double, 3>& pattern) {
        PowerProfile profile = uniform_profile(units, 0.0);
        for (int i = 0; i < units; ++i) {
            if (fixed_first && i == 0) {
                profile.p[0] = 900.0;
            } else {
                const int slot = (fixed_first ? i - 1 : i) % 3;
                profile.p[static_cast<std::size_t>(i)] = pattern[static_cast<std::size_t>(slot)];
            }
        }
        return profile;
    };

    // sum of final energies if feasible, +inf otherwise
    const auto score = [&](const std::array<double, 3>& pattern) {
        for (double p : pattern) {
            if (p < config.power_min_w || p > config.power_max_w)
                return std::numeric_limits<double>::infinity();
        }
        const RaceResult r = simulate(strategy, build(pattern), order, config, false);
        if (!r.feasible) return std::numeric_limits<double>::infinity();
        return r.final_energies_j[0] + r.final_energies_j[1] + r.final_energies_j[2];
    };

    std::array<double, 3> pattern{300.0, 300.0, 300.0};
    double current = score(pattern);
    for (double step = 128.0; step >= 0.125; step /= 2.0) {
        bool improved = true;
        while (improved) {
            improved = false;
            for (std::size_t c = 0; c < 3; ++c) {
                for (double delta : {step, -step}) {
                    std::array<double, 3> trial = pattern;
                    trial[c] += delta;
                    const double s = score(trial);
                    if (s < current) {
                        pattern = trial;
                        current = s;
                        improved = true;
                    }
                }
            }
        }
    }
    return build(pattern);
}

}  // namespace pursuit
