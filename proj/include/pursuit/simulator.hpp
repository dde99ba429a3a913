#pragma once

#include <array>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pursuit/encoding.hpp"
#include "pursuit/physics.hpp"

namespace pursuit {

// Additive fitness terms for constraint violations. The base penalty must
// dominate any feasible race time so infeasible candidates always rank below
// feasible ones.
struct PenaltyConfig {
    double base_penalty_s = 1000.0;
    double energy_deficit_weight_s_per_j = 1.0;
    double power_violation_weight_s_per_w = 1.0;

    void validate() const {
        if (base_penalty_s < 0.0 || energy_deficit_weight_s_per_j < 0.0 || power_violation_weight_s_per_w < 0.0)
            throw std::invalid_argument("penalty weights must be non-negative");
    }
};

struct RaceConfig {
    Environment environment;
    std::array<RiderParams, 3> riders{};  // indexed by Rider::A/B/C
    BikeParams bike;
    ModelConstants constants;
    TrackGeometry geometry;
    int max_hl = 3;
    double power_min_w = 100.0;
    double power_max_w = 1000.0;
    double transition_time_s = 0.12;
    PenaltyConfig penalty;

    const RiderParams& rider(Rider r) const { return riders[static_cast<std::size_t>(static_cast<int>(r))]; }

    void validate() const {
        for (const auto& r : riders) r.validate();
        bike.validate();
        constants.validate();
        geometry.validate();
        penalty.validate();
        if (max_hl < 1) throw std::invalid_argument("max half-laps before transition must be at least 1");
        if (power_min_w >= power_max_w) throw std::invalid_argument("power_min must be below power_max");
        if (transition_time_s < 0.0) throw std::invalid_argument("transition time must be non-negative");
    }
};

// Table-of-race-characteristics defaults: 3000 m over 12 laps, riders
// A/B/C at 70/67.5/65 kg with CdA 0.190/0.175/0.160, energy budget
// mass * 5 * 210 J, 8 kg bikes, drafting coefficients 0.7/0.6.
inline RaceConfig default_race_config() {
    RaceConfig config;
    config.riders[0] = RiderParams{70.0, 0.190, 70.0 * 5.0 * 210.0};
    config.riders[1] = RiderParams{67.5, 0.175, 67.5 * 5.0 * 210.0};
    config.riders[2] = RiderParams{65.0, 0.160, 65.0 * 5.0 * 210.0};
    return config;
}

struct TraceSample {
    double time_s = 0.0;
    double distance_m = 0.0;
    double velocity_ms = 0.0;
    Rider leader = Rider::A;
    double commanded_power_w = 0.0;
    std::array<double, 3> rider_powers_w{};    // expenditure per rider A/B/C this step
    std::array<double, 3> rider_energies_j{};  // remaining budget per rider A/B/C
};

struct RaceResult {
    double total_time_s = 0.0;
    std::array<double, 3> final_energies_j{};
    bool feasible = false;
    std::vector<TraceSample> trace;
};

namespace detail {

// A race that cannot finish (commanded power too low to keep moving) is cut
// off here and flagged infeasible.
inline constexpr double kMaxRaceTimeS = 3600.0;

}  // namespace detail

// Forward-integrates the race (Algorithm: per segment, fixed commanded power,
// dt steps of the lead rider's kinetic-energy balance; followers pay whatever
// power keeps them on the leader's velocity trajectory; transitions cost a
// fixed time with state otherwise unchanged).
//
// Per step the distance advances by mean velocity * dt. When a step would
// overshoot the segment boundary, the partial duration is remaining distance
// over that mean velocity, and the exit velocity is interpolated linearly in
// time. Negative follower power (hard deceleration while drafting) spends no
// energy: budgets are expenditure-only.
//
// Runs to the finish line even after a rider's budget goes negative; the
// result is then flagged infeasible but remains comparable.
inline RaceResult simulate(const TransitionStrategy& strategy, const PowerProfile& profile,
                           const RiderOrder& order, const RaceConfig& config,
                           bool record_trace = true) {
    if (strategy.hl.size() != profile.p.size()) {
        throw std::invalid_argument("strategy and power profile must have the same length");
    }
    order.validate();

    const std::vector<double> segments = segment_distances(strategy, config.geometry);
    const Environment& env = config.environment;
    const ModelConstants& k = config.constants;
    const double dt = k.dt_s;

    std::array<double, 3> energies{};
    for (std::size_t r = 0; r < 3; ++r) energies[r] = config.riders[r].available_energy_j;

    RiderOrder current = order;
    double velocity = 0.0;
    double total_time = 0.0;
    RaceResult result;

    if (record_trace) {
        result.trace.push_back(TraceSample{0.0, 0.0, 0.0, current[0], profile.p[0], {}, energies});
    }

    bool timed_out = false;
    double distance_total = 0.0;

    for (std::size_t seg = 0; seg < segments.size(); ++seg) {
        const double segment_length = segments[seg];
        const double commanded = profile.p[seg];
        const Rider leader = current[0];
        const RiderParams& lead = config.rider(leader);
        const double lead_mass = lead.mass_kg + config.bike.mass_kg;

        double covered = 0.0;
        double segment_time = 0.0;

        while (covered < segment_length) {
            const double v_entry = velocity;
            const double dke = lead_delta_ke(commanded, v_entry, lead, config.bike, env, k);
            const double v_full = step_velocity(v_entry, dke, lead_mass);
            const double v_mean = 0.5 * (v_entry + v_full);
            const double full_step_d = v_mean * dt;

            double step_duration = dt;
            double step_distance = full_step_d;
            double v_exit = v_full;

            const bool final_step = covered + full_step_d >= segment_length || v_mean <= 0.0;
            if (final_step) {
                if (v_mean <= 0.0) {
                    timed_out = true;  // stalled, cannot cover remaining distance
                    break;
                }
                step_distance = segment_length - covered;
                step_duration = step_distance / v_mean;
                v_exit = v_entry + (v_full - v_entry) * (step_duration / dt);
            }

            std::array<double, 3> step_powers{};
            step_powers[static_cast<std::size_t>(leader)] = commanded > 0.0 ? commanded : 0.0;

            ModelConstants step_k = k;
            step_k.dt_s = step_duration;
            for (std::size_t pos = 1; pos < 3; ++pos) {
                const Rider who = current[pos];
                const RiderParams& rider = config.rider(who);
                const double follower_mass = rider.mass_kg + config.bike.mass_kg;
                const double dke_follow = 0.5 * follower_mass * (v_exit * v_exit - v_entry * v_entry);
                const double draft = pos == 1 ? k.draft_coeff_second : k.draft_coeff_third;
                const double raw = follower_power(dke_follow, v_entry, rider, config.bike, draft, env, step_k);
                const double spent = raw > 0.0 ? raw : 0.0;
                energies[static_cast<std::size_t>(who)] -= spent * step_duration;
                step_powers[static_cast<std::size_t>(who)] = spent;
            }

            covered = final_step ? segment_length : covered + step_distance;
            segment_time += step_duration;
            velocity = v_exit;

            if (record_trace) {
                std::array<double, 3> snapshot = energies;
                // leader drain is booked per segment; show the pro-rata share
                snapshot[static_cast<std::size_t>(leader)] -=
                    (commanded > 0.0 ? commanded : 0.0) * segment_time;
                result.trace.push_back(TraceSample{total_time + segment_time, distance_total + covered,
                                                   velocity, leader, commanded, step_powers, snapshot});
            }
            if (total_time + segment_time > detail::kMaxRaceTimeS) {
                timed_out = true;
                break;
            }
        }

        energies[static_cast<std::size_t>(leader)] -= (commanded > 0.0 ? commanded : 0.0) * segment_time;
        total_time += segment_time;
        distance_total += covered;
        if (timed_out) break;

        if (seg + 1 < segments.size()) {
            total_time += config.transition_time_s;
            current = rotate(current);
        }
    }

    result.total_time_s = total_time;
    result.final_energies_j = energies;
    result.feasible = !timed_out && energies[0] >= 0.0 && energies[1] >= 0.0 && energies[2] >= 0.0;
    return result;
}

// Race time if feasible and all live powers are in bounds; otherwise time
// plus a base penalty plus weighted energy-deficit and power-bound-violation
// terms, so infeasible candidates stay comparable and the penalty shrinks
// smoothly as violations shrink.
inline double penalized_fitness(const TransitionStrategy& strategy, const PowerProfile& profile,
                                const RiderOrder& order, const RaceConfig& config) {
    const RaceResult result = simulate(strategy, profile, order, config, /*record_trace=*/false);

    const int live = effective_length(strategy);
    double power_violation = 0.0;
    for (int i = 0; i < live; ++i) {
        const double p = profile.p[static_cast<std::size_t>(i)];
        if (p > config.power_max_w) power_violation += p - config.power_max_w;
        if (p < config.power_min_w) power_violation += config.power_min_w - p;
    }
    double energy_deficit = 0.0;
    for (double e : result.final_energies_j) {
        if (e < 0.0) energy_deficit -= e;
    }

    if (result.feasible && power_violation == 0.0) {
        return result.total_time_s;
    }
    return result.total_time_s + config.penalty.base_penalty_s +
           config.penalty.energy_deficit_weight_s_per_j * energy_deficit +
           config.penalty.power_violation_weight_s_per_w * power_violation;
}

inline const char* velocity_trace_csv_header() {
    return "time_s,distance_m,velocity_ms,leader,commanded_power_w,p1_w,p2_w,p3_w,e1_j,e2_j,e3_j";
}

// One row per integration step; p1/e1 .. p3/e3 are keyed by rider identity
// (A, B, C), not by current position.
inline std::string velocity_trace_csv(const RaceResult& result) {
    if (result.trace.empty()) {
        throw std::invalid_argument("race result carries no trace");
    }
    std::ostringstream out;
    out << velocity_trace_csv_header() << '\n';
    char line[256];
    for (const TraceSample& s : result.trace) {
        std::snprintf(line, sizeof line, "%.6f,%.6f,%.6f,%c,%.3f,%.3f,%.3f,%.3f,%.3f,%.3f,%.3f\n",
                      s.time_s, s.distance_m, s.velocity_ms, rider_label(s.leader),
                      s.commanded_power_w, s.rider_powers_w[0], s.rider_powers_w[1],
                      s.rider_powers_w[2], s.rider_energies_j[0], s.rider_energies_j[1],
                      s.rider_energies_j[2]);
        out << line;
    }
    return out.str();
}

}  // namespace pursuit
