#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <stdexcept>
#include <string>
#include <vector>

namespace pursuit {

struct TrackGeometry {
    double lap_length_m = 250.0;
    int laps = 12;

    double race_distance_m() const { return lap_length_m * laps; }
    double half_lap_length_m() const { return lap_length_m / 2.0; }
    int half_laps() const { return 2 * laps; }

    void validate() const {
        if (lap_length_m <= 0.0) throw std::invalid_argument("lap length must be positive");
        if (laps < 2) throw std::invalid_argument("track must have at least 2 laps");
    }
};

// Number of atomic race units: the first and last 1.5 half-laps are
// indivisible (no transitions), every other unit is one half-lap. With n
// half-laps that is n - 2*1.5 + 2 = n - 1 units, which is also the decision
// vector length (transitions are capped at one per unit boundary).
inline int atomic_unit_count(const TrackGeometry& geometry) {
    const int n = geometry.half_laps();
    if (n < 4) throw std::invalid_argument("race needs at least 4 half-laps");
    return n - 1;
}

// Half-lap counts each leader rides before the next transition. Stored at
// full length (one entry per atomic unit); only the first effective_length()
// entries are live, the rest is filler every consumer ignores.
struct TransitionStrategy {
    std::vector<int> hl;

    void validate(int max_hl) const {
        for (int v : hl) {
            if (v < 1 || v > max_hl) throw std::invalid_argument("transition strategy entry out of [1, max_hl]");
        }
    }
};

// Commanded power of the lead rider per segment, W. Stored at full length
// like the strategy; feasibility of the values is the fitness function's
// business, not the type's.
struct PowerProfile {
    std::vector<double> p;
};

// Smallest m whose prefix covers all atomic units.
inline int effective_length(const TransitionStrategy& strategy) {
    const int units = static_cast<int>(strategy.hl.size());
    int covered = 0;
    for (int i = 0; i < units; ++i) {
        covered += strategy.hl[static_cast<std::size_t>(i)];
        if (covered >= units) return i + 1;
    }
    return units;
}

// Segment lengths in metres. Groups the atomic units by the live strategy
// entries; the last group is truncated so the total is exactly the race
// distance. Units 1 and n-1 span 1.5 half-laps, all others one half-lap.
inline std::vector<double> segment_distances(const TransitionStrategy& strategy,
                                             const TrackGeometry& geometry) {
    const int units = atomic_unit_count(geometry);
    if (static_cast<int>(strategy.hl.size()) != units) {
        throw std::invalid_argument("strategy length does not match atomic unit count");
    }
    const double half_lap = geometry.half_lap_length_m();
    std::vector<double> segments;
    int consumed = 0;
    for (int entry : strategy.hl) {
        double d = 0.0;
        const int take = std::min(entry, units - consumed);
        for (int u = consumed; u < consumed + take; ++u) {
            d += (u == 0 || u == units - 1) ? 1.5 * half_lap : half_lap;
        }
        segments.push_back(d);
        consumed += take;
        if (consumed >= units) break;
    }
    return segments;
}

enum class Rider : int { A = 0, B = 1, C = 2 };

inline char rider_label(Rider r) { return static_cast<char>('A' + static_cast<int>(r)); }

struct RiderOrder {
    std::array<Rider, 3> order{Rider::A, Rider::B, Rider::C};

    Rider& operator[](std::size_t pos) { return order[pos]; }
    Rider operator[](std::size_t pos) const { return order[pos]; }
    bool operator==(const RiderOrder&) const = default;

    std::string label() const {
        return {rider_label(order[0]), rider_label(order[1]), rider_label(order[2])};
    }

    void validate() const {
        int seen = 0;
        for (Rider r : order) seen |= 1 << static_cast<int>(r);
        if (seen != 0b111) throw std::invalid_argument("rider order must be a permutation of A, B, C");
    }
};

inline RiderOrder parse_rider_order(const std::string& text) {
    if (text.size() != 3) throw std::invalid_argument("rider order must name three riders, e.g. ABC");
    RiderOrder order;
    for (std::size_t i = 0; i < 3; ++i) {
        const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(text[i])));
        if (c < 'A' || c > 'C') throw std::invalid_argument("rider order may only contain A, B, C");
        order[i] = static_cast<Rider>(c - 'A');
    }
    order.validate();
    return order;
}

inline std::array<RiderOrder, 6> all_rider_orders() {
    std::array<RiderOrder, 6> out;
    const char* names[] = {"ABC", "ACB", "BAC", "BCA", "CAB", "CBA"};
    for (std::size_t i = 0; i < 6; ++i) out[i] = parse_rider_order(names[i]);
    return out;
}

// Transition: leader peels off and rejoins at the rear.
inline RiderOrder rotate(const RiderOrder& order) {
    return RiderOrder{{order[1], order[2], order[0]}};
}

// The strategy observed in championship racing: lead the opening 0.75 laps,
// then swap every full lap. Padded with unit filler entries.
inline TransitionStrategy standard_strategy(const TrackGeometry& geometry) {
    const int units = atomic_unit_count(geometry);
    TransitionStrategy strategy;
    strategy.hl.assign(static_cast<std::size_t>(units), 1);
    int covered = 1;  // the opening atomic unit
    std::size_t i = 1;
    while (covered < units && i < strategy.hl.size()) {
        const int take = std::min(2, units - covered);
        strategy.hl[i++] = take;
        covered += take;
    }
    return strategy;
}

}  // namespace pursuit
