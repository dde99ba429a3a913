#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace pursuit {

// Stateless 64-bit mixer (splitmix64). Used to derive independent stream
// seeds from (base_seed, order index, repetition index) so that any single
// run of an experiment is reproducible in isolation.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// mt19937_64 with hand-rolled distributions. The engine's output sequence is
// fixed by the standard; std::*_distribution is not, so sampling here stays
// bit-identical across compilers.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    std::uint64_t next_u64() { return engine_(); }

    // in [0, 1), 53-bit resolution
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // inclusive bounds, rejection-sampled (no modulo bias)
    int uniform_int(int lo, int hi) {
        const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return lo + static_cast<int>(v % range);
    }

    // standard normal, Marsaglia polar method
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    // Fisher-Yates
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (int i = static_cast<int>(items.size()) - 1; i > 0; --i) {
            std::swap(items[static_cast<std::size_t>(i)],
                      items[static_cast<std::size_t>(uniform_int(0, i))]);
        }
    }

    // fork an independent stream, advancing this one
    Rng spawn() { return Rng(engine_()); }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

inline std::uint64_t derive_seed(std::uint64_t base_seed, int order_index, int repetition) {
    // two mixing rounds keep the (order, repetition) grid decorrelated
    const std::uint64_t a = splitmix64(base_seed ^ (0x632be59bd9b4e019ull * static_cast<std::uint64_t>(order_index + 1)));
    return splitmix64(a ^ (0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(repetition + 1)));
}

}  // namespace pursuit
