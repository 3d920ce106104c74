#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "fashionx/hash.hpp"

namespace fashionx {

// Seeded RNG with hand-rolled bounded sampling and shuffling so that
// corpora are byte-identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, n). Rejection sampling to avoid modulo bias.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(below(n)); }

    bool coin() { return (engine_() & 1u) != 0; }

    // Bernoulli with probability p of true.
    bool chance(double p) { return uniform() < p; }

    double uniform() {
        return static_cast<double>(engine_() >> 11) * (1.0 / 9007199254740992.0);
    }

    template <typename T>
    const T& pick(const std::vector<T>& items) {
        if (items.empty()) throw std::invalid_argument("Rng::pick: empty list");
        return items[index(items.size())];
    }

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[index(i)]);
        }
    }

    // Derived generator for a named sub-stream.
    Rng child(std::string_view tag) const { return Rng(fnv1a64(tag, seed_ ^ 0x6a09e667f3bcc909ull)); }
    Rng child(std::uint64_t tag) const { return Rng(seed_ ^ (tag * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull)); }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
};

}  // namespace fashionx
