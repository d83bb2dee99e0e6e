#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace elicit {

// Seeded generator whose whole state is (seed, draw counter), so it survives
// snapshots and event replay as two integers. Each draw seeds a fresh
// mt19937_64 from a mix of the pair.
class SeededRng {
public:
    SeededRng() = default;
    explicit SeededRng(std::uint64_t seed, std::uint64_t draws = 0) : seed_(seed), draws_(draws) {}

    std::uint64_t next() {
        std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                          static_cast<std::uint32_t>(draws_), static_cast<std::uint32_t>(draws_ >> 32)};
        ++draws_;
        std::mt19937_64 engine(seq);
        return engine();
    }

    // Uniform in [0, bound). bound must be positive.
    std::size_t below(std::size_t bound) {
        const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
        std::uint64_t x = next();
        while (x >= limit) x = next();
        return static_cast<std::size_t>(x % bound);
    }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t draws() const noexcept { return draws_; }

    friend bool operator==(const SeededRng&, const SeededRng&) = default;

private:
    std::uint64_t seed_ = 0;
    std::uint64_t draws_ = 0;
};

} // namespace elicit
