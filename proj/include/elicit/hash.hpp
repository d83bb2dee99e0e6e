#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace elicit {

// 64-bit FNV-1a. Stable across platforms and runs; used for mock outputs,
// audit logging (prompt hashes) and state fingerprints. Not cryptographic.
class StableHash {
public:
    static constexpr std::uint64_t kOffset = 0xcbf29ce484222325ULL;
    static constexpr std::uint64_t kPrime = 0x100000001b3ULL;

    StableHash& add(std::string_view bytes) noexcept {
        for (unsigned char c : bytes) {
            state_ ^= c;
            state_ *= kPrime;
        }
        return *this;
    }

    StableHash& add(std::uint64_t value) noexcept {
        for (int i = 0; i < 8; ++i) {
            state_ ^= static_cast<unsigned char>(value >> (8 * i));
            state_ *= kPrime;
        }
        return *this;
    }

    std::uint64_t value() const noexcept { return state_; }

private:
    std::uint64_t state_ = kOffset;
};

inline std::uint64_t stable_hash(std::string_view bytes) noexcept {
    return StableHash{}.add(bytes).value();
}

std::string to_hex(std::uint64_t value);

} // namespace elicit
