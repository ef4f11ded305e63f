#include "dpht/random.hpp"

#include <cmath>
#include <numbers>

namespace dpht {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t hash_tag(std::string_view tag) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (const char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    return h;
}

RandomStream RandomStream::pinned(double u) noexcept {
    RandomStream s(0, 0);
    s.pinned_ = u;
    return s;
}

RandomStream RandomStream::derive(std::uint64_t tag, std::uint64_t index) const noexcept {
    RandomStream child(seed_, splitmix64(splitmix64(stream_id_ ^ splitmix64(tag)) + index));
    child.pinned_ = pinned_;
    return child;
}

RandomStream RandomStream::derive(std::string_view tag, std::uint64_t index) const noexcept {
    return derive(hash_tag(tag), index);
}

std::uint64_t RandomStream::next64() noexcept {
    if (available_ < 2) {
        const std::array<std::uint32_t, 4> ctr = {
            static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
            static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)};
        block_ = philox4x32_10(ctr, {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
        ++counter_;
        available_ = 4;
    }
    const std::size_t at = 4 - static_cast<std::size_t>(available_);
    available_ -= 2;
    return (static_cast<std::uint64_t>(block_[at]) << 32) | block_[at + 1];
}

double RandomStream::uniform() noexcept {
    if (pinned_) return *pinned_;
    // 53 random bits, shifted half a step so neither endpoint is reachable.
    return (static_cast<double>(next64() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t RandomStream::below(std::uint64_t bound) noexcept {
    if (pinned_) {
        const auto k = static_cast<std::uint64_t>(*pinned_ * static_cast<double>(bound));
        return k < bound ? k : bound - 1;
    }
    // Lemire's nearly-divisionless rejection.
    __extension__ using u128 = unsigned __int128;
    u128 m = static_cast<u128>(next64()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            m = static_cast<u128>(next64()) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

double RandomStream::normal() noexcept {
    if (spare_normal_) {
        const double z = *spare_normal_;
        spare_normal_.reset();
        return z;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_normal_ = radius * std::sin(angle);
    return radius * std::cos(angle);
}

}  // namespace dpht
