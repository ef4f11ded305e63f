#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace dpht {

// Counter-based uniform stream (Philox4x32-10). The output for a given
// (seed, stream_id) is a pure function of the draw index, so results do not
// depend on platform or on how work is split across threads.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
        : seed_(seed), stream_id_(stream_id) {}

    // Every draw returns `u`. Used to pin noise (u = 0.5 gives zero Laplace
    // noise) and to fix tie-break orderings in checks.
    static RandomStream pinned(double u) noexcept;

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

    // Independent child stream; same (tag, index) always yields the same child.
    RandomStream derive(std::uint64_t tag, std::uint64_t index = 0) const noexcept;
    RandomStream derive(std::string_view tag, std::uint64_t index = 0) const noexcept;

    // Uniform on the open interval (0, 1).
    double uniform() noexcept;
    // Uniform integer in [0, bound), bound > 0.
    std::uint64_t below(std::uint64_t bound) noexcept;
    double normal() noexcept;
    double normal(double mean, double sd) noexcept { return mean + sd * normal(); }

private:
    std::uint64_t next64() noexcept;

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int available_ = 0;  // unread 32-bit words left in block_
    std::optional<double> spare_normal_;
    std::optional<double> pinned_;
};

std::uint64_t hash_tag(std::string_view tag) noexcept;

}  // namespace dpht
