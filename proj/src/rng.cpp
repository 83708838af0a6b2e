#include "nmext/rng.hpp"

#include <cmath>
#include <numbers>

namespace nmext {

namespace {

// splitmix64 (Steele/Lea/Flood); full-period, well mixed, trivially portable.
std::uint64_t splitmix_step(std::uint64_t& s) {
    s += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

} // namespace

RngStream::RngStream(std::uint64_t master, std::string_view role, std::uint64_t trial)
    : state_(master) {
    splitmix_step(state_); // decorrelate adjacent master seeds
    state_ ^= fnv1a(role);
    splitmix_step(state_);
    state_ ^= trial;
    splitmix_step(state_);
}

std::uint64_t RngStream::next_u64() {
    ++draws_;
    return splitmix_step(state_);
}

std::uint64_t RngStream::below(std::uint64_t n) {
    if (n == 0) throw DomainError("RngStream::below: n must be >= 1");
    if (n == 1) return 0;
    // rejection below the largest multiple of n to stay unbiased
    const std::uint64_t bound = (~0ull / n) * n;
    for (;;) {
        std::uint64_t r = next_u64();
        if (r < bound) return r % n;
    }
}

double RngStream::unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // u1 in (0,1] so the log is finite
    double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    double u2 = unit();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

} // namespace nmext
