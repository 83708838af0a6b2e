#pragma once

#include <cstdint>
#include <string_view>

#include "nmext/errors.hpp"

namespace nmext {

// Deterministic random stream, independent of platform and of the standard
// library's (implementation-defined) distributions. Streams are derived by
// hashing (master seed, role tag, trial index), so every protocol role and
// every sweep case draws from its own reproducible sequence and reruns are
// byte-identical.
class RngStream {
public:
    RngStream(std::uint64_t master, std::string_view role, std::uint64_t trial = 0);

    std::uint64_t next_u64();

    // Unbiased draw in [0, n) by rejection sampling; n >= 1.
    std::uint64_t below(std::uint64_t n);

    // 53-bit mantissa double in [0, 1).
    double unit();

    // Standard normal via Box-Muller (std::normal_distribution is not
    // portable across library implementations).
    double gaussian();

    std::uint64_t draws() const { return draws_; }

private:
    std::uint64_t state_;
    std::uint64_t draws_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace nmext
