#pragma once

#include <cstdint>
#include <vector>

#include "nmext/field.hpp"
#include "nmext/rational.hpp"

namespace nmext::mac {

using u64 = std::uint64_t;

// One-time polynomial-evaluation MAC over F_{2^t}:
//   tag(k1, k2; m_1..m_L) = k2 + sum_{i=1..L} m_i * k1^i.
// Message blocks and tags are elements of F_{2^t} packed as t-bit integers,
// constant term in bit 0.
struct MacParams {
    int t; // tag bits
    int L; // message blocks

    MacParams(int t_, int L_);
    int d() const { return t * L; } // message bit length
    u64 tag_space() const { return u64{1} << t; }
    u64 key_space() const { return u64{1} << (2 * t); }
};

struct MacKey {
    u64 k1 = 0, k2 = 0; // each < 2^t

    bool operator==(const MacKey&) const = default;
};

// Key-source value -> (k1, k2): z mod 2^{2t}, low t bits then high t bits.
// When the key source is not a multiple of 2^{2t} the reduction is biased;
// callers surface that in their reports instead of hiding it here.
MacKey mac_key_derive(u64 z, int t);

u64 mac_tag(const MacParams& P, const MacKey& key, const std::vector<u64>& blocks);
bool mac_verify(const MacParams& P, const MacKey& key, const std::vector<u64>& blocks,
                u64 tag);

// d = L*t message bits -> L blocks, lowest t bits = block 1
std::vector<u64> split_blocks(const MacParams& P, u64 message_bits);

// Exact advantage of the best deterministic one-time forger: it sees
// (m, tag(k, m)) for a uniform key k and outputs (m', tag') with m' != m.
// Exhaustive over keys, messages and responses; the polynomial-difference
// argument bounds the result by L * 2^{-t}.
// ResourceError when t > 4 or L > 2.
Rat mac_forgery_advantage(const MacParams& P);

} // namespace nmext::mac
