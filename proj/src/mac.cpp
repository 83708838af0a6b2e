#include "nmext/mac.hpp"

#include <string>

#include "nmext/extractor.hpp"

namespace nmext::mac {

using field::FpVector;

MacParams::MacParams(int t_, int L_) : t(t_), L(L_) {
    if (t < 1) throw DomainError("MacParams: t must be >= 1");
    if (L < 1) throw DomainError("MacParams: L must be >= 1");
    if (t > 16) throw DomainError("MacParams: t too large for packed tags");
}

MacKey mac_key_derive(u64 z, int t) {
    if (t < 1 || t > 16) throw DomainError("mac_key_derive: t out of range");
    u64 zp = z & ((u64{1} << (2 * t)) - 1); // z mod 2^{2t}
    return MacKey{zp & ((u64{1} << t) - 1), zp >> t};
}

namespace {

void check_block(const MacParams& P, u64 b, const char* what) {
    if (b >> P.t)
        throw DomainError(std::string("mac: ") + what + " exceeds " +
                          std::to_string(P.t) + " bits");
}

} // namespace

u64 mac_tag(const MacParams& P, const MacKey& key, const std::vector<u64>& blocks) {
    if (blocks.size() != static_cast<std::size_t>(P.L))
        throw DomainError("mac_tag: expected " + std::to_string(P.L) + " blocks, got " +
                          std::to_string(blocks.size()));
    check_block(P, key.k1, "k1");
    check_block(P, key.k2, "k2");
    for (u64 b : blocks) check_block(P, b, "message block");

    const auto& F = field::canonical_field(2, P.t);
    FpVector k1 = ext::bits_to_vector(P.t, key.k1);
    // Horner over F_{2^t}: acc = (...((m_L) k1 + m_{L-1}) k1 ...) k1, then + k2,
    // which expands to k2 + sum_i m_i k1^i.
    FpVector acc = field::vec_zero(2, static_cast<std::size_t>(P.t));
    for (int i = P.L - 1; i >= 0; --i) {
        FpVector mi = ext::bits_to_vector(P.t, blocks[static_cast<std::size_t>(i)]);
        acc = field::ext_mul(F, field::ext_add(F, acc, mi), k1);
    }
    acc = field::ext_add(F, acc, ext::bits_to_vector(P.t, key.k2));
    return ext::vector_to_bits(acc);
}

bool mac_verify(const MacParams& P, const MacKey& key, const std::vector<u64>& blocks,
                u64 tag) {
    check_block(P, tag, "tag");
    return mac_tag(P, key, blocks) == tag;
}

std::vector<u64> split_blocks(const MacParams& P, u64 message_bits) {
    if (P.d() < 64 && (message_bits >> P.d()) != 0)
        throw DomainError("split_blocks: message exceeds " + std::to_string(P.d()) +
                          " bits");
    std::vector<u64> blocks(static_cast<std::size_t>(P.L));
    const u64 mask = (u64{1} << P.t) - 1;
    for (int i = 0; i < P.L; ++i)
        blocks[static_cast<std::size_t>(i)] = (message_bits >> (i * P.t)) & mask;
    return blocks;
}

Rat mac_forgery_advantage(const MacParams& P) {
    if (P.t > 4 || P.L > 2)
        throw ResourceError("mac_forgery_advantage: enumeration over 2^{2t} keys x 2^d "
                            "messages too large (t=" +
                            std::to_string(P.t) + ", L=" + std::to_string(P.L) + ")");

    const u64 keys = P.key_space();     // <= 256
    const u64 msgs = u64{1} << P.d();   // <= 256
    const u64 tags = P.tag_space();     // <= 16

    // tag table over (message, key)
    std::vector<std::vector<u64>> tag_of(msgs, std::vector<u64>(keys));
    for (u64 m = 0; m < msgs; ++m) {
        auto blocks = split_blocks(P, m);
        for (u64 k = 0; k < keys; ++k)
            tag_of[m][k] = mac_tag(P, mac_key_derive(k, P.t), blocks);
    }

    // key sets K[m][s] = { k : tag(k, m) = s } as 256-bit masks
    struct Mask {
        u64 w[4] = {0, 0, 0, 0};
        void set(u64 k) { w[k >> 6] |= u64{1} << (k & 63); }
        static u64 overlap(const Mask& a, const Mask& b) {
            u64 c = 0;
            for (int i = 0; i < 4; ++i)
                c += static_cast<u64>(__builtin_popcountll(a.w[i] & b.w[i]));
            return c;
        }
    };
    std::vector<std::vector<Mask>> keyset(msgs, std::vector<Mask>(tags));
    for (u64 m = 0; m < msgs; ++m)
        for (u64 k = 0; k < keys; ++k) keyset[m][tag_of[m][k]].set(k);

    // best deterministic response per observed (m, s): any (m', s') with
    // m' != m maximizing |K[m][s] ∩ K[m'][s']|
    u64 best_wins = 0;
    for (u64 m = 0; m < msgs; ++m) {
        u64 wins_m = 0;
        for (u64 s = 0; s < tags; ++s) {
            u64 best = 0;
            for (u64 mp = 0; mp < msgs; ++mp) {
                if (mp == m) continue;
                for (u64 sp = 0; sp < tags; ++sp) {
                    u64 c = Mask::overlap(keyset[m][s], keyset[mp][sp]);
                    if (c > best) best = c;
                }
            }
            wins_m += best;
        }
        if (wins_m > best_wins) best_wins = wins_m;
    }
    return rat_u64(best_wins, keys);
}

} // namespace nmext::mac
