#pragma once

#include <cstdint>

#include "nmext/field.hpp"

namespace nmext::ext {

using field::FpVector;
using field::i64;
using u64 = std::uint64_t;

// ============================================================================
// Inner-product non-malleable extractor: nmExt(x, y) = <x, y || y^2> over F_p
// ============================================================================

// p an odd prime, n even: x has n symbols, y has n/2, output is one symbol.
struct NmExtParams {
    field::FieldSpec f;
    int n;

    NmExtParams(i64 p, int n_);
    int half() const { return n / 2; }

    // entropy threshold k = (n/2 + 6) log2 p - 1 + 4 log2(1/eps) of the
    // underlying theorem; vacuous (exceeds n log2 p) at desk scale, so it is
    // reported next to measurements rather than gated on.
    double threshold_bits(double eps) const;
    double source_bits() const; // n * log2 p
};

// y || y^2, the seed encoding (square taken in the canonical F_{p^{n/2}})
FpVector encode_seed(const NmExtParams& P, const FpVector& y);

// <x, y || y^2>
i64 nmext_eval(const NmExtParams& P, const FpVector& x, const FpVector& y);

// g_a(y, y') = (y + a y') || (y^2 + a y'^2), a != 0. The algebraic bridge:
// <x, g_a(y,y')> = nmExt(x,y) + a nmExt(x,y').
FpVector g_a_eval(const NmExtParams& P, i64 a, const FpVector& y, const FpVector& yp);

// max over z of #{(y, y') : y != y', g_a(y,y') = z}, by exhaustive
// enumeration; the collision lemma asserts the result is <= 2.
// ResourceError when p^{n/2} > 2^14.
int g_a_max_preimages(const NmExtParams& P, i64 a);

// ============================================================================
// Universal-hash strong extractor over F_{2^{n/2}}: z = y*x1 + x2
// ============================================================================

// n = even bit length of the source (x1, x2); the first v bits of z are the
// transmitted tag, the next m bits the extracted key.
struct StrongExtParams {
    int n;
    int v;
    int m;

    StrongExtParams(int n_, int v_, int m_);
    int half() const { return n / 2; }
};

// full hash output, a bit vector of length n/2 (constant term first)
FpVector strong_ext_eval(const StrongExtParams& P, const FpVector& x1,
                         const FpVector& x2, const FpVector& y);

// packed-bit helpers (bit 0 <-> coefficient 0)
FpVector bits_to_vector(int len, u64 bits);
u64 vector_to_bits(const FpVector& v);
// coefficients [offset, offset+count) of z packed LSB-first
u64 take_bits(const FpVector& z, int offset, int count);

} // namespace nmext::ext
