#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "nmext/errors.hpp"

namespace nmext::field {

using i64 = std::int64_t;

// ============================================================================
// Prime field F_p
// ============================================================================

// Prime modulus, validated at construction by deterministic trial division.
// p < 2^16 so every coefficient fits the canonical uint16 serialization.
struct FieldSpec {
    i64 p;
    explicit FieldSpec(i64 p_);
};

bool is_prime(i64 m);

// Scalar arithmetic. Operands must already be reduced to [0, p); an
// out-of-range value is a caller bug and throws DomainError rather than
// being silently reduced.
i64 fp_check(const FieldSpec& f, i64 a);
i64 fp_add(const FieldSpec& f, i64 a, i64 b);
i64 fp_sub(const FieldSpec& f, i64 a, i64 b);
i64 fp_mul(const FieldSpec& f, i64 a, i64 b);
i64 fp_neg(const FieldSpec& f, i64 a);
i64 fp_inv(const FieldSpec& f, i64 a); // DivisionByZero on a == 0
i64 fp_pow(const FieldSpec& f, i64 a, std::uint64_t e);

// ============================================================================
// Vectors over F_p
// ============================================================================

// Coefficient vector; index 0 is the constant / lowest-order position in
// every context (field representatives, serialization, bit packing).
struct FpVector {
    i64 p = 0;
    std::vector<i64> coeffs;

    bool operator==(const FpVector&) const = default;
};

// Validating constructor; length optionally pinned.
FpVector make_vector(i64 p, std::vector<i64> coeffs);
void check_vector(const FpVector& v, i64 p, std::size_t expected_len);

FpVector vec_add(const FpVector& a, const FpVector& b);
FpVector vec_scale(i64 c, const FpVector& a);
FpVector vec_zero(i64 p, std::size_t n);
FpVector concat(const FpVector& a, const FpVector& b);

// <x, y> = sum_i x_i y_i mod p
i64 inner_product(const FpVector& x, const FpVector& y);

// Mixed-radix index: v <-> sum_i v_i p^i with coefficient 0 least significant.
std::uint64_t vector_index(const FpVector& v);
FpVector index_to_vector(i64 p, std::size_t n, std::uint64_t index);

// Canonical wire form: uint16 LE count, then one uint16 LE per coefficient,
// constant term first.
std::vector<std::uint8_t> serialize(const FpVector& v);
FpVector deserialize(i64 p, const std::vector<std::uint8_t>& bytes, std::size_t& offset);

// ============================================================================
// Extension field F_{p^k}
// ============================================================================

// F_{p^k} = F_p[x] / (irreducible), with the canonical (lexicographically
// smallest, constant-term-first) monic irreducible so that independent
// implementations of this rule compute identical coefficient vectors.
struct ExtFieldSpec {
    FieldSpec base;
    int k;
    std::vector<i64> irreducible; // length k+1, monic: irreducible[k] == 1
};

// Exhaustive scan in lexicographic order (constant term most significant in
// the comparison). ResourceError when p^k > 2^20.
std::vector<i64> find_irreducible(const FieldSpec& f, int k);

// Builds (and memoizes) the canonical field for (p, k).
const ExtFieldSpec& canonical_field(i64 p, int k);

FpVector ext_add(const ExtFieldSpec& F, const FpVector& a, const FpVector& b);
FpVector ext_mul(const ExtFieldSpec& F, const FpVector& a, const FpVector& b);
FpVector ext_one(const ExtFieldSpec& F);

// phi-transported squaring: view y in F_{p^k} via the canonical field,
// square there, return the coefficient vector. k is the length of y.
FpVector vec_square(i64 p, const FpVector& y);

} // namespace nmext::field
