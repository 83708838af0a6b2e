#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace nmext {

// Exact rational scalar for every path that promises exact arithmetic
// (statistical distances on classical states, forgery advantages, exhaustive
// experiment tallies). GMP does the heavy lifting; this header only smooths
// construction and printing.
using Rat = mpq_class;

inline Rat rat(long num, long den = 1) {
    Rat q(num, den);
    q.canonicalize();
    return q;
}

inline Rat rat_u64(std::uint64_t num, std::uint64_t den = 1) {
    Rat q;
    mpz_class n, d;
    mpz_import(n.get_mpz_t(), 1, -1, sizeof(num), 0, 0, &num);
    mpz_import(d.get_mpz_t(), 1, -1, sizeof(den), 0, 0, &den);
    q = Rat(n) / Rat(d);
    return q;
}

// 2^e as an exact rational (e may be 0)
inline Rat rat_pow2(unsigned e) {
    mpz_class z = 1;
    z <<= e;
    return Rat(z);
}

// p^e exact
inline Rat rat_pow(long base, unsigned e) {
    mpz_class z;
    mpz_ui_pow_ui(z.get_mpz_t(), static_cast<unsigned long>(base), e);
    return Rat(z);
}

inline Rat rat_abs(const Rat& q) { return q < 0 ? Rat(-q) : q; }

// "num/den" (or "num" when the denominator is 1); stable across reruns
inline std::string rat_str(const Rat& q) { return q.get_str(); }

inline double rat_double(const Rat& q) { return q.get_d(); }

} // namespace nmext
