#include "nmext/extractor.hpp"

#include <cmath>
#include <map>
#include <string>

namespace nmext::ext {

using field::check_vector;
using field::FieldSpec;

NmExtParams::NmExtParams(i64 p, int n_) : f(p), n(n_) {
    if (p == 2) throw DomainError("NmExtParams: p must be an odd prime");
    if (n < 2 || n % 2 != 0) throw DomainError("NmExtParams: n must be even and >= 2");
}

double NmExtParams::threshold_bits(double eps) const {
    double logp = std::log2(static_cast<double>(f.p));
    return (n / 2.0 + 6.0) * logp - 1.0 + 4.0 * std::log2(1.0 / eps);
}

double NmExtParams::source_bits() const {
    return n * std::log2(static_cast<double>(f.p));
}

FpVector encode_seed(const NmExtParams& P, const FpVector& y) {
    check_vector(y, P.f.p, static_cast<std::size_t>(P.half()));
    return field::concat(y, field::vec_square(P.f.p, y));
}

i64 nmext_eval(const NmExtParams& P, const FpVector& x, const FpVector& y) {
    check_vector(x, P.f.p, static_cast<std::size_t>(P.n));
    return field::inner_product(x, encode_seed(P, y));
}

FpVector g_a_eval(const NmExtParams& P, i64 a, const FpVector& y, const FpVector& yp) {
    field::fp_check(P.f, a);
    if (a == 0) throw DomainError("g_a_eval: a must be nonzero");
    check_vector(y, P.f.p, static_cast<std::size_t>(P.half()));
    check_vector(yp, P.f.p, static_cast<std::size_t>(P.half()));
    FpVector head = field::vec_add(y, field::vec_scale(a, yp));
    FpVector tail = field::vec_add(field::vec_square(P.f.p, y),
                                   field::vec_scale(a, field::vec_square(P.f.p, yp)));
    return field::concat(head, tail);
}

int g_a_max_preimages(const NmExtParams& P, i64 a) {
    double seeds_d = std::pow(static_cast<double>(P.f.p), P.half());
    if (seeds_d > static_cast<double>(1 << 14))
        throw ResourceError("g_a_max_preimages: p^{n/2} (p=" + std::to_string(P.f.p) +
                            ", n=" + std::to_string(P.n) + ") exceeds 2^14 seeds");
    u64 seeds = static_cast<u64>(seeds_d + 0.5);

    std::map<std::vector<i64>, int> counts;
    int best = 0;
    for (u64 yi = 0; yi < seeds; ++yi) {
        FpVector y = field::index_to_vector(P.f.p, static_cast<std::size_t>(P.half()), yi);
        for (u64 ypi = 0; ypi < seeds; ++ypi) {
            if (ypi == yi) continue;
            FpVector yp =
                field::index_to_vector(P.f.p, static_cast<std::size_t>(P.half()), ypi);
            FpVector z = g_a_eval(P, a, y, yp);
            int c = ++counts[z.coeffs];
            if (c > best) best = c;
        }
    }
    return best;
}

StrongExtParams::StrongExtParams(int n_, int v_, int m_) : n(n_), v(v_), m(m_) {
    if (n < 2 || n % 2 != 0) throw DomainError("StrongExtParams: n must be even and >= 2");
    if (v < 0 || m < 0 || m > n / 2 || v + m > n / 2)
        throw DomainError("StrongExtParams: need 0 <= v, 0 <= m <= n/2, v + m <= n/2");
}

FpVector strong_ext_eval(const StrongExtParams& P, const FpVector& x1,
                         const FpVector& x2, const FpVector& y) {
    const auto& F = field::canonical_field(2, P.half());
    check_vector(x1, 2, static_cast<std::size_t>(P.half()));
    check_vector(x2, 2, static_cast<std::size_t>(P.half()));
    check_vector(y, 2, static_cast<std::size_t>(P.half()));
    return field::ext_add(F, field::ext_mul(F, y, x1), x2);
}

FpVector bits_to_vector(int len, u64 bits) {
    if (len < 0 || len > 63) throw DomainError("bits_to_vector: length out of range");
    if (len < 64 && (bits >> len) != 0)
        throw DomainError("bits_to_vector: value does not fit in " + std::to_string(len) +
                          " bits");
    FpVector v{2, std::vector<i64>(static_cast<std::size_t>(len))};
    for (int i = 0; i < len; ++i) v.coeffs[static_cast<std::size_t>(i)] = (bits >> i) & 1;
    return v;
}

u64 vector_to_bits(const FpVector& v) {
    check_vector(v, 2, v.coeffs.size());
    if (v.coeffs.size() > 63) throw DomainError("vector_to_bits: vector too long");
    u64 bits = 0;
    for (std::size_t i = 0; i < v.coeffs.size(); ++i)
        bits |= static_cast<u64>(v.coeffs[i]) << i;
    return bits;
}

u64 take_bits(const FpVector& z, int offset, int count) {
    check_vector(z, 2, z.coeffs.size());
    if (offset < 0 || count < 0 ||
        static_cast<std::size_t>(offset + count) > z.coeffs.size())
        throw DomainError("take_bits: range outside vector");
    u64 bits = 0;
    for (int i = 0; i < count; ++i)
        bits |= static_cast<u64>(z.coeffs[static_cast<std::size_t>(offset + i)]) << i;
    return bits;
}

} // namespace nmext::ext
