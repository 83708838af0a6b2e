#include "nmext/field.hpp"

#include <map>
#include <mutex>
#include <string>
#include <utility>

namespace nmext::field {

namespace {

std::string istr(i64 v) { return std::to_string(v); }

} // namespace

// ---------------------------------------------------------------------------
// F_p scalars
// ---------------------------------------------------------------------------

bool is_prime(i64 m) {
    if (m < 2) return false;
    for (i64 d = 2; d * d <= m; ++d)
        if (m % d == 0) return false;
    return true;
}

FieldSpec::FieldSpec(i64 p_) : p(p_) {
    if (p < 2 || p >= (1 << 16))
        throw DomainError("FieldSpec: modulus " + istr(p) + " out of range [2, 2^16)");
    if (!is_prime(p))
        throw DomainError("FieldSpec: modulus " + istr(p) + " is not prime");
}

i64 fp_check(const FieldSpec& f, i64 a) {
    if (a < 0 || a >= f.p)
        throw DomainError("F_" + istr(f.p) + ": element " + istr(a) + " not reduced");
    return a;
}

i64 fp_add(const FieldSpec& f, i64 a, i64 b) {
    return (fp_check(f, a) + fp_check(f, b)) % f.p;
}

i64 fp_sub(const FieldSpec& f, i64 a, i64 b) {
    return (fp_check(f, a) - fp_check(f, b) + f.p) % f.p;
}

i64 fp_mul(const FieldSpec& f, i64 a, i64 b) {
    return (fp_check(f, a) * fp_check(f, b)) % f.p; // p < 2^16 ⇒ no overflow
}

i64 fp_neg(const FieldSpec& f, i64 a) {
    return (f.p - fp_check(f, a)) % f.p;
}

i64 fp_inv(const FieldSpec& f, i64 a) {
    fp_check(f, a);
    if (a == 0) throw DivisionByZero("F_" + istr(f.p) + ": inverse of zero");
    // extended Euclid
    i64 r0 = f.p, r1 = a, s0 = 0, s1 = 1;
    while (r1 != 0) {
        i64 q = r0 / r1;
        r0 -= q * r1;
        std::swap(r0, r1);
        s0 -= q * s1;
        std::swap(s0, s1);
    }
    return ((s0 % f.p) + f.p) % f.p;
}

i64 fp_pow(const FieldSpec& f, i64 a, std::uint64_t e) {
    fp_check(f, a);
    i64 acc = 1, base = a;
    while (e) {
        if (e & 1) acc = (acc * base) % f.p;
        base = (base * base) % f.p;
        e >>= 1;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Vectors
// ---------------------------------------------------------------------------

FpVector make_vector(i64 p, std::vector<i64> coeffs) {
    FieldSpec f(p);
    for (i64 c : coeffs) fp_check(f, c);
    return FpVector{p, std::move(coeffs)};
}

void check_vector(const FpVector& v, i64 p, std::size_t expected_len) {
    if (v.p != p)
        throw DomainError("FpVector: modulus mismatch (" + istr(v.p) + " vs " + istr(p) + ")");
    if (v.coeffs.size() != expected_len)
        throw DomainError("FpVector: length " + istr(static_cast<i64>(v.coeffs.size())) +
                          ", expected " + istr(static_cast<i64>(expected_len)));
    FieldSpec f(p);
    for (i64 c : v.coeffs) fp_check(f, c);
}

FpVector vec_add(const FpVector& a, const FpVector& b) {
    check_vector(b, a.p, a.coeffs.size());
    FieldSpec f(a.p);
    FpVector out{a.p, std::vector<i64>(a.coeffs.size())};
    for (std::size_t i = 0; i < a.coeffs.size(); ++i)
        out.coeffs[i] = fp_add(f, a.coeffs[i], b.coeffs[i]);
    return out;
}

FpVector vec_scale(i64 c, const FpVector& a) {
    FieldSpec f(a.p);
    fp_check(f, c);
    FpVector out{a.p, std::vector<i64>(a.coeffs.size())};
    for (std::size_t i = 0; i < a.coeffs.size(); ++i)
        out.coeffs[i] = fp_mul(f, c, a.coeffs[i]);
    return out;
}

FpVector vec_zero(i64 p, std::size_t n) {
    FieldSpec f(p);
    return FpVector{p, std::vector<i64>(n, 0)};
}

FpVector concat(const FpVector& a, const FpVector& b) {
    if (a.p != b.p) throw DomainError("concat: modulus mismatch");
    FpVector out = a;
    out.coeffs.insert(out.coeffs.end(), b.coeffs.begin(), b.coeffs.end());
    return out;
}

i64 inner_product(const FpVector& x, const FpVector& y) {
    check_vector(y, x.p, x.coeffs.size());
    FieldSpec f(x.p);
    i64 acc = 0;
    for (std::size_t i = 0; i < x.coeffs.size(); ++i)
        acc = (acc + fp_mul(f, x.coeffs[i], y.coeffs[i])) % f.p;
    return acc;
}

std::uint64_t vector_index(const FpVector& v) {
    std::uint64_t idx = 0, place = 1;
    for (i64 c : v.coeffs) {
        idx += static_cast<std::uint64_t>(c) * place;
        place *= static_cast<std::uint64_t>(v.p);
    }
    return idx;
}

FpVector index_to_vector(i64 p, std::size_t n, std::uint64_t index) {
    FieldSpec f(p);
    FpVector v{p, std::vector<i64>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        v.coeffs[i] = static_cast<i64>(index % static_cast<std::uint64_t>(p));
        index /= static_cast<std::uint64_t>(p);
    }
    if (index != 0)
        throw DomainError("index_to_vector: index exceeds p^n");
    return v;
}

std::vector<std::uint8_t> serialize(const FpVector& v) {
    check_vector(v, v.p, v.coeffs.size());
    if (v.coeffs.size() >= (1u << 16))
        throw DomainError("serialize: vector too long for uint16 length prefix");
    std::vector<std::uint8_t> out;
    auto push16 = [&out](std::uint16_t w) {
        out.push_back(static_cast<std::uint8_t>(w & 0xFF));
        out.push_back(static_cast<std::uint8_t>(w >> 8));
    };
    push16(static_cast<std::uint16_t>(v.coeffs.size()));
    for (i64 c : v.coeffs) push16(static_cast<std::uint16_t>(c));
    return out;
}

FpVector deserialize(i64 p, const std::vector<std::uint8_t>& bytes, std::size_t& offset) {
    auto take16 = [&bytes, &offset]() -> std::uint16_t {
        if (offset + 2 > bytes.size())
            throw DomainError("deserialize: truncated FpVector");
        std::uint16_t w = static_cast<std::uint16_t>(bytes[offset] |
                                                     (bytes[offset + 1] << 8));
        offset += 2;
        return w;
    };
    std::uint16_t len = take16();
    std::vector<i64> coeffs(len);
    for (std::uint16_t i = 0; i < len; ++i) coeffs[i] = take16();
    return make_vector(p, std::move(coeffs));
}

// ---------------------------------------------------------------------------
// Extension fields
// ---------------------------------------------------------------------------

namespace {

// polynomial helpers on raw coefficient sequences (constant term first,
// trailing high-order zeros allowed)

int poly_deg(const std::vector<i64>& a) {
    for (int i = static_cast<int>(a.size()) - 1; i >= 0; --i)
        if (a[i] != 0) return i;
    return -1;
}

std::vector<i64> poly_mul(const FieldSpec& f, const std::vector<i64>& a,
                          const std::vector<i64>& b) {
    std::vector<i64> out(a.size() + b.size(), 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j)
            out[i + j] = (out[i + j] + a[i] * b[j]) % f.p;
    }
    return out;
}

// remainder of a modulo monic m
std::vector<i64> poly_mod(const FieldSpec& f, std::vector<i64> a,
                          const std::vector<i64>& m) {
    int dm = poly_deg(m);
    for (int i = poly_deg(a); i >= dm; --i) {
        i64 c = a[i];
        if (c == 0) continue;
        for (int j = 0; j <= dm; ++j)
            a[i - dm + j] = ((a[i - dm + j] - c * m[j]) % f.p + f.p) % f.p;
    }
    a.resize(static_cast<std::size_t>(dm));
    return a;
}

i64 poly_eval(const FieldSpec& f, const std::vector<i64>& a, i64 x) {
    i64 acc = 0;
    for (int i = poly_deg(a); i >= 0; --i) acc = (acc * x + a[i]) % f.p;
    return acc;
}

bool poly_is_zero(const std::vector<i64>& a) { return poly_deg(a) < 0; }

// irreducibility by root scan + trial division over monic divisors of
// degree 2..k/2 (desk scale: p^k <= 2^20 guaranteed by the caller)
bool poly_is_irreducible(const FieldSpec& f, const std::vector<i64>& m) {
    int k = poly_deg(m);
    if (k == 1) return true;
    for (i64 x = 0; x < f.p; ++x)
        if (poly_eval(f, m, x) == 0) return false;
    for (int d = 2; 2 * d <= k; ++d) {
        std::uint64_t count = 1;
        for (int i = 0; i < d; ++i) count *= static_cast<std::uint64_t>(f.p);
        for (std::uint64_t t = 0; t < count; ++t) {
            std::vector<i64> div(static_cast<std::size_t>(d) + 1, 0);
            std::uint64_t rest = t;
            for (int i = 0; i < d; ++i) {
                div[static_cast<std::size_t>(i)] =
                    static_cast<i64>(rest % static_cast<std::uint64_t>(f.p));
                rest /= static_cast<std::uint64_t>(f.p);
            }
            div[static_cast<std::size_t>(d)] = 1;
            if (poly_is_zero(poly_mod(f, m, div))) return false;
        }
    }
    return true;
}

} // namespace

std::vector<i64> find_irreducible(const FieldSpec& f, int k) {
    if (k < 1) throw DomainError("find_irreducible: degree must be >= 1");
    double size = 1.0;
    for (int i = 0; i < k; ++i) size *= static_cast<double>(f.p);
    if (size > static_cast<double>(1 << 20))
        throw ResourceError("find_irreducible: scan space p^k (p=" + istr(f.p) + ", k=" +
                            istr(k) + ") exceeds 2^20");

    std::uint64_t count = 1;
    for (int i = 0; i < k; ++i) count *= static_cast<std::uint64_t>(f.p);
    // lexicographic on (c_0, ..., c_{k-1}): constant term is the most
    // significant digit of the scan counter
    for (std::uint64_t t = 0; t < count; ++t) {
        std::vector<i64> m(static_cast<std::size_t>(k) + 1, 0);
        std::uint64_t rest = t;
        for (int i = k - 1; i >= 0; --i) {
            m[static_cast<std::size_t>(i)] =
                static_cast<i64>(rest % static_cast<std::uint64_t>(f.p));
            rest /= static_cast<std::uint64_t>(f.p);
        }
        m[static_cast<std::size_t>(k)] = 1;
        if (poly_is_irreducible(f, m)) return m;
    }
    throw NumericalError("find_irreducible: no irreducible found (unreachable for prime p)");
}

const ExtFieldSpec& canonical_field(i64 p, int k) {
    static std::map<std::pair<i64, int>, ExtFieldSpec> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(p, k);
    auto it = cache.find(key);
    if (it == cache.end()) {
        FieldSpec f(p);
        ExtFieldSpec spec{f, k, find_irreducible(f, k)};
        it = cache.emplace(key, std::move(spec)).first;
    }
    return it->second;
}

FpVector ext_add(const ExtFieldSpec& F, const FpVector& a, const FpVector& b) {
    check_vector(a, F.base.p, static_cast<std::size_t>(F.k));
    return vec_add(a, b);
}

FpVector ext_mul(const ExtFieldSpec& F, const FpVector& a, const FpVector& b) {
    check_vector(a, F.base.p, static_cast<std::size_t>(F.k));
    check_vector(b, F.base.p, static_cast<std::size_t>(F.k));
    std::vector<i64> prod = poly_mul(F.base, a.coeffs, b.coeffs);
    std::vector<i64> red = poly_mod(F.base, std::move(prod), F.irreducible);
    red.resize(static_cast<std::size_t>(F.k), 0);
    return FpVector{F.base.p, std::move(red)};
}

FpVector ext_one(const ExtFieldSpec& F) {
    FpVector one = vec_zero(F.base.p, static_cast<std::size_t>(F.k));
    one.coeffs[0] = 1;
    return one;
}

FpVector vec_square(i64 p, const FpVector& y) {
    check_vector(y, p, y.coeffs.size());
    if (y.coeffs.empty()) throw DomainError("vec_square: empty vector");
    const ExtFieldSpec& F = canonical_field(p, static_cast<int>(y.coeffs.size()));
    return ext_mul(F, y, y);
}

} // namespace nmext::field
