#include "doctest.h"

#include "nmext/errors.hpp"
#include "nmext/field.hpp"

using namespace nmext;
using namespace nmext::field;

TEST_CASE("FieldSpec accepts primes and rejects everything else") {
    for (i64 p : {2, 3, 5, 7, 11, 13, 65521}) CHECK(FieldSpec(p).p == p);
    for (i64 m : {-3, 0, 1, 4, 6, 9, 15, 65536}) {
        CHECK_THROWS_AS((void)FieldSpec{m}, DomainError);
    }
    CHECK(is_prime(2));
    CHECK(!is_prime(1));
    CHECK(!is_prime(49));
}

TEST_CASE("scalar arithmetic matches naive modular arithmetic") {
    for (i64 p : {2, 3, 5, 7, 11}) {
        FieldSpec f(p);
        for (i64 a = 0; a < p; ++a) {
            for (i64 b = 0; b < p; ++b) {
                CHECK(fp_add(f, a, b) == (a + b) % p);
                CHECK(fp_sub(f, a, b) == ((a - b) % p + p) % p);
                CHECK(fp_mul(f, a, b) == (a * b) % p);
            }
            CHECK(fp_add(f, a, fp_neg(f, a)) == 0);
            if (a != 0) CHECK(fp_mul(f, a, fp_inv(f, a)) == 1);
            i64 acc = 1;
            for (unsigned e = 0; e < 9; ++e) {
                CHECK(fp_pow(f, a, e) == acc);
                acc = (acc * a) % p;
            }
        }
        CHECK_THROWS_AS(fp_inv(f, 0), DivisionByZero);
        CHECK_THROWS_AS(fp_add(f, p, 0), DomainError);
        CHECK_THROWS_AS(fp_check(f, -1), DomainError);
    }
}

TEST_CASE("vector construction and operations") {
    FpVector v = make_vector(3, {1, 2, 0, 1});
    CHECK(v.coeffs.size() == 4);
    CHECK_THROWS_AS(make_vector(3, {1, 3}), DomainError);
    CHECK_THROWS_AS(make_vector(3, {-1}), DomainError);
    CHECK_THROWS_AS(check_vector(v, 3, 2), DomainError);

    FpVector y = make_vector(3, {1, 1, 0, 2});
    CHECK(inner_product(v, y) == 2); // 1 + 2 + 0 + 2 = 5 = 2 mod 3
    CHECK(vec_add(v, y) == make_vector(3, {2, 0, 0, 0}));
    CHECK(vec_scale(2, y) == make_vector(3, {2, 2, 0, 1}));
    CHECK(concat(make_vector(3, {1}), make_vector(3, {2})) ==
          make_vector(3, {1, 2}));
    CHECK_THROWS_AS(inner_product(v, make_vector(3, {1})), DomainError);
    CHECK_THROWS_AS(vec_add(v, make_vector(5, {1, 2, 0, 1})), DomainError);
}

TEST_CASE("index <-> vector round trip, coefficient 0 least significant") {
    CHECK(index_to_vector(3, 2, 5) == make_vector(3, {2, 1})); // 5 = 2 + 1*3
    for (i64 p : {2, 3, 5}) {
        std::size_t n = p == 2 ? 5 : 3;
        std::uint64_t space = 1;
        for (std::size_t i = 0; i < n; ++i) space *= static_cast<std::uint64_t>(p);
        for (std::uint64_t idx = 0; idx < space; ++idx) {
            FpVector v = index_to_vector(p, n, idx);
            CHECK(vector_index(v) == idx);
        }
        CHECK_THROWS_AS(index_to_vector(p, n, space), DomainError);
    }
}

TEST_CASE("serialization is the frozen uint16-LE wire form") {
    FpVector v = make_vector(3, {1, 2});
    std::vector<std::uint8_t> bytes = serialize(v);
    CHECK(bytes == std::vector<std::uint8_t>{0x02, 0x00, 0x01, 0x00, 0x02, 0x00});

    std::size_t off = 0;
    CHECK(deserialize(3, bytes, off) == v);
    CHECK(off == bytes.size());

    // truncation and trailing-offset behavior
    std::vector<std::uint8_t> cut(bytes.begin(), bytes.end() - 1);
    off = 0;
    CHECK_THROWS_AS(deserialize(3, cut, off), DomainError);
    // symbol out of range for the modulus
    std::vector<std::uint8_t> bad = {0x01, 0x00, 0x03, 0x00};
    off = 0;
    CHECK_THROWS_AS(deserialize(3, bad, off), DomainError);
}

TEST_CASE("canonical irreducibles are the frozen lexicographic picks") {
    CHECK(canonical_field(3, 2).irreducible == std::vector<i64>{1, 0, 1});
    CHECK(canonical_field(2, 2).irreducible == std::vector<i64>{1, 1, 1});
    CHECK(canonical_field(5, 1).irreducible == std::vector<i64>{0, 1});
    CHECK(canonical_field(5, 2).irreducible == std::vector<i64>{1, 1, 1});
    CHECK(canonical_field(7, 2).irreducible == std::vector<i64>{1, 0, 1});
    CHECK(canonical_field(2, 4).irreducible == std::vector<i64>{1, 0, 0, 1, 1});

    // memoization returns the same object
    CHECK(&canonical_field(3, 2) == &canonical_field(3, 2));

    CHECK_THROWS_AS(find_irreducible(FieldSpec(2), 21), ResourceError);
}

TEST_CASE("extension field arithmetic in F_9 = F_3[x]/(x^2+1)") {
    const ExtFieldSpec& F = canonical_field(3, 2);
    FpVector x = make_vector(3, {0, 1});
    CHECK(ext_mul(F, x, x) == make_vector(3, {2, 0})); // x^2 = -1 = 2
    CHECK(ext_one(F) == make_vector(3, {1, 0}));

    // every nonzero element has order dividing 8 (Fermat in F_9)
    for (std::uint64_t i = 1; i < 9; ++i) {
        FpVector a = index_to_vector(3, 2, i);
        FpVector acc = ext_one(F);
        for (int e = 0; e < 8; ++e) acc = ext_mul(F, acc, a);
        CHECK(acc == ext_one(F));
    }

    // commutativity + associativity, exhaustive
    for (std::uint64_t i = 0; i < 9; ++i)
        for (std::uint64_t j = 0; j < 9; ++j) {
            FpVector a = index_to_vector(3, 2, i);
            FpVector b = index_to_vector(3, 2, j);
            CHECK(ext_mul(F, a, b) == ext_mul(F, b, a));
            for (std::uint64_t k = 0; k < 9; ++k) {
                FpVector c = index_to_vector(3, 2, k);
                CHECK(ext_mul(F, ext_mul(F, a, b), c) ==
                      ext_mul(F, a, ext_mul(F, b, c)));
            }
        }
}

TEST_CASE("vec_square is squaring in the canonical extension field") {
    CHECK(vec_square(3, make_vector(3, {1, 1})) == make_vector(3, {0, 2}));
    CHECK(vec_square(5, make_vector(5, {3})) == make_vector(5, {4})); // 9 mod 5

    const ExtFieldSpec& F = canonical_field(3, 2);
    for (std::uint64_t i = 0; i < 9; ++i)
        for (std::uint64_t j = 0; j < 9; ++j) {
            FpVector a = index_to_vector(3, 2, i);
            FpVector b = index_to_vector(3, 2, j);
            // (ab)^2 = a^2 b^2
            CHECK(vec_square(3, ext_mul(F, a, b)) ==
                  ext_mul(F, vec_square(3, a), vec_square(3, b)));
        }
}
