#include "doctest.h"

#include <cmath>

#include "nmext/cq.hpp"
#include "nmext/errors.hpp"
#include "nmext/extractor.hpp"

using namespace nmext;
using namespace nmext::cq;

namespace {

// X uniform over {0,1}, E a perfect classical copy
CqState perfect_copy() {
    CMat b0(2), b1(2);
    b0.at(0, 0) = 0.5;
    b1.at(1, 1) = 0.5;
    return make_cq(2, 2, {b0, b1});
}

CqState product_uniform(int d_x, int d_e) {
    std::vector<CMat> blocks;
    for (int x = 0; x < d_x; ++x) {
        CMat b(d_e);
        for (int i = 0; i < d_e; ++i) b.at(i, i) = 1.0 / (d_x * d_e);
        blocks.push_back(b);
    }
    return make_cq(d_x, d_e, std::move(blocks));
}

} // namespace

TEST_CASE("eigh: frozen small spectra and reconstruction") {
    EighResult id3 = eigh(HermitianMatrix(CMat::identity(3)));
    for (double v : id3.vals) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

    CMat pauli_x(2);
    pauli_x.at(0, 1) = 1;
    pauli_x.at(1, 0) = 1;
    EighResult px = eigh(HermitianMatrix(pauli_x));
    CHECK(px.vals[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(px.vals[1] == doctest::Approx(-1.0).epsilon(1e-12));

    CMat m(2);
    m.at(0, 0) = 2;
    m.at(1, 1) = 2;
    m.at(0, 1) = Cplx{0, 1};
    m.at(1, 0) = Cplx{0, -1};
    EighResult r = eigh(HermitianMatrix(m));
    CHECK(r.vals[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(r.vals[1] == doctest::Approx(1.0).epsilon(1e-12));

    // V D V^dagger reconstructs the input
    RngStream rng(3, "eigh-recon");
    CqState rs = random_cq_state(rng, 1, 8);
    HermitianMatrix h(rs.blocks[0]);
    EighResult e = eigh(h);
    CMat d(e.vecs.n);
    for (int i = 0; i < d.n; ++i) d.at(i, i) = e.vals[i];
    CMat rec = mul(mul(e.vecs, d), dagger(e.vecs));
    CHECK(fro_norm(sub(rec, h.mat())) <= 1e-9);

    CMat asym(2);
    asym.at(0, 1) = 1; // not Hermitian
    CHECK_THROWS_AS((void)HermitianMatrix{asym}, DomainError);
    CHECK_THROWS_AS(eigh(HermitianMatrix(CMat::identity(65))), ResourceError);
}

TEST_CASE("trace distance: frozen classical values") {
    HermitianMatrix p0(HermitianMatrix::diagonal({1, 0}));
    HermitianMatrix p1(HermitianMatrix::diagonal({0, 1}));
    HermitianMatrix skew(HermitianMatrix::diagonal({0.75, 0.25}));
    HermitianMatrix unif(HermitianMatrix::diagonal({0.5, 0.5}));
    CHECK(trace_distance(p0, p0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(trace_distance(p0, p1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(trace_distance(skew, unif) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("inv_sqrt_psd inverts on the support only") {
    CMat d = HermitianMatrix::diagonal({4, 1, 0}).mat();
    CMat r = inv_sqrt_psd(d);
    CHECK(r.at(0, 0).real() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.at(1, 1).real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(r.at(2, 2)) <= 1e-12); // kernel stays kernel
}

TEST_CASE("state validation rejects bad inputs") {
    CMat b0(2), b1(2);
    b0.at(0, 0) = 0.6;
    b1.at(1, 1) = 0.6; // traces sum to 1.2
    CHECK_THROWS_AS(make_cq(2, 2, {b0, b1}), DomainError);
    CMat neg(2);
    neg.at(0, 0) = 1.5;
    neg.at(1, 1) = -0.5;
    CHECK_THROWS_AS(make_cq(1, 2, {neg}), DomainError);
}

TEST_CASE("collision probability: trivial E, perfect copy, random states") {
    for (int d : {2, 3, 5}) {
        CollisionRecord r = collision_prob(product_uniform(d, 1));
        CHECK(r.gamma == doctest::Approx(1.0 / d).epsilon(1e-12));
        CHECK(std::abs(r.gamma - r.baseline) <= 1e-12);
        CHECK(r.identity_residual <= 1e-12);
    }

    CollisionRecord pc = collision_prob(perfect_copy());
    CHECK(pc.gamma == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pc.baseline == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(pc.witness_eig_min >= -1e-9);
    CHECK(pc.witness_eig_max <= 1 + 1e-9);

    RngStream rng(11, "collision-cor");
    for (int trial = 0; trial < 25; ++trial) {
        CollisionRecord r = collision_prob(random_cq_state(rng, 3, 4));
        CHECK(r.gamma <= 1 + 1e-9);
        CHECK(r.identity_residual <= 1e-9);
        CHECK(r.witness_eig_min >= -1e-9);
        CHECK(r.witness_eig_max <= 1 + 1e-9);
    }
}

TEST_CASE("min-entropy: frozen classical examples and quantum bounds") {
    ClassicalMinEntropy flat = min_entropy_classical(product_uniform(4, 1));
    CHECK(flat.h_min == doctest::Approx(2.0).epsilon(1e-12));

    // X uniform over {0..3}, E = X mod 2
    std::vector<CMat> blocks;
    for (int x = 0; x < 4; ++x) {
        CMat b(2);
        b.at(x % 2, x % 2) = 0.25;
        blocks.push_back(b);
    }
    ClassicalMinEntropy par = min_entropy_classical(make_cq(4, 2, blocks));
    CHECK(par.p_guess == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(par.h_min == doctest::Approx(1.0).epsilon(1e-12));

    ClassicalMinEntropy copy = min_entropy_classical(perfect_copy());
    CHECK(copy.h_min == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(copy.p_guess == doctest::Approx(1.0).epsilon(1e-12));

    // non-diagonal blocks are rejected
    CMat offdiag(2);
    offdiag.at(0, 1) = 0.1;
    offdiag.at(1, 0) = 0.1;
    offdiag.at(0, 0) = 0.5;
    offdiag.at(1, 1) = 0.5;
    CHECK_THROWS_AS(min_entropy_classical(make_cq(1, 2, {offdiag})), DomainError);

    // quantum bounds bracket the exact classical answer on diagonal states
    RngStream rng(17, "hmin-bounds");
    for (int trial = 0; trial < 20; ++trial) {
        ClassicalCq cs = random_classical_cq(rng, 3, 3);
        ClassicalMinEntropy exact = min_entropy_classical(cs.state);
        GuessBounds qb = min_entropy_quantum(cs.state);
        CHECK(qb.p_lower <= exact.p_guess + 1e-9);
        CHECK(qb.p_upper >= exact.p_guess - 1e-9);
        CHECK(qb.hmin_lower <= exact.h_min + 1e-9);
        CHECK(qb.hmin_upper >= exact.h_min - 1e-9);
    }
}

TEST_CASE("xor premise distances: frozen endpoints") {
    field::FpVector a1 = field::make_vector(3, {1});
    CHECK(xor_premise_distance(product_uniform(3, 1), 3, 1, a1) ==
          doctest::Approx(0.0).epsilon(1e-12));

    // X constant c != 0, E trivial: distance 1 - 1/p
    std::vector<CMat> blocks(3, CMat(1));
    blocks[2].at(0, 0) = 1.0;
    CqState constant = make_cq(3, 1, blocks);
    CHECK(xor_premise_distance(constant, 3, 1, a1) ==
          doctest::Approx(2.0 / 3).epsilon(1e-12));

    field::FpVector a0 = field::make_vector(3, {0});
    CHECK_THROWS_AS(xor_premise_distance(constant, 3, 1, a0), DomainError);
}

TEST_CASE("xor lemma: matrix path vs exact rational oracle") {
    RngStream rng(23, "xor-agree");
    for (int trial = 0; trial < 10; ++trial) {
        ClassicalCq cs = random_classical_cq(rng, 9, 3);
        LemmaCheck mat = check_xor_lemma(cs.state, 3, 2);
        RatLemmaCheck ora = check_xor_lemma_classical(3, 2, cs.pmf);
        CHECK(mat.margin >= -1e-9);
        CHECK(ora.holds_exact);
        CHECK(std::abs(mat.lhs - ora.lhs_d) <= 1e-9);
        CHECK(std::abs(mat.eps - rat_double(ora.eps)) <= 1e-9);

        ClassicalCcq cc = random_classical_ccq(rng, 3, 3, 2);
        LemmaCheck nmat = check_xor_lemma(cc.state, 3, 1);
        RatLemmaCheck nora = check_xor_lemma_classical(3, 1, cc.pmf);
        CHECK(nmat.margin >= -1e-9);
        CHECK(nora.holds_exact);
        CHECK(std::abs(nmat.lhs - nora.lhs_d) <= 1e-9);
    }
}

TEST_CASE("collision sandwich: product state, perfect copy, random") {
    SandwichCheck prod = check_collision_sandwich(product_uniform(3, 2));
    CHECK(prod.eps == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(prod.mid == doctest::Approx(0.0).epsilon(1e-9));

    SandwichCheck pc = check_collision_sandwich(perfect_copy());
    CHECK(pc.eps == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(pc.mid == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(pc.lower == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(pc.upper == doctest::Approx(0.5).epsilon(1e-12));

    RngStream rng(29, "sandwich-rand");
    for (int trial = 0; trial < 25; ++trial) {
        SandwichCheck sw = check_collision_sandwich(random_cq_state(rng, 4, 3));
        CHECK(sw.slack_lower >= -1e-9);
        CHECK(sw.slack_upper >= -1e-9);
        CHECK(sw.identity_residual <= 1e-9);
        CHECK(sw.gamma <= 1 + 1e-9);

        SandwichCheck sn = check_collision_sandwich(random_ccq_state(rng, 2, 3, 2));
        CHECK(sn.slack_lower >= -1e-9);
        CHECK(sn.slack_upper >= -1e-9);
    }

    // exact rational version on a classical state
    ClassicalCq cs = random_classical_cq(rng, 3, 3);
    RatSandwichCheck rs = check_collision_sandwich_classical(cs.pmf);
    CHECK(rs.holds_exact);
    SandwichCheck sw = check_collision_sandwich(cs.state);
    CHECK(std::abs(sw.mid - rat_double(rs.mid)) <= 1e-9);
}

TEST_CASE("guess measurement achieves 1/d + eps/d") {
    MeasurementCheck triv = guess_measurement_from_distance(product_uniform(3, 2));
    CHECK(triv.achieved == doctest::Approx(1.0 / 3).epsilon(1e-9));

    MeasurementCheck pc = guess_measurement_from_distance(perfect_copy());
    CHECK(pc.eps == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(pc.achieved == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(pc.predicted == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(pc.povm_min_eig >= -1e-9);
    CHECK(pc.completeness <= 1e-9);

    RngStream rng(31, "measure-rand");
    for (int trial = 0; trial < 10; ++trial) {
        MeasurementCheck mc =
            guess_measurement_from_distance(random_cq_state(rng, 3, 2));
        CHECK(std::abs(mc.achieved - mc.predicted) <= 1e-9);
        CHECK(mc.povm_min_eig >= -1e-9);
        CHECK(mc.completeness <= 1e-9);
    }
}

TEST_CASE("communication game: frozen no-leak value and full-copy leak") {
    ext::NmExtParams P(3, 2);
    auto g1 = [&P](u64 y, u64 yp) {
        return ext::g_a_eval(P, 1, field::index_to_vector(3, 1, y),
                             field::index_to_vector(3, 1, yp));
    };
    std::vector<Rat> pmf(9, rat(1, 9));

    GameResult no_leak = game_best_classical(3, 2, g1, std::vector<int>(9, 0), pmf);
    CHECK(no_leak.win == rat(1, 3));
    CHECK(no_leak.bound_ok);

    // |E| <= p here means a 3-valued leak; x mod 3 is the first symbol
    std::vector<int> sym_leak(9);
    for (int x = 0; x < 9; ++x) sym_leak[x] = x % 3;
    GameResult sym = game_best_classical(3, 2, g1, sym_leak, pmf);
    CHECK(sym.win >= rat(1, 3));
    CHECK(sym.bound_ok);
}

TEST_CASE("state JSON round trip is exact") {
    RngStream rng(37, "json-rt");
    CqState s = random_cq_state(rng, 2, 3);
    CqState t = cq_state_from_json(cq_state_to_json(s));
    CHECK(t.d_x == s.d_x);
    CHECK(t.d_e == s.d_e);
    for (int x = 0; x < s.d_x; ++x)
        CHECK(fro_norm(sub(t.blocks[static_cast<std::size_t>(x)],
                           s.blocks[static_cast<std::size_t>(x)])) == 0.0);
    CHECK_THROWS_AS(cq_state_from_json("{\"schema\":2}"), DomainError);
}
