#include "nmext/cq.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "json.hpp"

namespace nmext::cq {

namespace {

std::string istr(long long v) { return std::to_string(v); }

u64 upow(i64 base, int e) {
    u64 r = 1;
    for (int i = 0; i < e; ++i) r *= static_cast<u64>(base);
    return r;
}

} // namespace

// ---------------------------------------------------------------------------
// Matrix plumbing
// ---------------------------------------------------------------------------

CMat CMat::identity(int n_) {
    CMat m(n_);
    for (int i = 0; i < n_; ++i) m.at(i, i) = Cplx{1, 0};
    return m;
}

CMat add(const CMat& x, const CMat& y) {
    if (x.n != y.n) throw DomainError("CMat add: dim mismatch");
    CMat out(x.n);
    for (std::size_t i = 0; i < x.a.size(); ++i) out.a[i] = x.a[i] + y.a[i];
    return out;
}

CMat sub(const CMat& x, const CMat& y) {
    if (x.n != y.n) throw DomainError("CMat sub: dim mismatch");
    CMat out(x.n);
    for (std::size_t i = 0; i < x.a.size(); ++i) out.a[i] = x.a[i] - y.a[i];
    return out;
}

CMat mul(const CMat& x, const CMat& y) {
    if (x.n != y.n) throw DomainError("CMat mul: dim mismatch");
    const int n = x.n;
    CMat out(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            Cplx xik = x.at(i, k);
            if (xik == Cplx{0, 0}) continue;
            for (int j = 0; j < n; ++j) out.at(i, j) += xik * y.at(k, j);
        }
    return out;
}

CMat scale(Cplx c, const CMat& x) {
    CMat out = x;
    for (auto& v : out.a) v *= c;
    return out;
}

CMat dagger(const CMat& x) {
    CMat out(x.n);
    for (int i = 0; i < x.n; ++i)
        for (int j = 0; j < x.n; ++j) out.at(i, j) = std::conj(x.at(j, i));
    return out;
}

Cplx trace(const CMat& x) {
    Cplx t{0, 0};
    for (int i = 0; i < x.n; ++i) t += x.at(i, i);
    return t;
}

double fro_norm(const CMat& x) {
    double s = 0;
    for (const auto& v : x.a) s += std::norm(v);
    return std::sqrt(s);
}

double max_asymmetry(const CMat& x) {
    double worst = 0;
    for (int i = 0; i < x.n; ++i)
        for (int j = 0; j < x.n; ++j)
            worst = std::max(worst, std::abs(x.at(i, j) - std::conj(x.at(j, i))));
    return worst;
}

HermitianMatrix::HermitianMatrix(CMat m) : m_(std::move(m)) {
    if (m_.n < 1) throw DomainError("HermitianMatrix: empty matrix");
    double asym = max_asymmetry(m_);
    if (asym > 1e-12)
        throw DomainError("HermitianMatrix: asymmetry " + std::to_string(asym) +
                          " exceeds 1e-12");
    CMat d = dagger(m_);
    for (std::size_t i = 0; i < m_.a.size(); ++i) m_.a[i] = 0.5 * (m_.a[i] + d.a[i]);
}

HermitianMatrix HermitianMatrix::diagonal(const std::vector<double>& d) {
    CMat m(static_cast<int>(d.size()));
    for (int i = 0; i < m.n; ++i) m.at(i, i) = Cplx{d[static_cast<std::size_t>(i)], 0};
    return HermitianMatrix(std::move(m));
}

// ---------------------------------------------------------------------------
// Cyclic complex Jacobi eigensolver
// ---------------------------------------------------------------------------

namespace {

double off_diag_fro(const CMat& A) {
    double s = 0;
    for (int i = 0; i < A.n; ++i)
        for (int j = 0; j < A.n; ++j)
            if (i != j) s += std::norm(A.at(i, j));
    return std::sqrt(s);
}

} // namespace

EighResult eigh(const HermitianMatrix& h) {
    const int n = h.dim();
    if (n > 64) throw ResourceError("eigh: dim " + istr(n) + " exceeds 64");
    CMat A = h.mat();
    CMat V = CMat::identity(n);
    const double tol = 1e-12;

    int sweeps = 0;
    bool converged = off_diag_fro(A) < tol;
    while (!converged && sweeps < 100) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const Cplx apq = A.at(p, q);
                const double g = std::abs(apq);
                if (g < 1e-200) continue;
                const Cplx u = apq / g; // unit phase of the pivot
                const double app = A.at(p, p).real();
                const double aqq = A.at(q, q).real();
                const double tau = (aqq - app) / (2.0 * g);
                // smaller-angle root of t^2 + 2 tau t - 1 = 0
                const double t = (tau >= 0)
                                     ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                     : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const Cplx su = s * u;

                for (int k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const Cplx akp = A.at(k, p);
                    const Cplx akq = A.at(k, q);
                    A.at(k, p) = c * akp - std::conj(su) * akq;
                    A.at(k, q) = su * akp + c * akq;
                    A.at(p, k) = std::conj(A.at(k, p));
                    A.at(q, k) = std::conj(A.at(k, q));
                }
                A.at(p, p) = Cplx{c * c * app + s * s * aqq - 2.0 * c * s * g, 0};
                A.at(q, q) = Cplx{s * s * app + c * c * aqq + 2.0 * c * s * g, 0};
                A.at(p, q) = Cplx{0, 0};
                A.at(q, p) = Cplx{0, 0};

                for (int k = 0; k < n; ++k) {
                    const Cplx vkp = V.at(k, p);
                    const Cplx vkq = V.at(k, q);
                    V.at(k, p) = c * vkp - std::conj(su) * vkq;
                    V.at(k, q) = su * vkp + c * vkq;
                }
            }
        }
        ++sweeps;
        converged = off_diag_fro(A) < tol;
    }
    if (!converged)
        throw NumericalError("eigh: off-diagonal norm " +
                             std::to_string(off_diag_fro(A)) +
                             " after 100 Jacobi sweeps");

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&A](int i, int j) {
        return A.at(i, i).real() > A.at(j, j).real();
    });

    EighResult out;
    out.sweeps = sweeps;
    out.vals.resize(static_cast<std::size_t>(n));
    out.vecs = CMat(n);
    for (int j = 0; j < n; ++j) {
        out.vals[static_cast<std::size_t>(j)] = A.at(order[static_cast<std::size_t>(j)],
                                                     order[static_cast<std::size_t>(j)])
                                                    .real();
        for (int i = 0; i < n; ++i)
            out.vecs.at(i, j) = V.at(i, order[static_cast<std::size_t>(j)]);
    }
    return out;
}

double half_trace_norm(const CMat& hmat) {
    EighResult r = eigh(HermitianMatrix(hmat));
    double s = 0;
    for (double v : r.vals) s += std::abs(v);
    return 0.5 * s;
}

double trace_distance(const HermitianMatrix& rho, const HermitianMatrix& sigma) {
    if (rho.dim() != sigma.dim()) throw DomainError("trace_distance: dim mismatch");
    return half_trace_norm(sub(rho.mat(), sigma.mat()));
}

CMat inv_sqrt_psd(const CMat& rho) {
    EighResult r = eigh(HermitianMatrix(rho));
    const int n = rho.n;
    CMat out(n);
    for (int k = 0; k < n; ++k) {
        double lam = r.vals[static_cast<std::size_t>(k)];
        if (lam < 1e-12) continue; // kernel
        double w = 1.0 / std::sqrt(lam);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                out.at(i, j) += w * r.vecs.at(i, k) * std::conj(r.vecs.at(j, k));
    }
    return out;
}

// ---------------------------------------------------------------------------
// State construction
// ---------------------------------------------------------------------------

namespace {

void validate_blocks(std::vector<CMat>& blocks, int expected_count, int d_e,
                     const char* what) {
    if (static_cast<int>(blocks.size()) != expected_count)
        throw DomainError(std::string(what) + ": expected " + istr(expected_count) +
                          " blocks, got " + istr(static_cast<int>(blocks.size())));
    double total = 0;
    for (auto& b : blocks) {
        if (b.n != d_e) throw DomainError(std::string(what) + ": block dim mismatch");
        // symmetrize through the Hermitian carrier (checks 1e-12 tolerance)
        b = HermitianMatrix(b).mat();
        EighResult r = eigh(HermitianMatrix(b));
        if (!r.vals.empty() && r.vals.back() < -1e-10)
            throw DomainError(std::string(what) + ": block min eigenvalue " +
                              std::to_string(r.vals.back()) + " below -1e-10");
        total += trace(b).real();
    }
    if (std::abs(total - 1.0) > 1e-10)
        throw DomainError(std::string(what) + ": total trace " + std::to_string(total) +
                          " not 1 within 1e-10");
}

} // namespace

CqState make_cq(int d_x, int d_e, std::vector<CMat> blocks) {
    if (d_x < 1 || d_e < 1) throw DomainError("make_cq: dims must be >= 1");
    validate_blocks(blocks, d_x, d_e, "CqState");
    return CqState{d_x, d_e, std::move(blocks)};
}

CcqState make_ccq(int d_first, int d_second, int d_e, std::vector<CMat> blocks) {
    if (d_first < 1 || d_second < 1 || d_e < 1)
        throw DomainError("make_ccq: dims must be >= 1");
    validate_blocks(blocks, d_first * d_second, d_e, "CcqState");
    return CcqState{d_first, d_second, d_e, std::move(blocks)};
}

CMat CqState::rho_e() const {
    CMat out(d_e);
    for (const auto& b : blocks) out = add(out, b);
    return out;
}

std::vector<double> CqState::probs() const {
    std::vector<double> p;
    p.reserve(blocks.size());
    for (const auto& b : blocks) p.push_back(trace(b).real());
    return p;
}

CMat CcqState::rho_e() const {
    CMat out(d_e);
    for (const auto& b : blocks) out = add(out, b);
    return out;
}

CqState CcqState::trace_out_first() const {
    std::vector<CMat> out(static_cast<std::size_t>(d_second), CMat(d_e));
    for (int i = 0; i < d_first; ++i)
        for (int j = 0; j < d_second; ++j)
            out[static_cast<std::size_t>(j)] =
                add(out[static_cast<std::size_t>(j)], block(i, j));
    return CqState{d_second, d_e, std::move(out)};
}

// ---------------------------------------------------------------------------
// Random states
// ---------------------------------------------------------------------------

namespace {

CMat gaussian_block(RngStream& rng, int d) {
    CMat a(d);
    for (auto& v : a.a) v = Cplx{rng.gaussian(), rng.gaussian()} / std::sqrt(2.0);
    return mul(a, dagger(a));
}

} // namespace

CqState random_cq_state(RngStream& rng, int d_x, int d_e) {
    std::vector<CMat> blocks;
    blocks.reserve(static_cast<std::size_t>(d_x));
    double total = 0;
    for (int x = 0; x < d_x; ++x) {
        blocks.push_back(gaussian_block(rng, d_e));
        total += trace(blocks.back()).real();
    }
    for (auto& b : blocks) b = scale(Cplx{1.0 / total, 0}, b);
    return make_cq(d_x, d_e, std::move(blocks));
}

CcqState random_ccq_state(RngStream& rng, int d_first, int d_second, int d_e) {
    std::vector<CMat> blocks;
    blocks.reserve(static_cast<std::size_t>(d_first) * d_second);
    double total = 0;
    for (int i = 0; i < d_first * d_second; ++i) {
        blocks.push_back(gaussian_block(rng, d_e));
        total += trace(blocks.back()).real();
    }
    for (auto& b : blocks) b = scale(Cplx{1.0 / total, 0}, b);
    return make_ccq(d_first, d_second, d_e, std::move(blocks));
}

ClassicalCq random_classical_cq(RngStream& rng, int d_x, int d_e) {
    std::vector<std::vector<u64>> w(static_cast<std::size_t>(d_x),
                                    std::vector<u64>(static_cast<std::size_t>(d_e)));
    u64 total = 0;
    for (auto& row : w)
        for (auto& v : row) {
            v = rng.below(100) + 1;
            total += v;
        }
    ClassicalCq out;
    out.pmf.assign(static_cast<std::size_t>(d_x),
                   std::vector<Rat>(static_cast<std::size_t>(d_e)));
    std::vector<CMat> blocks(static_cast<std::size_t>(d_x), CMat(d_e));
    for (int x = 0; x < d_x; ++x)
        for (int e = 0; e < d_e; ++e) {
            Rat pr = rat_u64(w[static_cast<std::size_t>(x)][static_cast<std::size_t>(e)],
                             total);
            out.pmf[static_cast<std::size_t>(x)][static_cast<std::size_t>(e)] = pr;
            blocks[static_cast<std::size_t>(x)].at(e, e) = Cplx{rat_double(pr), 0};
        }
    out.state = make_cq(d_x, d_e, std::move(blocks));
    return out;
}

ClassicalCcq random_classical_ccq(RngStream& rng, int d_first, int d_second, int d_e) {
    ClassicalCcq out;
    out.pmf.assign(
        static_cast<std::size_t>(d_first),
        std::vector<std::vector<Rat>>(static_cast<std::size_t>(d_second),
                                      std::vector<Rat>(static_cast<std::size_t>(d_e))));
    std::vector<std::vector<u64>> w(
        static_cast<std::size_t>(d_first) * d_second,
        std::vector<u64>(static_cast<std::size_t>(d_e)));
    u64 total = 0;
    for (auto& row : w)
        for (auto& v : row) {
            v = rng.below(100) + 1;
            total += v;
        }
    std::vector<CMat> blocks(static_cast<std::size_t>(d_first) * d_second, CMat(d_e));
    for (int i = 0; i < d_first; ++i)
        for (int j = 0; j < d_second; ++j)
            for (int e = 0; e < d_e; ++e) {
                std::size_t idx = static_cast<std::size_t>(i) * d_second + j;
                Rat pr = rat_u64(w[idx][static_cast<std::size_t>(e)], total);
                out.pmf[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]
                       [static_cast<std::size_t>(e)] = pr;
                blocks[idx].at(e, e) = Cplx{rat_double(pr), 0};
            }
    out.state = make_ccq(d_first, d_second, d_e, std::move(blocks));
    return out;
}

// ---------------------------------------------------------------------------
// Collision probability
// ---------------------------------------------------------------------------

namespace {

// Tr[(B R)^2] for blocks B and the (Hermitian) conditioner R
double block_collision_term(const CMat& B, const CMat& R) {
    CMat br = mul(B, R);
    return trace(mul(br, br)).real();
}

} // namespace

CollisionRecord collision_prob(const CqState& s) {
    const CMat R = inv_sqrt_psd(s.rho_e());
    const CMat rho_e = s.rho_e();

    double gamma = 0;
    double eig_min = 1e300, eig_max = -1e300;
    for (const auto& b : s.blocks) {
        gamma += block_collision_term(b, R);
        // witness: R rho^x R has spectrum in [0, 1]
        EighResult w = eigh(HermitianMatrix(mul(mul(R, b), R)));
        eig_min = std::min(eig_min, w.vals.back());
        eig_max = std::max(eig_max, w.vals.front());
    }

    const double baseline = 1.0 / s.d_x;
    // direct expansion of Tr[((rho_XE - U_X (x) rho_E)(I (x) R))^2]
    double direct = 0;
    for (const auto& b : s.blocks)
        direct += block_collision_term(sub(b, scale(Cplx{baseline, 0}, rho_e)), R);

    return CollisionRecord{gamma, baseline, std::abs(direct - (gamma - baseline)),
                           eig_min, eig_max};
}

CollisionRecord collision_prob(const CcqState& s) {
    const CMat R = inv_sqrt_psd(s.rho_e());

    double gamma = 0;
    double eig_min = 1e300, eig_max = -1e300;
    for (const auto& b : s.blocks) {
        gamma += block_collision_term(b, R);
        EighResult w = eigh(HermitianMatrix(mul(mul(R, b), R)));
        eig_min = std::min(eig_min, w.vals.back());
        eig_max = std::max(eig_max, w.vals.front());
    }

    CqState marg = s.trace_out_first();
    double gamma_marg = 0;
    for (const auto& b : marg.blocks) gamma_marg += block_collision_term(b, R);
    const double baseline = gamma_marg / s.d_first;

    double direct = 0;
    for (int i = 0; i < s.d_first; ++i)
        for (int j = 0; j < s.d_second; ++j) {
            CMat diff = sub(s.block(i, j),
                            scale(Cplx{1.0 / s.d_first, 0},
                                  marg.blocks[static_cast<std::size_t>(j)]));
            direct += block_collision_term(diff, R);
        }

    return CollisionRecord{gamma, baseline, std::abs(direct - (gamma - baseline)),
                           eig_min, eig_max};
}

// ---------------------------------------------------------------------------
// Min-entropy
// ---------------------------------------------------------------------------

namespace {

bool is_diagonal(const CMat& b) {
    for (int i = 0; i < b.n; ++i)
        for (int j = 0; j < b.n; ++j)
            if (i != j && std::abs(b.at(i, j)) > 1e-12) return false;
    return true;
}

} // namespace

ClassicalMinEntropy min_entropy_classical(const CqState& s) {
    for (const auto& b : s.blocks)
        if (!is_diagonal(b))
            throw DomainError("min_entropy_classical: blocks must be diagonal");
    double p_guess = 0;
    for (int e = 0; e < s.d_e; ++e) {
        double best = 0;
        for (const auto& b : s.blocks) best = std::max(best, b.at(e, e).real());
        p_guess += best;
    }
    return ClassicalMinEntropy{-std::log2(p_guess), p_guess};
}

GuessBounds min_entropy_quantum(const CqState& s) {
    const CMat R = inv_sqrt_psd(s.rho_e());
    double pgm = 0;
    double upper = 0;
    for (const auto& b : s.blocks) {
        CMat rbr = mul(mul(R, b), R);
        pgm += trace(mul(rbr, b)).real();
        EighResult w = eigh(HermitianMatrix(rbr));
        upper = std::max(upper, w.vals.front());
    }
    return GuessBounds{pgm, upper, -std::log2(upper), -std::log2(pgm)};
}

// ---------------------------------------------------------------------------
// XOR lemmas
// ---------------------------------------------------------------------------

namespace {

void check_xor_dims(i64 p, int t, int d_x, int d_e) {
    field::FieldSpec{p}; // validates primality
    if (t < 1) throw DomainError("xor: t must be >= 1");
    double size = std::pow(static_cast<double>(p), t);
    if (size > 1024.0)
        throw ResourceError("xor: p^t exceeds 2^10 (p=" + istr(p) + ", t=" + istr(t) +
                            ")");
    if (d_e > 8) throw ResourceError("xor: d_E " + istr(d_e) + " exceeds 8");
    if (static_cast<double>(d_x) != size)
        throw DomainError("xor: state labels (" + istr(d_x) + ") must equal p^t");
}

} // namespace

double xor_premise_distance(const CqState& s, i64 p, int t, const field::FpVector& a) {
    check_xor_dims(p, t, s.d_x, s.d_e);
    field::check_vector(a, p, static_cast<std::size_t>(t));
    if (field::vector_index(a) == 0)
        throw DomainError("xor_premise_distance (uniform): a must be nonzero");

    std::vector<CMat> zeta(static_cast<std::size_t>(p), CMat(s.d_e));
    for (int x = 0; x < s.d_x; ++x) {
        field::FpVector xv =
            field::index_to_vector(p, static_cast<std::size_t>(t), static_cast<u64>(x));
        i64 z = field::inner_product(a, xv);
        zeta[static_cast<std::size_t>(z)] =
            add(zeta[static_cast<std::size_t>(z)], s.blocks[static_cast<std::size_t>(x)]);
    }
    const CMat uniform = scale(Cplx{1.0 / static_cast<double>(p), 0}, s.rho_e());
    double dist = 0;
    for (const auto& zb : zeta) dist += half_trace_norm(sub(zb, uniform));
    return dist;
}

double xor_premise_distance(const CcqState& s, i64 p, int t, const field::FpVector& a) {
    check_xor_dims(p, t, s.d_second, s.d_e);
    if (s.d_first != static_cast<int>(p))
        throw DomainError("xor_premise_distance (nonuniform): first register must be F_p");
    field::check_vector(a, p, static_cast<std::size_t>(t));
    field::FieldSpec f(p);

    std::vector<CMat> zeta(static_cast<std::size_t>(p), CMat(s.d_e));
    for (int x0 = 0; x0 < s.d_first; ++x0)
        for (int x = 0; x < s.d_second; ++x) {
            field::FpVector xv = field::index_to_vector(p, static_cast<std::size_t>(t),
                                                        static_cast<u64>(x));
            i64 z = field::fp_add(f, x0, field::inner_product(a, xv));
            zeta[static_cast<std::size_t>(z)] =
                add(zeta[static_cast<std::size_t>(z)], s.block(x0, x));
        }
    const CMat uniform = scale(Cplx{1.0 / static_cast<double>(p), 0}, s.rho_e());
    double dist = 0;
    for (const auto& zb : zeta) dist += half_trace_norm(sub(zb, uniform));
    return dist;
}

LemmaCheck check_xor_lemma(const CqState& s, i64 p, int t) {
    check_xor_dims(p, t, s.d_x, s.d_e);
    const CMat per_label = scale(Cplx{1.0 / s.d_x, 0}, s.rho_e());
    double lhs = 0;
    for (const auto& b : s.blocks) lhs += half_trace_norm(sub(b, per_label));

    double eps = 0;
    for (u64 ai = 1; ai < static_cast<u64>(s.d_x); ++ai) {
        field::FpVector a =
            field::index_to_vector(p, static_cast<std::size_t>(t), ai);
        eps = std::max(eps, xor_premise_distance(s, p, t, a));
    }
    double rhs = std::pow(static_cast<double>(p), t / 2.0) / std::sqrt(2.0) *
                 std::sqrt(eps);
    return LemmaCheck{lhs, rhs, rhs - lhs, eps};
}

LemmaCheck check_xor_lemma(const CcqState& s, i64 p, int t) {
    check_xor_dims(p, t, s.d_second, s.d_e);
    if (s.d_first != static_cast<int>(p))
        throw DomainError("check_xor_lemma (nonuniform): first register must be F_p");

    CqState marg = s.trace_out_first();
    double lhs = 0;
    for (int i = 0; i < s.d_first; ++i)
        for (int j = 0; j < s.d_second; ++j)
            lhs += half_trace_norm(
                sub(s.block(i, j), scale(Cplx{1.0 / s.d_first, 0},
                                         marg.blocks[static_cast<std::size_t>(j)])));

    double eps = 0;
    for (u64 ai = 0; ai < static_cast<u64>(s.d_second); ++ai) {
        field::FpVector a =
            field::index_to_vector(p, static_cast<std::size_t>(t), ai);
        eps = std::max(eps, xor_premise_distance(s, p, t, a));
    }
    double rhs = std::pow(static_cast<double>(p), (t + 1) / 2.0) / std::sqrt(2.0) *
                 std::sqrt(eps);
    return LemmaCheck{lhs, rhs, rhs - lhs, eps};
}

RatLemmaCheck check_xor_lemma_classical(i64 p, int t,
                                        const std::vector<std::vector<Rat>>& pmf) {
    field::FieldSpec{p};
    const u64 dx = upow(p, t);
    if (pmf.size() != dx) throw DomainError("xor classical: pmf must have p^t rows");
    const std::size_t de = pmf.front().size();

    std::vector<Rat> pe(de, Rat(0));
    for (const auto& row : pmf)
        for (std::size_t e = 0; e < de; ++e) pe[e] += row[e];

    Rat lhs(0);
    Rat inv_dx = Rat(1) / Rat(static_cast<unsigned long>(dx));
    for (const auto& row : pmf)
        for (std::size_t e = 0; e < de; ++e) lhs += rat_abs(row[e] - pe[e] * inv_dx);
    lhs /= 2;

    Rat inv_p = Rat(1) / Rat(static_cast<unsigned long>(p));
    Rat eps(0);
    for (u64 ai = 1; ai < dx; ++ai) {
        field::FpVector a = field::index_to_vector(p, static_cast<std::size_t>(t), ai);
        std::vector<std::vector<Rat>> pz(static_cast<std::size_t>(p),
                                         std::vector<Rat>(de, Rat(0)));
        for (u64 x = 0; x < dx; ++x) {
            field::FpVector xv =
                field::index_to_vector(p, static_cast<std::size_t>(t), x);
            i64 z = field::inner_product(a, xv);
            for (std::size_t e = 0; e < de; ++e)
                pz[static_cast<std::size_t>(z)][e] += pmf[x][e];
        }
        Rat dist(0);
        for (i64 z = 0; z < p; ++z)
            for (std::size_t e = 0; e < de; ++e)
                dist += rat_abs(pz[static_cast<std::size_t>(z)][e] - pe[e] * inv_p);
        dist /= 2;
        if (dist > eps) eps = dist;
    }

    RatLemmaCheck out;
    out.lhs = lhs;
    out.eps = eps;
    // lhs <= p^{t/2}/sqrt(2) sqrt(eps)  <=>  2 lhs^2 <= p^t eps
    out.holds_exact = 2 * lhs * lhs <= rat_pow(p, static_cast<unsigned>(t)) * eps;
    out.lhs_d = rat_double(lhs);
    out.rhs_d = std::pow(static_cast<double>(p), t / 2.0) / std::sqrt(2.0) *
                std::sqrt(rat_double(eps));
    return out;
}

RatLemmaCheck check_xor_lemma_classical(
    i64 p, int t, const std::vector<std::vector<std::vector<Rat>>>& pmf) {
    field::FieldSpec f(p);
    const u64 dx = upow(p, t);
    if (pmf.size() != static_cast<std::size_t>(p) || pmf.front().size() != dx)
        throw DomainError("xor classical (nonuniform): pmf must be p x p^t x d_e");
    const std::size_t de = pmf.front().front().size();

    std::vector<Rat> pe(de, Rat(0));
    std::vector<std::vector<Rat>> px(dx, std::vector<Rat>(de, Rat(0)));
    for (i64 x0 = 0; x0 < p; ++x0)
        for (u64 x = 0; x < dx; ++x)
            for (std::size_t e = 0; e < de; ++e) {
                pe[e] += pmf[static_cast<std::size_t>(x0)][x][e];
                px[x][e] += pmf[static_cast<std::size_t>(x0)][x][e];
            }

    Rat inv_p = Rat(1) / Rat(static_cast<unsigned long>(p));
    Rat lhs(0);
    for (i64 x0 = 0; x0 < p; ++x0)
        for (u64 x = 0; x < dx; ++x)
            for (std::size_t e = 0; e < de; ++e)
                lhs += rat_abs(pmf[static_cast<std::size_t>(x0)][x][e] -
                               px[x][e] * inv_p);
    lhs /= 2;

    Rat eps(0);
    for (u64 ai = 0; ai < dx; ++ai) {
        field::FpVector a = field::index_to_vector(p, static_cast<std::size_t>(t), ai);
        std::vector<std::vector<Rat>> pz(static_cast<std::size_t>(p),
                                         std::vector<Rat>(de, Rat(0)));
        for (i64 x0 = 0; x0 < p; ++x0)
            for (u64 x = 0; x < dx; ++x) {
                field::FpVector xv =
                    field::index_to_vector(p, static_cast<std::size_t>(t), x);
                i64 z = field::fp_add(f, x0, field::inner_product(a, xv));
                for (std::size_t e = 0; e < de; ++e)
                    pz[static_cast<std::size_t>(z)][e] +=
                        pmf[static_cast<std::size_t>(x0)][x][e];
            }
        Rat dist(0);
        for (i64 z = 0; z < p; ++z)
            for (std::size_t e = 0; e < de; ++e)
                dist += rat_abs(pz[static_cast<std::size_t>(z)][e] - pe[e] * inv_p);
        dist /= 2;
        if (dist > eps) eps = dist;
    }

    RatLemmaCheck out;
    out.lhs = lhs;
    out.eps = eps;
    // lhs <= p^{(t+1)/2}/sqrt(2) sqrt(eps)  <=>  2 lhs^2 <= p^{t+1} eps
    out.holds_exact = 2 * lhs * lhs <= rat_pow(p, static_cast<unsigned>(t + 1)) * eps;
    out.lhs_d = rat_double(lhs);
    out.rhs_d = std::pow(static_cast<double>(p), (t + 1) / 2.0) / std::sqrt(2.0) *
                std::sqrt(rat_double(eps));
    return out;
}

// ---------------------------------------------------------------------------
// Collision sandwich
// ---------------------------------------------------------------------------

SandwichCheck check_collision_sandwich(const CqState& s) {
    CollisionRecord col = collision_prob(s);
    const CMat per_label = scale(Cplx{1.0 / s.d_x, 0}, s.rho_e());
    double eps = 0;
    for (const auto& b : s.blocks) eps += half_trace_norm(sub(b, per_label));

    SandwichCheck out;
    out.eps = eps;
    out.gamma = col.gamma;
    out.identity_residual = col.identity_residual;
    out.mid = col.gamma - col.baseline;
    out.lower = 4.0 * eps * eps / s.d_x;
    out.upper = 2.0 * eps * (1.0 - 1.0 / s.d_x);
    out.slack_lower = out.mid - out.lower;
    out.slack_upper = out.upper - out.mid;
    return out;
}

SandwichCheck check_collision_sandwich(const CcqState& s) {
    CollisionRecord col = collision_prob(s);
    CqState marg = s.trace_out_first();
    double eps = 0;
    for (int i = 0; i < s.d_first; ++i)
        for (int j = 0; j < s.d_second; ++j)
            eps += half_trace_norm(
                sub(s.block(i, j), scale(Cplx{1.0 / s.d_first, 0},
                                         marg.blocks[static_cast<std::size_t>(j)])));

    SandwichCheck out;
    out.eps = eps;
    out.gamma = col.gamma;
    out.identity_residual = col.identity_residual;
    out.mid = col.gamma - col.baseline;
    out.lower = 4.0 * eps * eps / (static_cast<double>(s.d_first) * s.d_second);
    out.upper = 2.0 * eps * (1.0 - 1.0 / s.d_first);
    out.slack_lower = out.mid - out.lower;
    out.slack_upper = out.upper - out.mid;
    return out;
}

RatSandwichCheck check_collision_sandwich_classical(
    const std::vector<std::vector<Rat>>& pmf) {
    const std::size_t dx = pmf.size();
    const std::size_t de = pmf.front().size();
    std::vector<Rat> pe(de, Rat(0));
    for (const auto& row : pmf)
        for (std::size_t e = 0; e < de; ++e) pe[e] += row[e];

    Rat gamma(0);
    for (const auto& row : pmf)
        for (std::size_t e = 0; e < de; ++e)
            if (pe[e] != 0) gamma += row[e] * row[e] / pe[e];

    Rat inv_dx = Rat(1) / Rat(static_cast<unsigned long>(dx));
    Rat eps(0);
    for (const auto& row : pmf)
        for (std::size_t e = 0; e < de; ++e) eps += rat_abs(row[e] - pe[e] * inv_dx);
    eps /= 2;

    RatSandwichCheck out;
    out.eps = eps;
    out.mid = gamma - inv_dx;
    out.lower = 4 * eps * eps * inv_dx;
    out.upper = 2 * eps * (1 - inv_dx);
    out.holds_exact = (out.lower <= out.mid) && (out.mid <= out.upper);
    return out;
}

// ---------------------------------------------------------------------------
// Distance-to-guessing measurement
// ---------------------------------------------------------------------------

MeasurementCheck guess_measurement_from_distance(const CqState& s) {
    if (s.d_x * s.d_e > 64)
        throw ResourceError("guess_measurement: d_X * d_E exceeds 64");
    const CMat per_label = scale(Cplx{1.0 / s.d_x, 0}, s.rho_e());

    double eps = 0;
    std::vector<CMat> proj; // M'_x: projector onto positive part of rho^x - rho_E/d
    proj.reserve(s.blocks.size());
    CMat msum(s.d_e);
    for (const auto& b : s.blocks) {
        CMat diff = sub(b, per_label);
        eps += half_trace_norm(diff);
        EighResult r = eigh(HermitianMatrix(diff));
        CMat pj(s.d_e);
        for (int k = 0; k < s.d_e; ++k) {
            if (r.vals[static_cast<std::size_t>(k)] <= 0) continue;
            for (int i = 0; i < s.d_e; ++i)
                for (int j = 0; j < s.d_e; ++j)
                    pj.at(i, j) += r.vecs.at(i, k) * std::conj(r.vecs.at(j, k));
        }
        msum = add(msum, pj);
        proj.push_back(std::move(pj));
    }

    MeasurementCheck out;
    out.eps = eps;
    out.predicted = (1.0 + eps) / s.d_x;
    out.povm_min_eig = 1e300;

    const CMat rest = sub(CMat::identity(s.d_e),
                          scale(Cplx{1.0 / s.d_x, 0}, msum));
    CMat total(s.d_e);
    double achieved = 0;
    for (int x = 0; x < s.d_x; ++x) {
        CMat mx = scale(Cplx{1.0 / s.d_x, 0},
                        add(proj[static_cast<std::size_t>(x)], rest));
        achieved += trace(mul(mx, s.blocks[static_cast<std::size_t>(x)])).real();
        total = add(total, mx);
        EighResult r = eigh(HermitianMatrix(mx));
        out.povm_min_eig = std::min(out.povm_min_eig, r.vals.back());
        out.povm.push_back(std::move(mx));
    }
    out.achieved = achieved;

    double comp = 0;
    CMat delta = sub(total, CMat::identity(s.d_e));
    for (const auto& v : delta.a) comp = std::max(comp, std::abs(v));
    out.completeness = comp;
    return out;
}

// ---------------------------------------------------------------------------
// Communication game (classical, exact)
// ---------------------------------------------------------------------------

GameResult game_best_classical(
    i64 p, int n, const std::function<field::FpVector(u64, u64)>& g,
    const std::vector<int>& leak, const std::vector<Rat>& pmf) {
    field::FieldSpec{p};
    if (n < 2 || n % 2 != 0) throw DomainError("game: n must be even and >= 2");
    double size = std::pow(static_cast<double>(p), n) *
                  std::pow(static_cast<double>(p), n / 2);
    if (size > static_cast<double>(1 << 24))
        throw ResourceError("game: p^n * p^{n/2} exceeds 2^24");
    const u64 dx = upow(p, n);
    const u64 seeds = upow(p, n / 2);
    if (leak.size() != dx || pmf.size() != dx)
        throw DomainError("game: leak and pmf must have p^n entries");

    int ne = 0;
    for (int e : leak) {
        if (e < 0) throw DomainError("game: leak values must be >= 0");
        ne = std::max(ne, e + 1);
    }

    // cache x vectors once
    std::vector<field::FpVector> xs;
    xs.reserve(dx);
    for (u64 x = 0; x < dx; ++x)
        xs.push_back(field::index_to_vector(p, static_cast<std::size_t>(n), x));

    Rat win(0);
    Rat inv_seeds = Rat(1) / Rat(static_cast<unsigned long>(seeds));
    for (u64 y = 0; y < seeds; ++y) {
        // best response per e: mass of the best (y', b) bucket
        std::vector<Rat> best(static_cast<std::size_t>(ne), Rat(0));
        std::vector<Rat> bucket(static_cast<std::size_t>(ne) *
                                    static_cast<std::size_t>(p),
                                Rat(0));
        for (u64 yp = 0; yp < seeds; ++yp) {
            if (yp == y) continue;
            field::FpVector gv = g(y, yp);
            field::check_vector(gv, p, static_cast<std::size_t>(n));
            for (auto& v : bucket) v = 0;
            for (u64 x = 0; x < dx; ++x) {
                if (pmf[x] == 0) continue;
                i64 b = field::inner_product(xs[x], gv);
                bucket[static_cast<std::size_t>(leak[x]) * p +
                       static_cast<std::size_t>(b)] += pmf[x];
            }
            for (int e = 0; e < ne; ++e)
                for (i64 b = 0; b < p; ++b) {
                    const Rat& v =
                        bucket[static_cast<std::size_t>(e) * p +
                               static_cast<std::size_t>(b)];
                    if (v > best[static_cast<std::size_t>(e)])
                        best[static_cast<std::size_t>(e)] = v;
                }
        }
        for (const Rat& v : best) win += v * inv_seeds;
    }

    Rat p_guess(0);
    for (int e = 0; e < ne; ++e) {
        Rat m(0);
        for (u64 x = 0; x < dx; ++x)
            if (leak[x] == e && pmf[x] > m) m = pmf[x];
        p_guess += m;
    }

    GameResult out;
    out.win = win;
    out.p_guess = p_guess;
    out.excess = rat_double(win) - 1.0 / static_cast<double>(p);
    out.bound_rhs = std::sqrt(2.0 * std::pow(static_cast<double>(p), n / 2.0) *
                              rat_double(p_guess));
    out.bound_ok = out.excess <= out.bound_rhs + 1e-12;
    return out;
}

// ---------------------------------------------------------------------------
// JSON import/export
// ---------------------------------------------------------------------------

std::string cq_state_to_json(const CqState& s) {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["type"] = "cq";
    j["d_x"] = s.d_x;
    j["d_e"] = s.d_e;
    nlohmann::ordered_json blocks = nlohmann::ordered_json::array();
    for (const auto& b : s.blocks) {
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (int i = 0; i < b.n; ++i) {
            nlohmann::ordered_json row = nlohmann::ordered_json::array();
            for (int k = 0; k < b.n; ++k)
                row.push_back({b.at(i, k).real(), b.at(i, k).imag()});
            rows.push_back(std::move(row));
        }
        blocks.push_back(std::move(rows));
    }
    j["blocks"] = std::move(blocks);
    return j.dump(2) + "\n";
}

CqState cq_state_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (!j.contains("schema") || j["schema"].get<int>() != 1)
        throw DomainError("cq_state_from_json: unsupported schema");
    int d_x = j.at("d_x").get<int>();
    int d_e = j.at("d_e").get<int>();
    std::vector<CMat> blocks;
    for (const auto& bj : j.at("blocks")) {
        CMat b(d_e);
        for (int i = 0; i < d_e; ++i)
            for (int k = 0; k < d_e; ++k) {
                const auto& cell = bj.at(static_cast<std::size_t>(i))
                                       .at(static_cast<std::size_t>(k));
                b.at(i, k) = Cplx{cell.at(0).get<double>(), cell.at(1).get<double>()};
            }
        blocks.push_back(std::move(b));
    }
    return make_cq(d_x, d_e, std::move(blocks));
}

} // namespace nmext::cq
