#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "nmext/errors.hpp"
#include "nmext/field.hpp"
#include "nmext/rational.hpp"
#include "nmext/rng.hpp"

namespace nmext::cq {

using Cplx = std::complex<double>;
using i64 = std::int64_t;
using u64 = std::uint64_t;

// ============================================================================
// Dense complex matrices (plumbing)
// ============================================================================

struct CMat {
    int n = 0;
    std::vector<Cplx> a; // row-major

    CMat() = default;
    explicit CMat(int n_) : n(n_), a(static_cast<std::size_t>(n_) * n_, Cplx{0, 0}) {}
    static CMat identity(int n_);

    Cplx& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    const Cplx& at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

CMat add(const CMat& x, const CMat& y);
CMat sub(const CMat& x, const CMat& y);
CMat mul(const CMat& x, const CMat& y);
CMat scale(Cplx c, const CMat& x);
CMat dagger(const CMat& x);
Cplx trace(const CMat& x);
double fro_norm(const CMat& x);
double max_asymmetry(const CMat& x); // max |x - x^dagger| entry

// Hermitian carrier: construction symmetrizes (M + M^dagger)/2 and rejects
// inputs with asymmetry above 1e-12.
class HermitianMatrix {
public:
    explicit HermitianMatrix(CMat m);
    static HermitianMatrix diagonal(const std::vector<double>& d);

    const CMat& mat() const { return m_; }
    int dim() const { return m_.n; }

private:
    CMat m_;
};

struct EighResult {
    std::vector<double> vals; // descending
    CMat vecs;                // column j is the eigenvector of vals[j]
    int sweeps = 0;
};

// Cyclic complex Jacobi. Terminates when the off-diagonal Frobenius norm
// drops below 1e-12; NumericalError after 100 sweeps; dim <= 64.
EighResult eigh(const HermitianMatrix& h);

double trace_distance(const HermitianMatrix& rho, const HermitianMatrix& sigma);
// 1/2 * trace-norm of an arbitrary Hermitian difference
double half_trace_norm(const CMat& h);

// Generalized inverse square root on the support; eigenvalues < 1e-12 are
// treated as kernel.
CMat inv_sqrt_psd(const CMat& rho);

// ============================================================================
// Classical-quantum states
// ============================================================================

// rho_XE = sum_x |x><x| (x) block_x. Construction validates hermiticity
// (asymmetry <= 1e-12), positivity (min eigenvalue >= -1e-10) and
// normalization (sum of traces = 1 +- 1e-10).
struct CqState {
    int d_x = 0, d_e = 0;
    std::vector<CMat> blocks;

    CMat rho_e() const;
    std::vector<double> probs() const;
};

CqState make_cq(int d_x, int d_e, std::vector<CMat> blocks);

// Two classical registers: rho_{X0 X E} with blocks indexed (x0, x).
// The first register is the one the nonuniform lemmas compare to uniform.
struct CcqState {
    int d_first = 0, d_second = 0, d_e = 0;
    std::vector<CMat> blocks; // index first * d_second + second

    const CMat& block(int i, int j) const {
        return blocks[static_cast<std::size_t>(i) * d_second + j];
    }
    CMat rho_e() const;
    CqState trace_out_first() const; // cq state over the second register
};

CcqState make_ccq(int d_first, int d_second, int d_e, std::vector<CMat> blocks);

// Reproducible random states: blocks A_x A_x^dagger with iid standard complex
// Gaussian A_x, globally normalized to unit trace.
CqState random_cq_state(RngStream& rng, int d_x, int d_e);
CcqState random_ccq_state(RngStream& rng, int d_first, int d_second, int d_e);

// Random classical (diagonal) states carrying their exact pmf, so the
// rational oracle and the matrix path can be compared on identical inputs.
struct ClassicalCq {
    CqState state;
    std::vector<std::vector<Rat>> pmf; // [x][e]
};
struct ClassicalCcq {
    CcqState state;
    std::vector<std::vector<std::vector<Rat>>> pmf; // [x0][x][e]
};
ClassicalCq random_classical_cq(RngStream& rng, int d_x, int d_e);
ClassicalCcq random_classical_ccq(RngStream& rng, int d_first, int d_second, int d_e);

// ============================================================================
// Collision probability and its identities
// ============================================================================

struct CollisionRecord {
    double gamma;             // Gamma_c(rho | rho_E)
    double baseline;          // 1/d_x  (cq)  or  (1/d_first) Gamma_c of the marginal (ccq)
    double identity_residual; // |direct expansion - (gamma - baseline)|
    double witness_eig_min;   // spectrum of rho_E^{-1/2} rho rho_E^{-1/2} ...
    double witness_eig_max;   // ... which the eigenvalue lemmas put in [0, 1]
};

// Gamma_c = Tr[(rho_XE (I (x) rho_E^{-1/2}))^2]; the record carries the
// residual of the trace-to-collision identity and the witness spectrum.
CollisionRecord collision_prob(const CqState& s);
CollisionRecord collision_prob(const CcqState& s);

// ============================================================================
// Min-entropy
// ============================================================================

struct ClassicalMinEntropy {
    double h_min;
    double p_guess; // sum_e max_x p(x, e)
};
// Requires diagonal blocks (DomainError otherwise).
ClassicalMinEntropy min_entropy_classical(const CqState& s);

struct GuessBounds {
    double p_lower; // pretty-good measurement success
    double p_upper; // max_x ||rho_E^{-1/2} rho^x rho_E^{-1/2}||_inf
    double hmin_lower, hmin_upper;
};
GuessBounds min_entropy_quantum(const CqState& s);

// ============================================================================
// XOR lemmas (uniform variant on CqState, nonuniform on CcqState)
// ============================================================================

// Uniform: labels of s are F_p^t tuples (index = sum a_i p^i); requires
// d_x = p^t. epsilon_a = dist(Z = <a, X> from uniform given E), a != 0.
double xor_premise_distance(const CqState& s, i64 p, int t, const field::FpVector& a);
// Nonuniform: first register is X0 (dim p), second is X (dim p^t);
// Z = X0 + <a, X>, any a.
double xor_premise_distance(const CcqState& s, i64 p, int t, const field::FpVector& a);

struct LemmaCheck {
    double lhs = 0, rhs = 0, margin = 0; // margin = rhs - lhs
    double eps = 0;                      // max premise distance used for rhs
};

// lhs = dist(rho_XE, U_X (x) rho_E); rhs = p^{t/2}/sqrt(2) * sqrt(max_{a!=0} eps_a)
LemmaCheck check_xor_lemma(const CqState& s, i64 p, int t);
// lhs = dist(rho_{X0 X E}, U_{X0} (x) rho_XE); rhs = p^{(t+1)/2}/sqrt(2) * sqrt(max_a eps_a)
LemmaCheck check_xor_lemma(const CcqState& s, i64 p, int t);

// Exact-rational classical oracle for the same lemmas. The square-root bound
// is checked exactly as 2*lhs^2 <= p^t * eps (resp. p^{t+1} * eps).
struct RatLemmaCheck {
    Rat lhs;
    Rat eps;
    bool holds_exact = false;
    double lhs_d = 0, rhs_d = 0;
};
RatLemmaCheck check_xor_lemma_classical(i64 p, int t,
                                        const std::vector<std::vector<Rat>>& pmf);
RatLemmaCheck check_xor_lemma_classical(
    i64 p, int t, const std::vector<std::vector<std::vector<Rat>>>& pmf);

// ============================================================================
// Collision sandwich (uniform variant on CqState, nonuniform on CcqState)
// ============================================================================

struct SandwichCheck {
    double eps;   // trace-distance premise
    double mid;   // Gamma_c - baseline
    double lower; // 4 eps^2 / d   (d = d_x, or d_first*d_second nonuniform)
    double upper; // 2 eps (1 - 1/d_x)
    double slack_lower, slack_upper;
    double identity_residual;
    double gamma;
};
SandwichCheck check_collision_sandwich(const CqState& s);
SandwichCheck check_collision_sandwich(const CcqState& s);

// Exact-rational classical sandwich on a pmf [x][e] (uniform variant).
struct RatSandwichCheck {
    Rat eps, mid, lower, upper;
    bool holds_exact = false;
};
RatSandwichCheck check_collision_sandwich_classical(
    const std::vector<std::vector<Rat>>& pmf);

// ============================================================================
// Distance-to-guessing measurement
// ============================================================================

struct MeasurementCheck {
    double eps;          // dist(rho_XE, U_X (x) rho_E)
    double achieved;     // success probability of the constructed POVM
    double predicted;    // 1/d_x + eps/d_x (the lemma proves equality)
    double povm_min_eig; // min eigenvalue over all POVM elements
    double completeness; // max entry of |sum_x M_x - I|
    std::vector<CMat> povm;
};
MeasurementCheck guess_measurement_from_distance(const CqState& s);

// ============================================================================
// Communication game (classical slice, exact)
// ============================================================================

// Win condition: referee draws y uniform; Bob (seeing y and e = leak(x))
// outputs (y', b) with y' != y; the pair wins iff <x, g(y, y')> = b.
// Best classical strategy maximizes per (y, e); all arithmetic exact.
struct GameResult {
    Rat win;
    Rat p_guess;      // sum_e max over the leak fiber of pmf
    double excess;    // win - 1/p
    double bound_rhs; // sqrt(2 p^{n/2} p_guess)
    bool bound_ok;    // excess <= bound_rhs + 1e-12
};
GameResult game_best_classical(
    i64 p, int n, const std::function<field::FpVector(u64, u64)>& g,
    const std::vector<int>& leak, const std::vector<Rat>& pmf);

// ============================================================================
// JSON import/export for states
// ============================================================================

std::string cq_state_to_json(const CqState& s);
CqState cq_state_from_json(const std::string& text);

} // namespace nmext::cq
