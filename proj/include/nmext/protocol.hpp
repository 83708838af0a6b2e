#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nmext/errors.hpp"
#include "nmext/extractor.hpp"
#include "nmext/field.hpp"
#include "nmext/mac.hpp"
#include "nmext/rational.hpp"
#include "nmext/rng.hpp"

namespace nmext::proto {

using field::FpVector;
using field::i64;
using u64 = std::uint64_t;
using u8 = std::uint8_t;

// ============================================================================
// Parameters
// ============================================================================

enum class Mode { dw, one_round };

// dw:        X in F_p^n, seed Y_A in F_p^{n/2}, MAC key from Z = nmExt(X, Y_A)
//            (t tag bits, d2/t message blocks), R = Ext(X, Y_B) with Y_B a
//            uniform d2-bit string, output m bits.
// one_round: X = (X1, X2) in F_{2^{n/2}}^2 (X1 = low n/2 bits of the index),
//            Z = Y X1 + X2; W = first v bits, R = next m bits.
struct ProtocolParams {
    Mode mode = Mode::dw;
    i64 p = 3;
    int n = 2;
    int d2 = 4;   // extractor seed bits (dw)
    int t = 2;    // tag bits (dw)
    int m = 1;    // output key bits
    int v = 0;    // truncation bits (one_round only)
    double k = 0; // claimed min-entropy, reporting only
    Rat eps_mac = Rat(0), eps_ext = Rat(0), eps_nmext = Rat(0);

    void validate() const; // hard shape checks; DomainError
    // soft diagnostics (key bias, degenerate lengths, parameter relations);
    // degenerate sets run and report instead of erroring
    std::vector<std::string> advisories() const;

    int half() const { return n / 2; }
    u64 x_space() const;   // p^n (dw) or 2^n (one_round)
    u64 seed_space() const; // p^{n/2} (dw) or 2^{n/2} (one_round)
};

// ============================================================================
// Transcripts
// ============================================================================

// One-round runs reuse the second-message slots: (yb, w) carry Alice's single
// message (Y packed as n/2 bits, W as v bits) and ya/ya_prime stay empty.
// key_derived marks the unconditional output (Bob's KeyDerived in dw, Alice's
// in one_round); key_confirmed marks the verified one.
struct TranscriptRecord {
    std::optional<FpVector> ya, ya_prime;
    std::optional<u64> yb, w, yb_prime, w_prime;
    std::optional<u64> r_a, r_b; // m-bit keys, LSB-first; nullopt = bottom
    bool key_derived = false;
    bool key_confirmed = false;

    bool operator==(const TranscriptRecord&) const = default;
};

std::string transcript_to_json(const TranscriptRecord& r);

// ============================================================================
// Adversarial channel (classical, pluggable)
// ============================================================================

struct AdvContext {
    int e = 0;       // classical side information
    u64 memory = 0;  // carried from tamper1 to tamper2
    RngStream* rng = nullptr;       // null in exhaustive mode
    std::optional<u64> post_key;    // post-application: R_B (dw) / R_A (one_round)

    // AdversaryError when no stream is available (exhaustive runs are
    // restricted to deterministic strategies)
    RngStream& rand();
};

using Tamper1 = std::function<FpVector(const FpVector& ya, AdvContext&)>;
using Tamper2 =
    std::function<std::pair<u64, u64>(u64 yb, u64 w, AdvContext&)>;

struct AdversaryStrategy {
    std::string name = "identity";
    Tamper1 tamper1; // empty = pass through
    Tamper2 tamper2; // empty = pass through
};

AdversaryStrategy adversary_identity();
// ya index shifted by c mod p^{n/2}; fixed-point free for 0 < c < p^{n/2}
AdversaryStrategy adversary_seed_shift(u64 c);
// second message XORed with fixed masks
AdversaryStrategy adversary_xor2(u64 y_mask, u64 w_mask);
// second message replaced by constants
AdversaryStrategy adversary_replace2(u64 y_bits, u64 w_bits);
// "identity" | "seed-shift:C" | "xor2:Y,W" | "replace2:Y,W"
AdversaryStrategy parse_adversary(const std::string& text);

// ============================================================================
// Protocol DW state machine
// ============================================================================

struct AliceState {
    ProtocolParams params;
    FpVector x;
    FpVector ya;
    i64 z = 0; // nmExt(X, Y_A)
};

std::pair<AliceState, FpVector> alice_round1(const ProtocolParams& pp,
                                             const FpVector& x, RngStream& rng);

struct BobResult {
    u64 yb = 0;  // d2 bits
    u64 w = 0;   // t bits
    u64 r_b = 0; // m bits; never bottom
};

BobResult bob_respond(const ProtocolParams& pp, const FpVector& x,
                      const FpVector& ya_prime, RngStream& rng);

struct AliceOutcome {
    std::optional<u64> r_a;
    bool key_confirmed = false;
};

AliceOutcome alice_finish(const AliceState& st, u64 yb_prime, u64 w_prime);

// building blocks, exposed for the oracles:
// Ext(X, Y_B): x1 = low d2 bits of (index mod 2^{2 d2}), x2 = next d2 bits,
// z = y x1 + x2 over F_{2^{d2}}, output = first m bits of z
u64 dw_ext(const ProtocolParams& pp, u64 x_index, u64 yb);
// MAC(z, Y_B) with the d2 bits of Y_B split into d2/t blocks
u64 dw_tag(const ProtocolParams& pp, i64 z, u64 yb);

// ============================================================================
// Full runs
// ============================================================================

enum class RunMode { pre_application, post_application };

// deterministic cores used by the exhaustive experiment; adv_rng may be null
TranscriptRecord run_dw_fixed(const ProtocolParams& pp, u64 x_index, int e,
                              u64 ya_index, u64 yb_bits,
                              const AdversaryStrategy& adv, RunMode mode,
                              RngStream* adv_rng);
TranscriptRecord run_one_round_fixed(const ProtocolParams& pp, u64 x_index,
                                     int e, u64 y_bits,
                                     const AdversaryStrategy& adv, RunMode mode,
                                     RngStream* adv_rng);

// ============================================================================
// Sources (explicit classical joint pmfs over (x, e))
// ============================================================================

struct SourceAtom {
    u64 x = 0;
    int e = 0;
    Rat prob;
};

struct ClassicalSource {
    std::string name = "custom";
    u64 x_space = 0;
    int e_space = 1;
    std::vector<SourceAtom> atoms; // probs sum to 1 exactly
};

ClassicalSource source_uniform(u64 x_space);
ClassicalSource source_constant(u64 x_space, u64 x0);
// uniform over the low half of the index space, [0, ceil(x_space/2))
ClassicalSource source_half_support(u64 x_space);
// exact classical H_min(X|E) = -log2 sum_e max_x P(x, e)
double source_min_entropy(const ClassicalSource& s);

// sampled runs (rng draws the atom, the seeds and feeds the adversary)
TranscriptRecord run_dw(const ProtocolParams& pp, const ClassicalSource& source,
                        const AdversaryStrategy& adv, RngStream& rng,
                        RunMode mode = RunMode::pre_application);
TranscriptRecord run_one_round(const ProtocolParams& pp, const FpVector& x1,
                               const FpVector& x2, const AdversaryStrategy& adv,
                               RngStream& rng,
                               RunMode mode = RunMode::pre_application);

// ============================================================================
// Security experiment
// ============================================================================

enum class ExperimentMode { exhaustive, monte_carlo };

struct SecurityReport {
    ExperimentMode mode = ExperimentMode::exhaustive;
    u64 trials = 0; // atom-draw count (exhaustive) or MC trials

    Rat correctness;     // Pr[R_A = R_B != bottom]
    Rat robustness_pre;  // Pr[R_A != R_B, neither bottom], pre-application
    Rat robustness_post; // same flavor with the key handed to tamper2

    // exact statistical distance of (R, V, E') from (purify(R), V, E'),
    // exhaustive mode only
    bool extraction_available = false;
    Rat extraction_a;
    Rat extraction_b;

    Rat adversary_error_mass; // weight of aborted runs, tallied separately
    Rat forgery_attempt_mass; // tamper2 changed the authenticated message
    Rat forgery_success_mass; // ... and the receiver still confirmed

    Rat eps_sum;              // eps_mac + eps_ext + eps_nmext, constant-1 aggregate
    double source_hmin = 0;
    double threshold_bits = 0; // nmExt entropy threshold at eps_nmext (dw)
    std::vector<std::string> advisories;
};

std::string security_report_to_json(const SecurityReport& r);

// Exhaustive mode enumerates every (atom, protocol randomness) pair exactly
// (x_space * e_space * seeds <= 2^24, deterministic adversaries only);
// monte_carlo estimates correctness/robustness from `trials` seeded trials
// and leaves the extraction distances unset.
SecurityReport security_experiment(const ProtocolParams& pp,
                                   const ClassicalSource& source,
                                   const AdversaryStrategy& adv,
                                   ExperimentMode mode, u64 trials,
                                   u64 master_seed);

// ============================================================================
// Wire format (version byte 0x01)
// ============================================================================

std::vector<u8> wire_encode_message1(const FpVector& ya);
FpVector wire_decode_message1(i64 p, const std::vector<u8>& bytes);
// yb_bits bits of yb packed LSB-first, then w_bits bits of w, zero padded
std::vector<u8> wire_encode_message2(u64 yb, int yb_bits, u64 w, int w_bits);
std::pair<u64, u64> wire_decode_message2(const std::vector<u8>& bytes,
                                         int yb_bits, int w_bits);

} // namespace nmext::proto
