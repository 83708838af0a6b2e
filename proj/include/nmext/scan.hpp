#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nmext/protocol.hpp"
#include "nmext/rational.hpp"
#include "nmext/rng.hpp"

namespace nmext::scan {

using i64 = std::int64_t;
using u64 = std::uint64_t;

// ============================================================================
// Non-malleability distance scan (classical slice)
// ============================================================================
//
// For each deterministic fixed-point-free strategy f (one map per side-info
// value e), the scanned quantity is the exact statistical distance
//   1/2 || sigma_{Z Z' Y Y' E} - U_Z (x) sigma_{Z' Y Y' E} ||_1
// with Y uniform, Y' = f_e(Y), Z = nmExt(X, Y), Z' = nmExt(X, Y').
// Strategies are encoded base (s-1): digit at (e, y) picks
// y' = (y + 1 + digit) mod s, which is never y.

// digits -> per-e maps f[e][y] = y'
std::vector<std::vector<u64>> decode_strategy(u64 index, u64 s, int e_values);

// structured path: builds the (z, z', y, e) tables through the extractor
// machinery
Rat nm_distance_structured(i64 p, int n, const proto::ClassicalSource& source,
                           const std::vector<std::vector<u64>>& f);

// independent oracle: direct per-cell counting in plain modular arithmetic,
// no shared field/extractor code; n = 2 only (seeds are single symbols)
Rat nm_distance_oracle(i64 p, int n, const proto::ClassicalSource& source,
                       const std::vector<std::vector<u64>>& f);

struct ScanRow {
    u64 f_index = 0; // strategy index, or trial number when sampled
    Rat distance;
};

struct ScanResult {
    std::vector<ScanRow> rows;
    Rat max_distance, mean_distance;
    double strategies_total = 0; // (s-1)^(s * |E|)
    bool sampled = false;
    u64 sample_size = 0;
    double hmin = 0;           // exact classical H_min(X|E) of the source
    double threshold_bits = 0; // nmExt theorem threshold at eps (reported)
};

// max_strategies = 0: exhaustive (ResourceError with the computed size when
// the strategy count exceeds 2^24); otherwise a seeded sample of that size.
ScanResult nm_distance_scan(i64 p, int n, const proto::ClassicalSource& source,
                            u64 max_strategies, u64 seed,
                            double eps_for_threshold = 0.125);

// ============================================================================
// Lemma sweep drivers (shared by the CLI and the acceptance gate)
// ============================================================================

struct SweepRow {
    std::string case_id;
    std::string variant; // uniform | nonuniform
    double lhs = 0, rhs = 0, margin = 0;
};

struct SweepSummary {
    std::vector<SweepRow> rows;
    u64 cases = 0;         // states examined
    u64 violations = 0;    // margin < -1e-9, failed exact checks, bad residuals
    double min_margin = 0;
    double max_residual = 0; // collision-identity residual (sandwich only)
    double max_rat_gap = 0;  // matrix path vs exact-rational oracle, diagonal states
};

// XOR lemma sweep over p in {2,3,5}, t in {1,2}, d_E in {2,3,4}; every 4th
// state is diagonal and doubles as a rational-oracle agreement case.
SweepSummary xor_sweep(u64 seed, u64 cases_per_config);

// Collision sandwich + trace-to-collision identities + Gamma_c <= 1.
SweepSummary sandwich_sweep(u64 seed, u64 cases_per_config);

// ============================================================================
// Communication-game scan (guessing-bound contrapositive, classical slice)
// ============================================================================

struct GameScanResult {
    u64 functions = 0;   // leak functions examined
    bool sampled = false;
    u64 sample_size = 0; // random functions beyond the structured family
    u64 checks = 0;      // (function, a) bound checks
    u64 violations = 0;  // excess > rhs + 1e-12
    double worst_slack = 0; // min over checks of rhs + 1e-12 - excess
    Rat max_win;
    u64 argmax_function = 0;
    i64 argmax_a = 1;
    u64 cross_checked = 0; // functions re-run through game_best_classical
    bool cross_ok = true;  // exact agreement of the integer fast path
};

// X uniform over F_p^n, E = leak(X) with |E| <= p. sample = 0: exhaustive
// over all p^{p^n} maps (ResourceError when that exceeds 2^24); sample > 0:
// all affine leaks <v,x> + c plus `sample` seeded random maps.
GameScanResult game_scan(i64 p, int n, u64 sample, u64 seed);

} // namespace nmext::scan
