#include "nmext/scan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "nmext/cq.hpp"
#include "nmext/extractor.hpp"
#include "nmext/field.hpp"

namespace nmext::scan {

namespace {

u64 upow(i64 base, int e) {
    u64 r = 1;
    for (int i = 0; i < e; ++i) r *= static_cast<u64>(base);
    return r;
}

std::string fmt_size(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string pad4(u64 v) {
    std::string s = std::to_string(v);
    return std::string(s.size() >= 4 ? 0 : 4 - s.size(), '0') + s;
}

} // namespace

// ---------------------------------------------------------------------------
// Strategy encoding
// ---------------------------------------------------------------------------

std::vector<std::vector<u64>> decode_strategy(u64 index, u64 s, int e_values) {
    std::vector<std::vector<u64>> f(static_cast<std::size_t>(e_values),
                                    std::vector<u64>(s));
    for (int e = 0; e < e_values; ++e)
        for (u64 y = 0; y < s; ++y) {
            u64 digit = index % (s - 1);
            index /= (s - 1);
            f[static_cast<std::size_t>(e)][y] = (y + 1 + digit) % s;
        }
    return f;
}

// ---------------------------------------------------------------------------
// Structured path
// ---------------------------------------------------------------------------

Rat nm_distance_structured(i64 p, int n, const proto::ClassicalSource& source,
                           const std::vector<std::vector<u64>>& f) {
    ext::NmExtParams P(p, n);
    const u64 s = upow(p, n / 2);
    const u64 dx = upow(p, n);
    if (source.x_space != dx) throw DomainError("nm-scan: source x_space mismatch");
    if (f.size() != static_cast<std::size_t>(source.e_space))
        throw DomainError("nm-scan: strategy does not cover all side-info values");

    // z_table[y][x]
    std::vector<std::vector<i64>> zt(s, std::vector<i64>(dx));
    for (u64 y = 0; y < s; ++y) {
        field::FpVector yv =
            field::index_to_vector(p, static_cast<std::size_t>(n / 2), y);
        for (u64 x = 0; x < dx; ++x)
            zt[y][x] = ext::nmext_eval(
                P, field::index_to_vector(p, static_cast<std::size_t>(n), x), yv);
    }

    Rat total(0);
    const std::size_t pp = static_cast<std::size_t>(p);
    std::vector<Rat> joint(pp * pp), marg(pp);
    for (int e = 0; e < source.e_space; ++e) {
        for (u64 y = 0; y < s; ++y) {
            u64 yp = f[static_cast<std::size_t>(e)][y];
            if (yp == y || yp >= s)
                throw DomainError("nm-scan: strategy is not fixed-point free");
            std::fill(joint.begin(), joint.end(), Rat(0));
            std::fill(marg.begin(), marg.end(), Rat(0));
            for (const auto& atom : source.atoms) {
                if (atom.e != e || atom.prob == 0) continue;
                i64 z = zt[y][atom.x];
                i64 z2 = zt[yp][atom.x];
                joint[static_cast<std::size_t>(z) * pp + static_cast<std::size_t>(z2)] +=
                    atom.prob;
                marg[static_cast<std::size_t>(z2)] += atom.prob;
            }
            for (std::size_t z = 0; z < pp; ++z)
                for (std::size_t z2 = 0; z2 < pp; ++z2)
                    total += rat_abs(joint[z * pp + z2] -
                                     marg[z2] / Rat(static_cast<unsigned long>(p)));
        }
    }
    return total / (2 * Rat(static_cast<unsigned long>(s)));
}

// ---------------------------------------------------------------------------
// Independent oracle (n = 2: seeds are single symbols, plain mod-p arithmetic)
// ---------------------------------------------------------------------------

Rat nm_distance_oracle(i64 p, int n, const proto::ClassicalSource& source,
                       const std::vector<std::vector<u64>>& f) {
    if (n != 2) throw DomainError("nm-scan oracle: n = 2 only");
    if (p < 3) throw DomainError("nm-scan oracle: odd prime required");
    const u64 s = static_cast<u64>(p);
    if (source.x_space != s * s) throw DomainError("nm-scan oracle: x_space mismatch");

    // nmExt(x, y) = x1*y + x2*y^2 mod p, x = x1 + p*x2
    auto nm = [p](u64 x, u64 y) -> i64 {
        i64 x1 = static_cast<i64>(x % static_cast<u64>(p));
        i64 x2 = static_cast<i64>(x / static_cast<u64>(p));
        i64 yy = static_cast<i64>(y);
        return (x1 * yy + ((x2 * yy) % p) * yy) % p;
    };

    Rat total(0);
    const Rat inv_p = Rat(1) / Rat(static_cast<unsigned long>(p));
    for (int e = 0; e < source.e_space; ++e) {
        for (u64 y = 0; y < s; ++y) {
            u64 yp = f[static_cast<std::size_t>(e)][y];
            for (i64 z = 0; z < p; ++z) {
                for (i64 z2 = 0; z2 < p; ++z2) {
                    Rat cell(0), column(0);
                    for (const auto& atom : source.atoms) {
                        if (atom.e != e) continue;
                        if (nm(atom.x, yp) != z2) continue;
                        column += atom.prob;
                        if (nm(atom.x, y) == z) cell += atom.prob;
                    }
                    total += rat_abs(cell - column * inv_p);
                }
            }
        }
    }
    return total / (2 * Rat(static_cast<unsigned long>(s)));
}

// ---------------------------------------------------------------------------
// Scan driver
// ---------------------------------------------------------------------------

ScanResult nm_distance_scan(i64 p, int n, const proto::ClassicalSource& source,
                            u64 max_strategies, u64 seed,
                            double eps_for_threshold) {
    ext::NmExtParams P(p, n);
    const u64 s = upow(p, n / 2);
    const int ev = source.e_space;
    const double total = std::pow(static_cast<double>(s - 1),
                                  static_cast<double>(s) * ev);

    ScanResult out;
    out.strategies_total = total;
    out.hmin = proto::source_min_entropy(source);
    out.threshold_bits = P.threshold_bits(eps_for_threshold);

    if (max_strategies == 0) {
        if (total > static_cast<double>(u64{1} << 24))
            throw ResourceError("nm-scan: " + fmt_size(total) +
                                " strategies exceed 2^24; use a sample");
        const u64 count = static_cast<u64>(total);
        for (u64 idx = 0; idx < count; ++idx) {
            auto f = decode_strategy(idx, s, ev);
            out.rows.push_back({idx, nm_distance_structured(p, n, source, f)});
        }
    } else {
        out.sampled = true;
        out.sample_size = max_strategies;
        RngStream rng(seed, "nm-scan");
        for (u64 trial = 0; trial < max_strategies; ++trial) {
            std::vector<std::vector<u64>> f(static_cast<std::size_t>(ev),
                                            std::vector<u64>(s));
            for (auto& per_e : f)
                for (u64 y = 0; y < s; ++y)
                    per_e[y] = (y + 1 + rng.below(s - 1)) % s;
            out.rows.push_back({trial, nm_distance_structured(p, n, source, f)});
        }
    }

    Rat sum(0);
    for (const auto& r : out.rows) {
        if (r.distance > out.max_distance) out.max_distance = r.distance;
        sum += r.distance;
    }
    if (!out.rows.empty())
        out.mean_distance = sum / Rat(static_cast<unsigned long>(out.rows.size()));
    return out;
}

// ---------------------------------------------------------------------------
// XOR lemma sweep
// ---------------------------------------------------------------------------

namespace {

constexpr double kMarginTol = -1e-9;
constexpr double kAgreeTol = 1e-9;

void push_margin_row(SweepSummary& sum, std::string case_id, std::string variant,
                     double lhs, double rhs) {
    double margin = rhs - lhs;
    if (margin < kMarginTol) ++sum.violations;
    if (sum.rows.empty() || margin < sum.min_margin) sum.min_margin = margin;
    sum.rows.push_back({std::move(case_id), std::move(variant), lhs, rhs, margin});
}

void note_gap(SweepSummary& sum, double gap) {
    sum.max_rat_gap = std::max(sum.max_rat_gap, gap);
    if (gap > kAgreeTol) ++sum.violations;
}

} // namespace

SweepSummary xor_sweep(u64 seed, u64 cases_per_config) {
    SweepSummary sum;
    const i64 primes[] = {2, 3, 5};
    const int ts[] = {1, 2};
    const int des[] = {2, 3, 4};
    for (i64 p : primes) {
        for (int t : ts) {
            const int dx = static_cast<int>(upow(p, t));
            for (u64 c = 0; c < cases_per_config; ++c) {
                const int de = des[c % 3];
                std::string tag = "p" + std::to_string(p) + "t" + std::to_string(t) +
                                  "-" + pad4(c);
                // uniform variant on a cq state
                {
                    RngStream rng(seed, "xor-u-" + tag);
                    ++sum.cases;
                    if (c % 4 == 3) {
                        cq::ClassicalCq cs = cq::random_classical_cq(rng, dx, de);
                        cq::LemmaCheck mat = cq::check_xor_lemma(cs.state, p, t);
                        cq::RatLemmaCheck rl =
                            cq::check_xor_lemma_classical(p, t, cs.pmf);
                        if (!rl.holds_exact) ++sum.violations;
                        note_gap(sum, std::abs(mat.lhs - rl.lhs_d));
                        note_gap(sum, std::abs(mat.eps - rat_double(rl.eps)));
                        push_margin_row(sum, "xor-u-" + tag + "-diag", "uniform",
                                        mat.lhs, mat.rhs);
                    } else {
                        cq::CqState st = cq::random_cq_state(rng, dx, de);
                        cq::LemmaCheck mat = cq::check_xor_lemma(st, p, t);
                        push_margin_row(sum, "xor-u-" + tag, "uniform", mat.lhs,
                                        mat.rhs);
                    }
                }
                // nonuniform variant on a ccq state
                {
                    RngStream rng(seed, "xor-n-" + tag);
                    ++sum.cases;
                    if (c % 4 == 3) {
                        cq::ClassicalCcq cs = cq::random_classical_ccq(
                            rng, static_cast<int>(p), dx, de);
                        cq::LemmaCheck mat = cq::check_xor_lemma(cs.state, p, t);
                        cq::RatLemmaCheck rl =
                            cq::check_xor_lemma_classical(p, t, cs.pmf);
                        if (!rl.holds_exact) ++sum.violations;
                        note_gap(sum, std::abs(mat.lhs - rl.lhs_d));
                        note_gap(sum, std::abs(mat.eps - rat_double(rl.eps)));
                        push_margin_row(sum, "xor-n-" + tag + "-diag", "nonuniform",
                                        mat.lhs, mat.rhs);
                    } else {
                        cq::CcqState st = cq::random_ccq_state(
                            rng, static_cast<int>(p), dx, de);
                        cq::LemmaCheck mat = cq::check_xor_lemma(st, p, t);
                        push_margin_row(sum, "xor-n-" + tag, "nonuniform", mat.lhs,
                                        mat.rhs);
                    }
                }
            }
        }
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Sandwich sweep
// ---------------------------------------------------------------------------

SweepSummary sandwich_sweep(u64 seed, u64 cases_per_config) {
    SweepSummary sum;
    constexpr double kResidTol = 1e-9;

    auto note_common = [&sum](const std::string& id, const std::string& variant,
                              const cq::SandwichCheck& sw) {
        push_margin_row(sum, id + "-lower", variant, sw.lower, sw.mid);
        push_margin_row(sum, id + "-upper", variant, sw.mid, sw.upper);
        push_margin_row(sum, id + "-gamma", variant, sw.gamma, 1.0);
        sum.max_residual = std::max(sum.max_residual, sw.identity_residual);
        if (sw.identity_residual > kResidTol) ++sum.violations;
    };

    const int dxs[] = {2, 3, 4, 6};
    const int des[] = {2, 3, 4};
    for (int dxi = 0; dxi < 4; ++dxi) {
        for (u64 c = 0; c < cases_per_config; ++c) {
            const int dx = dxs[dxi];
            const int de = des[c % 3];
            std::string tag = "d" + std::to_string(dx) + "-" + pad4(c);
            RngStream rng(seed, "sw-u-" + tag);
            ++sum.cases;
            if (c % 4 == 3) {
                cq::ClassicalCq cs = cq::random_classical_cq(rng, dx, de);
                cq::SandwichCheck sw = cq::check_collision_sandwich(cs.state);
                cq::RatSandwichCheck rs =
                    cq::check_collision_sandwich_classical(cs.pmf);
                if (!rs.holds_exact) ++sum.violations;
                note_gap(sum, std::abs(sw.eps - rat_double(rs.eps)));
                note_gap(sum, std::abs(sw.mid - rat_double(rs.mid)));
                note_gap(sum, std::abs(sw.lower - rat_double(rs.lower)));
                note_gap(sum, std::abs(sw.upper - rat_double(rs.upper)));
                note_common("sw-u-" + tag + "-diag", "uniform", sw);
            } else {
                cq::CqState st = cq::random_cq_state(rng, dx, de);
                note_common("sw-u-" + tag, "uniform", cq::check_collision_sandwich(st));
            }
        }
    }

    const std::pair<int, int> dims[] = {{2, 2}, {3, 2}, {2, 3}, {3, 3}};
    for (const auto& [d1, d2] : dims) {
        for (u64 c = 0; c < cases_per_config; ++c) {
            const int de = des[c % 3];
            std::string tag = "d" + std::to_string(d1) + "x" + std::to_string(d2) +
                              "-" + pad4(c);
            RngStream rng(seed, "sw-n-" + tag);
            ++sum.cases;
            cq::CcqState st = cq::random_ccq_state(rng, d1, d2, de);
            note_common("sw-n-" + tag, "nonuniform", cq::check_collision_sandwich(st));
        }
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Communication-game scan
// ---------------------------------------------------------------------------

GameScanResult game_scan(i64 p, int n, u64 sample, u64 seed) {
    ext::NmExtParams P(p, n);
    const u64 s = upow(p, n / 2);
    const u64 d = upow(p, n);
    const u64 denom = s * d;

    // z_table[a-1][((y * s) + y') * d + x] = <x, g_a(y, y')>
    std::vector<std::vector<std::int8_t>> zt(static_cast<std::size_t>(p - 1));
    {
        std::vector<field::FpVector> xs, ys;
        for (u64 x = 0; x < d; ++x)
            xs.push_back(field::index_to_vector(p, static_cast<std::size_t>(n), x));
        for (u64 y = 0; y < s; ++y)
            ys.push_back(field::index_to_vector(p, static_cast<std::size_t>(n / 2), y));
        for (i64 a = 1; a < p; ++a) {
            auto& tbl = zt[static_cast<std::size_t>(a - 1)];
            tbl.assign(s * s * d, 0);
            for (u64 y = 0; y < s; ++y)
                for (u64 yp = 0; yp < s; ++yp) {
                    if (yp == y) continue;
                    field::FpVector g = ext::g_a_eval(P, a, ys[y], ys[yp]);
                    for (u64 x = 0; x < d; ++x)
                        tbl[(y * s + yp) * d + x] =
                            static_cast<std::int8_t>(field::inner_product(xs[x], g));
                }
        }
    }

    GameScanResult out;
    out.worst_slack = 1e300;
    std::vector<int> leak(d);
    std::vector<u64> cnt(static_cast<std::size_t>(p) * p);
    std::vector<u64> best(static_cast<std::size_t>(p));

    // per-function bound checks with exact integer tallies
    auto check_function = [&](u64 func_id) {
        u64 fibers = 0;
        {
            std::vector<bool> seen(static_cast<std::size_t>(p), false);
            for (u64 x = 0; x < d; ++x)
                if (!seen[static_cast<std::size_t>(leak[x])]) {
                    seen[static_cast<std::size_t>(leak[x])] = true;
                    ++fibers;
                }
        }
        const double rhs =
            std::sqrt(2.0 * static_cast<double>(s) * static_cast<double>(fibers) /
                      static_cast<double>(d));
        for (i64 a = 1; a < p; ++a) {
            const auto& tbl = zt[static_cast<std::size_t>(a - 1)];
            u64 win_num = 0;
            for (u64 y = 0; y < s; ++y) {
                std::fill(best.begin(), best.end(), 0);
                for (u64 yp = 0; yp < s; ++yp) {
                    if (yp == y) continue;
                    std::fill(cnt.begin(), cnt.end(), 0);
                    const std::int8_t* row = &tbl[(y * s + yp) * d];
                    for (u64 x = 0; x < d; ++x)
                        ++cnt[static_cast<std::size_t>(leak[x]) * p +
                              static_cast<std::size_t>(row[x])];
                    for (std::size_t e = 0; e < static_cast<std::size_t>(p); ++e)
                        for (std::size_t b = 0; b < static_cast<std::size_t>(p); ++b)
                            best[e] = std::max(best[e], cnt[e * p + b]);
                }
                for (u64 b : best) win_num += b;
            }
            ++out.checks;
            const double excess = static_cast<double>(win_num) /
                                      static_cast<double>(denom) -
                                  1.0 / static_cast<double>(p);
            const double slack = rhs + 1e-12 - excess;
            if (slack < out.worst_slack) out.worst_slack = slack;
            if (slack < 0) ++out.violations;
            Rat win = rat_u64(win_num, denom);
            if (win > out.max_win) {
                out.max_win = win;
                out.argmax_function = func_id;
                out.argmax_a = a;
            }
        }
        ++out.functions;
    };

    // exact cross-check of the integer fast path against the rational op
    std::vector<std::pair<u64, std::vector<int>>> recheck;
    auto maybe_save = [&recheck](u64 func_id, const std::vector<int>& lk, u64 stride) {
        if (func_id % stride == 0) recheck.emplace_back(func_id, lk);
    };

    if (sample == 0) {
        double total = std::pow(static_cast<double>(p), static_cast<double>(d));
        if (total > static_cast<double>(u64{1} << 24))
            throw ResourceError("game-scan: " + fmt_size(total) +
                                " leak functions exceed 2^24; use --sample");
        const u64 count = static_cast<u64>(total);
        const u64 stride = std::max<u64>(1, count / 64);
        for (u64 idx = 0; idx < count; ++idx) {
            u64 rem = idx;
            for (u64 x = 0; x < d; ++x) {
                leak[x] = static_cast<int>(rem % static_cast<u64>(p));
                rem /= static_cast<u64>(p);
            }
            check_function(idx);
            maybe_save(idx, leak, stride);
        }
    } else {
        out.sampled = true;
        out.sample_size = sample;
        // structured family: every affine leak <v, x> + c
        std::vector<field::FpVector> xs;
        for (u64 x = 0; x < d; ++x)
            xs.push_back(field::index_to_vector(p, static_cast<std::size_t>(n), x));
        field::FieldSpec f(p);
        u64 func_id = 0;
        for (u64 vi = 0; vi < d; ++vi) {
            field::FpVector v =
                field::index_to_vector(p, static_cast<std::size_t>(n), vi);
            for (i64 cshift = 0; cshift < p; ++cshift) {
                for (u64 x = 0; x < d; ++x)
                    leak[x] = static_cast<int>(
                        field::fp_add(f, field::inner_product(v, xs[x]), cshift));
                check_function(func_id);
                maybe_save(func_id, leak, 16);
                ++func_id;
            }
        }
        RngStream rng(seed, "game-leak");
        for (u64 trial = 0; trial < sample; ++trial) {
            for (u64 x = 0; x < d; ++x)
                leak[x] = static_cast<int>(rng.below(static_cast<u64>(p)));
            check_function(func_id);
            maybe_save(func_id, leak, 512);
            ++func_id;
        }
    }

    // rerun the saved functions through the exact rational engine
    std::vector<Rat> pmf(d, Rat(1) / Rat(static_cast<unsigned long>(d)));
    auto g_fn = [&P](u64 y, u64 yp) {
        return ext::g_a_eval(P, 1,
                             field::index_to_vector(P.f.p,
                                                    static_cast<std::size_t>(P.half()),
                                                    y),
                             field::index_to_vector(P.f.p,
                                                    static_cast<std::size_t>(P.half()),
                                                    yp));
    };
    for (const auto& [fid, lk] : recheck) {
        cq::GameResult gr = cq::game_best_classical(p, n, g_fn, lk, pmf);
        // recompute the fast-path win for a = 1 on this leak
        leak = lk;
        const auto& tbl = zt[0];
        u64 win_num = 0;
        for (u64 y = 0; y < s; ++y) {
            std::fill(best.begin(), best.end(), 0);
            for (u64 yp = 0; yp < s; ++yp) {
                if (yp == y) continue;
                std::fill(cnt.begin(), cnt.end(), 0);
                const std::int8_t* row = &tbl[(y * s + yp) * d];
                for (u64 x = 0; x < d; ++x)
                    ++cnt[static_cast<std::size_t>(leak[x]) * p +
                          static_cast<std::size_t>(row[x])];
                for (std::size_t e = 0; e < static_cast<std::size_t>(p); ++e)
                    for (std::size_t b = 0; b < static_cast<std::size_t>(p); ++b)
                        best[e] = std::max(best[e], cnt[e * p + b]);
            }
            for (u64 b : best) win_num += b;
        }
        if (rat_u64(win_num, denom) != gr.win) out.cross_ok = false;
        ++out.cross_checked;
    }
    return out;
}

} // namespace nmext::scan
