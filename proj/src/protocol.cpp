#include "nmext/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "json.hpp"

namespace nmext::proto {

namespace {

u64 upow(i64 base, int e) {
    u64 r = 1;
    for (int i = 0; i < e; ++i) r *= static_cast<u64>(base);
    return r;
}

u64 mask_bits(int bits) {
    return bits >= 64 ? ~u64{0} : ((u64{1} << bits) - 1);
}

std::string istr(long long v) { return std::to_string(v); }

} // namespace

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

void ProtocolParams::validate() const {
    if (n < 2 || n % 2 != 0)
        throw DomainError("ProtocolParams: n must be even and >= 2");
    if (m < 0) throw DomainError("ProtocolParams: m must be >= 0");
    if (eps_mac < 0 || eps_ext < 0 || eps_nmext < 0)
        throw DomainError("ProtocolParams: error targets must be >= 0");
    if (mode == Mode::dw) {
        field::FieldSpec f(p);
        if (p == 2) throw DomainError("ProtocolParams: dw requires an odd prime");
        if (n * std::log2(static_cast<double>(p)) > 48.0)
            throw DomainError("ProtocolParams: p^n exceeds the 2^48 index budget");
        if (d2 < 1 || d2 > 20)
            throw DomainError("ProtocolParams: d2 must be in [1, 20]");
        if (t < 1 || t > 16) throw DomainError("ProtocolParams: t must be in [1, 16]");
        if (d2 % t != 0)
            throw DomainError("ProtocolParams: t must divide d2 (whole MAC blocks)");
        if (m > d2) throw DomainError("ProtocolParams: m must be <= d2");
        if (v != 0) throw DomainError("ProtocolParams: v is one_round-only");
    } else {
        if (half() > 20)
            throw DomainError("ProtocolParams: n/2 must be <= 20 in one_round mode");
        if (v < 0 || v > half())
            throw DomainError("ProtocolParams: v must be in [0, n/2]");
        if (v + m > half())
            throw DomainError("ProtocolParams: v + m must be <= n/2");
    }
}

std::vector<std::string> ProtocolParams::advisories() const {
    std::vector<std::string> out;
    if (mode == Mode::dw) {
        if (static_cast<double>(p) < std::pow(2.0, 2 * t))
            out.push_back("mac keys are biased: p = " + istr(p) +
                          " < 2^(2t) = " + istr(1ll << (2 * t)) +
                          "; the forgery bound assumes uniform keys");
        u64 red = u64{1} << (2 * d2);
        if (upow(p, n) % red != 0)
            out.push_back("ext input is biased: p^n is not a multiple of 2^(2 d2), so "
                          "uniform X does not give uniform (x1, x2)");
        if (m == 0) out.push_back("m = 0: zero-length output key (boundary run)");
        if (k > 0 && eps_nmext > 0) {
            ext::NmExtParams np(p, n);
            double need = np.threshold_bits(rat_double(eps_nmext));
            if (k < need)
                out.push_back("claimed k = " + std::to_string(k) +
                              " is below the nmExt threshold " + std::to_string(need) +
                              " (vacuous at desk scale)");
        }
    } else {
        if (v == 0) out.push_back("v = 0: receiver accepts every message (boundary run)");
        if (m == 0) out.push_back("m = 0: zero-length output key (boundary run)");
        if (m != half() - v)
            out.push_back("m != n/2 - v: output shorter than the canonical split");
        if (k > 0 && eps_ext > 0) {
            double want = n - k + std::log2(1.0 / rat_double(eps_ext));
            if (std::abs(static_cast<double>(v) - want) > 1e-9)
                out.push_back("v = " + istr(v) +
                              " differs from n - k + log(1/eps) = " +
                              std::to_string(want));
        }
    }
    return out;
}

u64 ProtocolParams::x_space() const {
    return mode == Mode::dw ? upow(p, n) : (u64{1} << n);
}

u64 ProtocolParams::seed_space() const {
    return mode == Mode::dw ? upow(p, half()) : (u64{1} << half());
}

// ---------------------------------------------------------------------------
// Transcripts
// ---------------------------------------------------------------------------

std::string transcript_to_json(const TranscriptRecord& r) {
    nlohmann::ordered_json j;
    auto put_vec = [&j](const char* name, const std::optional<FpVector>& v) {
        if (v)
            j[name] = v->coeffs;
        else
            j[name] = nullptr;
    };
    auto put_u64 = [&j](const char* name, const std::optional<u64>& v) {
        if (v)
            j[name] = *v;
        else
            j[name] = nullptr;
    };
    put_vec("ya", r.ya);
    put_vec("ya_prime", r.ya_prime);
    put_u64("yb", r.yb);
    put_u64("w", r.w);
    put_u64("yb_prime", r.yb_prime);
    put_u64("w_prime", r.w_prime);
    put_u64("r_a", r.r_a);
    put_u64("r_b", r.r_b);
    j["key_derived"] = r.key_derived;
    j["key_confirmed"] = r.key_confirmed;
    return j.dump();
}

// ---------------------------------------------------------------------------
// Adversaries
// ---------------------------------------------------------------------------

RngStream& AdvContext::rand() {
    if (!rng)
        throw AdversaryError(
            "adversary randomness is unavailable in exhaustive mode");
    return *rng;
}

AdversaryStrategy adversary_identity() { return AdversaryStrategy{}; }

AdversaryStrategy adversary_seed_shift(u64 c) {
    AdversaryStrategy s;
    s.name = "seed-shift:" + istr(static_cast<long long>(c));
    s.tamper1 = [c](const FpVector& ya, AdvContext&) {
        u64 space = upow(ya.p, static_cast<int>(ya.coeffs.size()));
        u64 idx = (field::vector_index(ya) + c) % space;
        return field::index_to_vector(ya.p, ya.coeffs.size(), idx);
    };
    return s;
}

AdversaryStrategy adversary_xor2(u64 y_mask, u64 w_mask) {
    AdversaryStrategy s;
    s.name = "xor2:" + istr(static_cast<long long>(y_mask)) + "," +
             istr(static_cast<long long>(w_mask));
    s.tamper2 = [y_mask, w_mask](u64 yb, u64 w, AdvContext&) {
        return std::pair<u64, u64>{yb ^ y_mask, w ^ w_mask};
    };
    return s;
}

AdversaryStrategy adversary_replace2(u64 y_bits, u64 w_bits) {
    AdversaryStrategy s;
    s.name = "replace2:" + istr(static_cast<long long>(y_bits)) + "," +
             istr(static_cast<long long>(w_bits));
    s.tamper2 = [y_bits, w_bits](u64, u64, AdvContext&) {
        return std::pair<u64, u64>{y_bits, w_bits};
    };
    return s;
}

AdversaryStrategy parse_adversary(const std::string& text) {
    auto colon = text.find(':');
    std::string name = text.substr(0, colon);
    std::vector<u64> args;
    if (colon != std::string::npos) {
        std::string rest = text.substr(colon + 1);
        std::size_t pos = 0;
        while (pos <= rest.size()) {
            auto comma = rest.find(',', pos);
            std::string tok = rest.substr(
                pos, comma == std::string::npos ? std::string::npos : comma - pos);
            try {
                args.push_back(std::stoull(tok));
            } catch (const std::exception&) {
                throw DomainError("parse_adversary: bad argument '" + tok + "'");
            }
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
    }
    if (name == "identity" && args.empty()) return adversary_identity();
    if (name == "seed-shift" && args.size() == 1) return adversary_seed_shift(args[0]);
    if (name == "xor2" && args.size() == 2) return adversary_xor2(args[0], args[1]);
    if (name == "replace2" && args.size() == 2)
        return adversary_replace2(args[0], args[1]);
    throw DomainError("parse_adversary: unknown strategy '" + text + "'");
}

// ---------------------------------------------------------------------------
// DW building blocks
// ---------------------------------------------------------------------------

u64 dw_ext(const ProtocolParams& pp, u64 x_index, u64 yb) {
    const int d2 = pp.d2;
    const u64 idx = x_index & mask_bits(2 * d2);
    const u64 x1 = idx & mask_bits(d2);
    const u64 x2 = (idx >> d2) & mask_bits(d2);
    const auto& F = field::canonical_field(2, d2);
    FpVector z = field::ext_add(
        F,
        field::ext_mul(F, ext::bits_to_vector(d2, yb), ext::bits_to_vector(d2, x1)),
        ext::bits_to_vector(d2, x2));
    return ext::take_bits(z, 0, pp.m);
}

u64 dw_tag(const ProtocolParams& pp, i64 z, u64 yb) {
    mac::MacParams mp(pp.t, pp.d2 / pp.t);
    mac::MacKey key = mac::mac_key_derive(static_cast<u64>(z), pp.t);
    return mac::mac_tag(mp, key, mac::split_blocks(mp, yb));
}

// ---------------------------------------------------------------------------
// DW state machine
// ---------------------------------------------------------------------------

std::pair<AliceState, FpVector> alice_round1(const ProtocolParams& pp,
                                             const FpVector& x, RngStream& rng) {
    pp.validate();
    if (pp.mode != Mode::dw) throw DomainError("alice_round1: dw mode only");
    field::check_vector(x, pp.p, static_cast<std::size_t>(pp.n));
    ext::NmExtParams np(pp.p, pp.n);
    FpVector ya = field::index_to_vector(pp.p, static_cast<std::size_t>(pp.half()),
                                         rng.below(pp.seed_space()));
    AliceState st{pp, x, ya, ext::nmext_eval(np, x, ya)};
    return {st, ya};
}

BobResult bob_respond(const ProtocolParams& pp, const FpVector& x,
                      const FpVector& ya_prime, RngStream& rng) {
    pp.validate();
    if (pp.mode != Mode::dw) throw DomainError("bob_respond: dw mode only");
    field::check_vector(x, pp.p, static_cast<std::size_t>(pp.n));
    field::check_vector(ya_prime, pp.p, static_cast<std::size_t>(pp.half()));
    ext::NmExtParams np(pp.p, pp.n);
    i64 z_prime = ext::nmext_eval(np, x, ya_prime);
    BobResult out;
    out.yb = rng.below(u64{1} << pp.d2);
    out.w = dw_tag(pp, z_prime, out.yb);
    out.r_b = dw_ext(pp, field::vector_index(x), out.yb);
    return out;
}

AliceOutcome alice_finish(const AliceState& st, u64 yb_prime, u64 w_prime) {
    const ProtocolParams& pp = st.params;
    if (yb_prime > mask_bits(pp.d2) || w_prime > mask_bits(pp.t))
        throw DomainError("alice_finish: message out of range");
    AliceOutcome out;
    if (w_prime == dw_tag(pp, st.z, yb_prime)) {
        out.key_confirmed = true;
        out.r_a = dw_ext(pp, field::vector_index(st.x), yb_prime);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Fixed-randomness cores
// ---------------------------------------------------------------------------

TranscriptRecord run_dw_fixed(const ProtocolParams& pp, u64 x_index, int e,
                              u64 ya_index, u64 yb_bits,
                              const AdversaryStrategy& adv, RunMode mode,
                              RngStream* adv_rng) {
    if (x_index >= pp.x_space() || ya_index >= pp.seed_space() ||
        yb_bits > mask_bits(pp.d2))
        throw DomainError("run_dw_fixed: randomness out of range");
    const FpVector x =
        field::index_to_vector(pp.p, static_cast<std::size_t>(pp.n), x_index);
    ext::NmExtParams np(pp.p, pp.n);

    TranscriptRecord rec;
    AdvContext ctx;
    ctx.e = e;
    ctx.rng = adv_rng;

    // step 1: Alice
    FpVector ya = field::index_to_vector(pp.p, static_cast<std::size_t>(pp.half()),
                                         ya_index);
    i64 z = ext::nmext_eval(np, x, ya);
    rec.ya = ya;

    FpVector ya_prime = ya;
    if (adv.tamper1) {
        ya_prime = adv.tamper1(ya, ctx);
        try {
            field::check_vector(ya_prime, pp.p, static_cast<std::size_t>(pp.half()));
        } catch (const DomainError& err) {
            throw AdversaryError(std::string("tamper1 output invalid: ") + err.what());
        }
    }
    rec.ya_prime = ya_prime;

    // step 2: Bob
    i64 z_prime = ext::nmext_eval(np, x, ya_prime);
    u64 w = dw_tag(pp, z_prime, yb_bits);
    u64 r_b = dw_ext(pp, x_index, yb_bits);
    rec.yb = yb_bits;
    rec.w = w;
    rec.r_b = r_b;
    rec.key_derived = true;

    if (mode == RunMode::post_application) ctx.post_key = r_b;
    u64 yb_prime = yb_bits, w_prime = w;
    if (adv.tamper2) {
        auto [y2, w2] = adv.tamper2(yb_bits, w, ctx);
        if (y2 > mask_bits(pp.d2) || w2 > mask_bits(pp.t))
            throw AdversaryError("tamper2 output out of range");
        yb_prime = y2;
        w_prime = w2;
    }
    rec.yb_prime = yb_prime;
    rec.w_prime = w_prime;

    // step 3: Alice
    if (w_prime == dw_tag(pp, z, yb_prime)) {
        rec.key_confirmed = true;
        rec.r_a = dw_ext(pp, x_index, yb_prime);
    }
    return rec;
}

TranscriptRecord run_one_round_fixed(const ProtocolParams& pp, u64 x_index,
                                     int e, u64 y_bits,
                                     const AdversaryStrategy& adv, RunMode mode,
                                     RngStream* adv_rng) {
    const int h = pp.half();
    if (x_index >= pp.x_space() || y_bits > mask_bits(h))
        throw DomainError("run_one_round_fixed: randomness out of range");
    const u64 x1 = x_index & mask_bits(h);
    const u64 x2 = (x_index >> h) & mask_bits(h);
    ext::StrongExtParams sp(pp.n, pp.v, pp.m);
    const FpVector x1v = ext::bits_to_vector(h, x1);
    const FpVector x2v = ext::bits_to_vector(h, x2);

    TranscriptRecord rec;
    AdvContext ctx;
    ctx.e = e;
    ctx.rng = adv_rng;

    // Alice: Z = Y X1 + X2, W = first v bits, R_A = next m bits, always output
    FpVector z = ext::strong_ext_eval(sp, x1v, x2v, ext::bits_to_vector(h, y_bits));
    u64 w = ext::take_bits(z, 0, pp.v);
    u64 r_a = ext::take_bits(z, pp.v, pp.m);
    rec.yb = y_bits;
    rec.w = w;
    rec.r_a = r_a;
    rec.key_derived = true;

    if (mode == RunMode::post_application) ctx.post_key = r_a;
    u64 y_prime = y_bits, w_prime = w;
    if (adv.tamper2) {
        auto [y2, w2] = adv.tamper2(y_bits, w, ctx);
        if (y2 > mask_bits(h) || w2 > mask_bits(pp.v))
            throw AdversaryError("tamper2 output out of range");
        y_prime = y2;
        w_prime = w2;
    }
    rec.yb_prime = y_prime;
    rec.w_prime = w_prime;

    // Bob: accept iff W' matches the first v bits of Z'
    FpVector z_prime =
        ext::strong_ext_eval(sp, x1v, x2v, ext::bits_to_vector(h, y_prime));
    if (ext::take_bits(z_prime, 0, pp.v) == w_prime) {
        rec.key_confirmed = true;
        rec.r_b = ext::take_bits(z_prime, pp.v, pp.m);
    }
    return rec;
}

// ---------------------------------------------------------------------------
// Sources
// ---------------------------------------------------------------------------

ClassicalSource source_uniform(u64 x_space) {
    ClassicalSource s;
    s.name = "uniform";
    s.x_space = x_space;
    Rat pr = Rat(1) / Rat(static_cast<unsigned long>(x_space));
    for (u64 x = 0; x < x_space; ++x) s.atoms.push_back({x, 0, pr});
    return s;
}

ClassicalSource source_constant(u64 x_space, u64 x0) {
    if (x0 >= x_space) throw DomainError("source_constant: x0 out of range");
    ClassicalSource s;
    s.name = "constant";
    s.x_space = x_space;
    s.atoms.push_back({x0, 0, Rat(1)});
    return s;
}

ClassicalSource source_half_support(u64 x_space) {
    ClassicalSource s;
    s.name = "half-support";
    s.x_space = x_space;
    u64 lim = (x_space + 1) / 2;
    Rat pr = Rat(1) / Rat(static_cast<unsigned long>(lim));
    for (u64 x = 0; x < lim; ++x) s.atoms.push_back({x, 0, pr});
    return s;
}

double source_min_entropy(const ClassicalSource& s) {
    std::map<int, Rat> best;
    for (const auto& a : s.atoms) {
        Rat& b = best[a.e];
        if (a.prob > b) b = a.prob;
    }
    Rat pg(0);
    for (const auto& [e, b] : best) pg += b;
    return -std::log2(rat_double(pg));
}

namespace {

const SourceAtom& sample_atom(const ClassicalSource& src, RngStream& rng) {
    double u = rng.unit();
    double acc = 0;
    for (const auto& a : src.atoms) {
        acc += rat_double(a.prob);
        if (u < acc) return a;
    }
    return src.atoms.back();
}

void check_source(const ProtocolParams& pp, const ClassicalSource& src) {
    if (src.atoms.empty()) throw DomainError("source: no atoms");
    if (src.x_space != pp.x_space())
        throw DomainError("source: x_space does not match the parameters");
    Rat tot(0);
    for (const auto& a : src.atoms) {
        if (a.x >= src.x_space) throw DomainError("source: atom x out of range");
        if (a.e < 0 || a.e >= src.e_space)
            throw DomainError("source: atom e out of range");
        if (a.prob < 0) throw DomainError("source: negative probability");
        tot += a.prob;
    }
    if (tot != 1) throw DomainError("source: pmf must sum to 1 exactly");
}

} // namespace

TranscriptRecord run_dw(const ProtocolParams& pp, const ClassicalSource& source,
                        const AdversaryStrategy& adv, RngStream& rng,
                        RunMode mode) {
    pp.validate();
    if (pp.mode != Mode::dw) throw DomainError("run_dw: dw mode only");
    check_source(pp, source);
    const SourceAtom& atom = sample_atom(source, rng);
    u64 ya_index = rng.below(pp.seed_space());
    u64 yb_bits = rng.below(u64{1} << pp.d2);
    return run_dw_fixed(pp, atom.x, atom.e, ya_index, yb_bits, adv, mode, &rng);
}

TranscriptRecord run_one_round(const ProtocolParams& pp, const FpVector& x1,
                               const FpVector& x2, const AdversaryStrategy& adv,
                               RngStream& rng, RunMode mode) {
    pp.validate();
    if (pp.mode != Mode::one_round)
        throw DomainError("run_one_round: one_round mode only");
    const int h = pp.half();
    field::check_vector(x1, 2, static_cast<std::size_t>(h));
    field::check_vector(x2, 2, static_cast<std::size_t>(h));
    u64 x_index = ext::vector_to_bits(x1) | (ext::vector_to_bits(x2) << h);
    u64 y_bits = rng.below(u64{1} << h);
    return run_one_round_fixed(pp, x_index, 0, y_bits, adv, mode, &rng);
}

// ---------------------------------------------------------------------------
// Security experiment
// ---------------------------------------------------------------------------

namespace {

struct ExtractionGroup {
    std::map<u64, Rat> pa, pb; // accepted-key masses
    Rat acc_a, acc_b;          // total accepted mass
};

std::string group_key(const TranscriptRecord& rec, int e) {
    std::string k = istr(e);
    auto push_u = [&k](const std::optional<u64>& v) {
        k += '|';
        k += v ? istr(static_cast<long long>(*v)) : std::string("n");
    };
    auto push_vec = [&k](const std::optional<FpVector>& v) {
        k += '|';
        k += v ? istr(static_cast<long long>(field::vector_index(*v)))
               : std::string("n");
    };
    push_vec(rec.ya);
    push_vec(rec.ya_prime);
    push_u(rec.yb);
    push_u(rec.w);
    push_u(rec.yb_prime);
    push_u(rec.w_prime);
    return k;
}

// exact distance of (R, V, E') from (purify(R), V, E'): the bottom mass
// cancels, the accepted mass is compared against the uniform spread
Rat extraction_distance(const std::unordered_map<std::string, ExtractionGroup>& gs,
                        int m, bool side_a) {
    const Rat keys = rat_pow2(static_cast<unsigned>(m));
    Rat dist(0);
    for (const auto& [key, g] : gs) {
        const auto& pm = side_a ? g.pa : g.pb;
        const Rat& acc = side_a ? g.acc_a : g.acc_b;
        if (acc == 0 && pm.empty()) continue;
        Rat uni = acc / keys;
        Rat sum(0);
        for (const auto& [r, mass] : pm) sum += rat_abs(mass - uni);
        sum += (keys - static_cast<unsigned long>(pm.size())) * uni;
        dist += sum / 2;
    }
    return dist;
}

} // namespace

SecurityReport security_experiment(const ProtocolParams& pp,
                                   const ClassicalSource& source,
                                   const AdversaryStrategy& adv,
                                   ExperimentMode mode, u64 trials,
                                   u64 master_seed) {
    pp.validate();
    check_source(pp, source);

    SecurityReport rep;
    rep.mode = mode;
    rep.eps_sum = pp.eps_mac + pp.eps_ext + pp.eps_nmext;
    rep.source_hmin = source_min_entropy(source);
    rep.advisories = pp.advisories();
    if (pp.mode == Mode::dw && pp.eps_nmext > 0)
        rep.threshold_bits =
            ext::NmExtParams(pp.p, pp.n).threshold_bits(rat_double(pp.eps_nmext));

    const bool dw = pp.mode == Mode::dw;

    auto run_once = [&](u64 x, int e, u64 ra, u64 rb, RunMode rm,
                        RngStream* arng) {
        return dw ? run_dw_fixed(pp, x, e, ra, rb, adv, rm, arng)
                  : run_one_round_fixed(pp, x, e, ra, adv, rm, arng);
    };

    if (mode == ExperimentMode::exhaustive) {
        const u64 seeds = pp.seed_space();
        const u64 yb_space = dw ? (u64{1} << pp.d2) : 1;
        const u64 rnd = seeds * yb_space;
        double budget = static_cast<double>(source.x_space) *
                        static_cast<double>(source.e_space) *
                        static_cast<double>(rnd);
        if (budget > static_cast<double>(u64{1} << 24))
            throw ResourceError("security_experiment: exhaustive budget " +
                                std::to_string(budget) + " exceeds 2^24");

        Rat inv_rnd = Rat(1) / Rat(static_cast<unsigned long>(rnd));
        std::unordered_map<std::string, ExtractionGroup> groups;
        u64 executed = 0;

        for (const auto& atom : source.atoms) {
            if (atom.prob == 0) continue;
            Rat weight = atom.prob * inv_rnd;
            for (u64 ya = 0; ya < seeds; ++ya) {
                for (u64 yb = 0; yb < yb_space; ++yb) {
                    ++executed;
                    TranscriptRecord rec;
                    bool pre_ok = true;
                    try {
                        rec = run_once(atom.x, atom.e, ya, yb,
                                       RunMode::pre_application, nullptr);
                    } catch (const AdversaryError&) {
                        pre_ok = false;
                        rep.adversary_error_mass += weight;
                    }
                    if (pre_ok) {
                        bool both = rec.r_a.has_value() && rec.r_b.has_value();
                        if (both && *rec.r_a == *rec.r_b) rep.correctness += weight;
                        if (both && *rec.r_a != *rec.r_b)
                            rep.robustness_pre += weight;
                        bool changed = rec.yb_prime != rec.yb || rec.w_prime != rec.w;
                        if (changed) {
                            rep.forgery_attempt_mass += weight;
                            if (rec.key_confirmed) rep.forgery_success_mass += weight;
                        }
                        ExtractionGroup& g = groups[group_key(rec, atom.e)];
                        if (rec.r_a) {
                            g.pa[*rec.r_a] += weight;
                            g.acc_a += weight;
                        }
                        if (rec.r_b) {
                            g.pb[*rec.r_b] += weight;
                            g.acc_b += weight;
                        }
                    }
                    try {
                        TranscriptRecord post =
                            run_once(atom.x, atom.e, ya, yb,
                                     RunMode::post_application, nullptr);
                        if (post.r_a && post.r_b && *post.r_a != *post.r_b)
                            rep.robustness_post += weight;
                    } catch (const AdversaryError&) {
                        if (pre_ok) rep.adversary_error_mass += weight;
                    }
                }
            }
        }
        rep.trials = executed;
        rep.extraction_available = true;
        rep.extraction_a = extraction_distance(groups, pp.m, true);
        rep.extraction_b = extraction_distance(groups, pp.m, false);
    } else {
        if (trials == 0) throw DomainError("security_experiment: trials must be > 0");
        u64 correct = 0, rob_pre = 0, rob_post = 0, adv_err = 0;
        u64 attempts = 0, successes = 0;
        for (u64 trial = 0; trial < trials; ++trial) {
            RngStream src_rng(master_seed, "source", trial);
            RngStream proto_rng(master_seed, "protocol", trial);
            RngStream adv_pre(master_seed, "adversary-pre", trial);
            RngStream adv_post(master_seed, "adversary-post", trial);
            const SourceAtom& atom = sample_atom(source, src_rng);
            u64 ya = proto_rng.below(pp.seed_space());
            u64 yb = dw ? proto_rng.below(u64{1} << pp.d2) : 0;
            bool pre_ok = true;
            TranscriptRecord rec;
            try {
                rec = run_once(atom.x, atom.e, ya, yb, RunMode::pre_application,
                               &adv_pre);
            } catch (const AdversaryError&) {
                pre_ok = false;
                ++adv_err;
            }
            if (pre_ok) {
                bool both = rec.r_a.has_value() && rec.r_b.has_value();
                if (both && *rec.r_a == *rec.r_b) ++correct;
                if (both && *rec.r_a != *rec.r_b) ++rob_pre;
                bool changed = rec.yb_prime != rec.yb || rec.w_prime != rec.w;
                if (changed) {
                    ++attempts;
                    if (rec.key_confirmed) ++successes;
                }
            }
            try {
                TranscriptRecord post = run_once(atom.x, atom.e, ya, yb,
                                                 RunMode::post_application,
                                                 &adv_post);
                if (post.r_a && post.r_b && *post.r_a != *post.r_b) ++rob_post;
            } catch (const AdversaryError&) {
                if (pre_ok) ++adv_err;
            }
        }
        Rat n = rat_u64(trials);
        rep.trials = trials;
        rep.correctness = rat_u64(correct) / n;
        rep.robustness_pre = rat_u64(rob_pre) / n;
        rep.robustness_post = rat_u64(rob_post) / n;
        rep.adversary_error_mass = rat_u64(adv_err) / n;
        rep.forgery_attempt_mass = rat_u64(attempts) / n;
        rep.forgery_success_mass = rat_u64(successes) / n;
    }
    return rep;
}

std::string security_report_to_json(const SecurityReport& r) {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["mode"] = r.mode == ExperimentMode::exhaustive ? "exhaustive" : "monte_carlo";
    j["trials"] = r.trials;
    auto put_rat = [&j](const char* name, const Rat& q) {
        j[name] = {{"exact", rat_str(q)}, {"value", rat_double(q)}};
    };
    put_rat("correctness", r.correctness);
    put_rat("robustness_pre", r.robustness_pre);
    put_rat("robustness_post", r.robustness_post);
    if (r.extraction_available) {
        put_rat("extraction_a", r.extraction_a);
        put_rat("extraction_b", r.extraction_b);
    } else {
        j["extraction_a"] = nullptr;
        j["extraction_b"] = nullptr;
    }
    put_rat("adversary_error_mass", r.adversary_error_mass);
    put_rat("forgery_attempt_mass", r.forgery_attempt_mass);
    put_rat("forgery_success_mass", r.forgery_success_mass);
    put_rat("eps_sum", r.eps_sum);
    j["source_hmin"] = r.source_hmin;
    j["threshold_bits"] = r.threshold_bits;
    j["advisories"] = r.advisories;
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Wire format
// ---------------------------------------------------------------------------

namespace {
constexpr u8 kWireVersion = 0x01;
}

std::vector<u8> wire_encode_message1(const FpVector& ya) {
    std::vector<u8> out{kWireVersion};
    std::vector<u8> body = field::serialize(ya);
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

FpVector wire_decode_message1(i64 p, const std::vector<u8>& bytes) {
    if (bytes.empty() || bytes[0] != kWireVersion)
        throw DomainError("wire: unsupported message1 version");
    std::size_t offset = 1;
    FpVector v = field::deserialize(p, bytes, offset);
    if (offset != bytes.size()) throw DomainError("wire: trailing bytes in message1");
    return v;
}

std::vector<u8> wire_encode_message2(u64 yb, int yb_bits, u64 w, int w_bits) {
    if (yb_bits < 0 || w_bits < 0 || yb_bits + w_bits > 64)
        throw DomainError("wire: bad message2 widths");
    if (yb > mask_bits(yb_bits) || w > mask_bits(w_bits))
        throw DomainError("wire: message2 values out of range");
    std::vector<u8> out{kWireVersion};
    const int total = yb_bits + w_bits;
    const u64 stream = yb | (w << yb_bits);
    for (int i = 0; i < (total + 7) / 8; ++i)
        out.push_back(static_cast<u8>((stream >> (8 * i)) & 0xff));
    return out;
}

std::pair<u64, u64> wire_decode_message2(const std::vector<u8>& bytes, int yb_bits,
                                         int w_bits) {
    if (bytes.empty() || bytes[0] != kWireVersion)
        throw DomainError("wire: unsupported message2 version");
    const int total = yb_bits + w_bits;
    if (static_cast<int>(bytes.size()) != 1 + (total + 7) / 8)
        throw DomainError("wire: message2 length mismatch");
    u64 stream = 0;
    for (std::size_t i = 1; i < bytes.size(); ++i)
        stream |= static_cast<u64>(bytes[i]) << (8 * (i - 1));
    if (total < 64 && (stream >> total) != 0)
        throw DomainError("wire: nonzero padding bits in message2");
    return {stream & mask_bits(yb_bits), (stream >> yb_bits) & mask_bits(w_bits)};
}

} // namespace nmext::proto
