#include "nmext/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "nmext/errors.hpp"
#include "nmext/extractor.hpp"
#include "nmext/field.hpp"
#include "nmext/mac.hpp"
#include "nmext/protocol.hpp"
#include "nmext/scan.hpp"

namespace nmext::cli {

namespace {

using json = nlohmann::ordered_json;
using u64 = std::uint64_t;
using field::i64;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

u64 resolve_seed(u64 cli_seed) {
    if (const char* s = std::getenv("NMEXT_SEED")) {
        char* end = nullptr;
        u64 v = std::strtoull(s, &end, 10);
        if (end && *end == '\0') return v;
        throw DomainError("NMEXT_SEED is not an unsigned integer");
    }
    return cli_seed;
}

std::vector<i64> parse_symbols(const std::string& csv) {
    std::vector<i64> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) throw DomainError("empty symbol in vector literal");
        out.push_back(std::stoll(tok));
    }
    return out;
}

Rat parse_rat(const std::string& text) {
    try {
        Rat q(text, 10);
        if (q.get_den() == 0) throw DomainError("zero denominator");
        q.canonicalize();
        return q;
    } catch (const DomainError&) {
        throw;
    } catch (const std::exception&) {
        throw DomainError("bad rational literal: " + text);
    }
}

// --source uniform | constant | half | pmf (explicit "x e prob" lines)
struct SourceSpec {
    std::string kind = "uniform";
    u64 x0 = 0;
    std::string pmf_file;
};

void add_source_flags(CLI::App* sub, SourceSpec& spec) {
    sub->add_option("--source", spec.kind, "source family")
        ->check(CLI::IsMember({"uniform", "constant", "half", "pmf"}))
        ->capture_default_str();
    sub->add_option("--x0", spec.x0, "support point for --source constant")
        ->capture_default_str();
    sub->add_option("--pmf-file", spec.pmf_file,
                    "explicit pmf, lines of \"x e prob\" with exact rationals");
}

proto::ClassicalSource build_source(const SourceSpec& spec, u64 x_space) {
    if (spec.kind == "uniform") return proto::source_uniform(x_space);
    if (spec.kind == "constant") return proto::source_constant(x_space, spec.x0);
    if (spec.kind == "half") return proto::source_half_support(x_space);

    std::ifstream in(spec.pmf_file);
    if (!in) throw DomainError("cannot open pmf file: " + spec.pmf_file);
    proto::ClassicalSource src;
    src.name = "pmf";
    src.x_space = x_space;
    Rat total(0);
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        std::stringstream ls(line);
        u64 x;
        int e;
        std::string prob;
        if (!(ls >> x >> e >> prob)) throw DomainError("bad pmf line: " + line);
        if (x >= x_space) throw DomainError("pmf x out of range");
        if (e < 0) throw DomainError("pmf e negative");
        Rat q = parse_rat(prob);
        if (q < 0) throw DomainError("pmf prob negative");
        src.atoms.push_back({x, e, q});
        src.e_space = std::max(src.e_space, e + 1);
        total += q;
    }
    if (total != Rat(1)) throw DomainError("pmf does not sum to 1 exactly");
    return src;
}

// Flat key=value config support: `--config FILE` expands into --key=value
// tokens appended after the command line, skipping keys the command line
// already sets (explicit flags win). '#' starts a comment.
std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open config file: " + path);
    std::vector<std::string> out = args;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DomainError("bad config line (want key=value): " + line);
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw DomainError("bad config line: " + line);
        bool overridden = false;
        for (const auto& a : args)
            if (a == "--" + key || a.rfind("--" + key + "=", 0) == 0)
                overridden = true;
        if (!overridden) out.push_back("--" + key + "=" + val);
    }
    return out;
}

void emit(std::ostream& out, const std::string& text, const std::string& path) {
    out << text;
    if (!path.empty()) {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw DomainError("cannot open output file: " + path);
        f << text;
    }
}

std::string sweep_csv(const scan::SweepSummary& s, bool with_residual) {
    std::ostringstream os;
    os << "case_id,variant,lhs,rhs,margin\n";
    for (const auto& r : s.rows)
        os << r.case_id << ',' << r.variant << ',' << fmt(r.lhs) << ','
           << fmt(r.rhs) << ',' << fmt(r.margin) << '\n';
    os << "# cases=" << s.cases << " rows=" << s.rows.size()
       << " violations=" << s.violations << '\n';
    os << "# min_margin=" << fmt(s.min_margin)
       << " max_rat_gap=" << fmt(s.max_rat_gap);
    if (with_residual) os << " max_residual=" << fmt(s.max_residual);
    os << '\n';
    return os.str();
}

json report_json(const proto::SecurityReport& r) {
    return json::parse(proto::security_report_to_json(r));
}

json game_json(i64 p, int n, const scan::GameScanResult& g) {
    json j;
    j["schema"] = 1;
    j["type"] = "game-scan";
    j["p"] = p;
    j["n"] = n;
    j["functions"] = g.functions;
    j["sampled"] = g.sampled;
    j["sample_size"] = g.sample_size;
    j["checks"] = g.checks;
    j["violations"] = g.violations;
    j["worst_slack"] = g.worst_slack;
    j["max_win"] = rat_str(g.max_win);
    j["max_win_double"] = rat_double(g.max_win);
    j["argmax_function"] = g.argmax_function;
    j["argmax_a"] = g.argmax_a;
    j["cross_checked"] = g.cross_checked;
    j["cross_ok"] = g.cross_ok;
    return j;
}

struct ScanEmit {
    std::string text;
    bool oracle_ok = true;
};

ScanEmit scan_table(i64 p, int n, const proto::ClassicalSource& src,
                    const scan::ScanResult& r) {
    std::ostringstream os;
    os << "f_index,distance,distance_double\n";
    bool oracle_ok = true;
    bool oracle_ran = false;
    u64 s = 1;
    for (int i = 0; i < n / 2; ++i) s *= static_cast<u64>(p);
    for (const auto& row : r.rows) {
        os << row.f_index << ',' << rat_str(row.distance) << ','
           << fmt(rat_double(row.distance)) << '\n';
        if (n == 2 && !r.sampled) {
            oracle_ran = true;
            auto f = scan::decode_strategy(row.f_index, s, src.e_space);
            if (scan::nm_distance_oracle(p, n, src, f) != row.distance)
                oracle_ok = false;
        }
    }
    os << "# strategies_total=" << fmt(r.strategies_total)
       << " sampled=" << (r.sampled ? 1 : 0) << " sample_size=" << r.sample_size
       << '\n';
    os << "# max=" << rat_str(r.max_distance) << " mean=" << rat_str(r.mean_distance)
       << '\n';
    os << "# hmin=" << fmt(r.hmin) << " threshold_bits=" << fmt(r.threshold_bits)
       << '\n';
    os << "# oracle="
       << (oracle_ran ? (oracle_ok ? "match" : "MISMATCH") : "skipped") << '\n';
    return {os.str(), oracle_ok};
}

// compact everything-at-once battery behind the `report` subcommand
json run_report_battery(u64 seed, u64 cases, u64& violations) {
    json j;
    j["schema"] = 1;
    j["type"] = "report";
    j["seed"] = seed;

    { // g_a preimage bound, full desk-scale grid
        int worst = 0;
        u64 bad = 0;
        for (i64 p : {3, 5, 7})
            for (int n : {2, 4}) {
                ext::NmExtParams P(p, n);
                for (i64 a = 1; a < p; ++a) {
                    int m = ext::g_a_max_preimages(P, a);
                    worst = std::max(worst, m);
                    if (m > 2) ++bad;
                }
            }
        j["g_a"] = {{"max_preimages", worst}, {"violations", bad}};
        violations += bad;
    }

    {
        scan::SweepSummary xs = scan::xor_sweep(seed, cases);
        j["xor_sweep"] = {{"cases", xs.cases},
                          {"violations", xs.violations},
                          {"min_margin", xs.min_margin},
                          {"max_rat_gap", xs.max_rat_gap}};
        violations += xs.violations;
        scan::SweepSummary sw = scan::sandwich_sweep(seed + 1, cases);
        j["sandwich_sweep"] = {{"cases", sw.cases},
                               {"violations", sw.violations},
                               {"min_margin", sw.min_margin},
                               {"max_residual", sw.max_residual},
                               {"max_rat_gap", sw.max_rat_gap}};
        violations += sw.violations;
    }

    { // nm scan, p=3 n=2, uniform + constant, with the independent oracle
        for (const char* kind : {"uniform", "constant"}) {
            proto::ClassicalSource src = std::string(kind) == "uniform"
                                             ? proto::source_uniform(9)
                                             : proto::source_constant(9, 4);
            scan::ScanResult r = scan::nm_distance_scan(3, 2, src, 0, seed);
            bool ok = true;
            for (const auto& row : r.rows) {
                auto f = scan::decode_strategy(row.f_index, 3, src.e_space);
                if (scan::nm_distance_oracle(3, 2, src, f) != row.distance)
                    ok = false;
            }
            if (!ok) ++violations;
            j["nm_scan"][kind] = {{"rows", r.rows.size()},
                                  {"max", rat_str(r.max_distance)},
                                  {"mean", rat_str(r.mean_distance)},
                                  {"oracle_match", ok}};
        }
    }

    {
        scan::GameScanResult g = scan::game_scan(3, 2, 0, seed);
        j["game_scan"] = game_json(3, 2, g);
        violations += g.violations + (g.cross_ok ? 0 : 1);
    }

    { // MAC forgery advantages at the frozen design points
        json arr = json::array();
        for (auto [t, L] : {std::pair{2, 1}, {3, 1}, {2, 2}}) {
            mac::MacParams P(t, L);
            Rat adv = mac::mac_forgery_advantage(P);
            Rat level = rat(L) / rat_pow2(static_cast<unsigned>(t));
            if (adv > level) ++violations;
            arr.push_back({{"t", t},
                           {"L", L},
                           {"advantage", rat_str(adv)},
                           {"level", rat_str(level)},
                           {"tight", adv == level}});
        }
        j["mac"] = arr;
    }

    { // honest protocol runs, exhaustive
        proto::ProtocolParams dw;
        dw.mode = proto::Mode::dw;
        dw.p = 3;
        dw.n = 2;
        dw.d2 = 4;
        dw.t = 2;
        dw.m = 2;
        dw.validate();
        proto::SecurityReport r = proto::security_experiment(
            dw, proto::source_uniform(9), proto::adversary_identity(),
            proto::ExperimentMode::exhaustive, 0, seed);
        if (r.correctness != Rat(1)) ++violations;
        j["dw_honest"] = report_json(r);

        proto::ProtocolParams orp;
        orp.mode = proto::Mode::one_round;
        orp.p = 2;
        orp.n = 4;
        orp.v = 1;
        orp.m = 1;
        orp.validate();
        proto::SecurityReport r2 = proto::security_experiment(
            orp, proto::source_uniform(16), proto::adversary_identity(),
            proto::ExperimentMode::exhaustive, 0, seed);
        if (r2.correctness != Rat(1) || r2.extraction_a != Rat(0)) ++violations;
        j["one_round_honest"] = report_json(r2);
    }

    j["violations"] = violations;
    return j;
}

} // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out) {
    CLI::App app{"nmext: non-malleable extractor toolkit"};
    app.require_subcommand(1);
    std::string cfg_path;

    std::vector<std::string> full_args;
    try {
        full_args = expand_config(args);
    } catch (const DomainError& e) {
        out << "usage error: " << e.what() << '\n';
        return 64;
    }

    // --- nmext-eval ---------------------------------------------------------
    auto* ev = app.add_subcommand("nmext-eval", "evaluate nmExt(x, y)");
    i64 ev_p = 3;
    int ev_n = 2;
    std::string ev_x, ev_y;
    ev->add_option("--p", ev_p, "odd prime modulus")->required();
    ev->add_option("--n", ev_n, "source length (even)")->required();
    ev->add_option("--x", ev_x, "comma-separated source symbols")->required();
    ev->add_option("--y", ev_y, "comma-separated seed symbols")->required();
    ev->add_option("--config", cfg_path, "flat key=value config file");

    // --- nm-scan ------------------------------------------------------------
    auto* ns = app.add_subcommand(
        "nm-scan", "exact non-malleability distance per deterministic strategy");
    i64 ns_p = 3;
    int ns_n = 2;
    u64 ns_sample = 0, ns_seed = 1;
    double ns_eps = 0.125;
    SourceSpec ns_src;
    std::string ns_out;
    ns->add_option("--p", ns_p)->required();
    ns->add_option("--n", ns_n)->required();
    add_source_flags(ns, ns_src);
    ns->add_option("--sample", ns_sample,
                   "0 = exhaustive over all strategies, else sample size")
        ->capture_default_str();
    ns->add_option("--seed", ns_seed)->capture_default_str();
    ns->add_option("--eps", ns_eps, "epsilon for the reported entropy threshold")
        ->capture_default_str();
    ns->add_option("--out", ns_out, "also write the table to this file");
    ns->add_option("--config", cfg_path, "flat key=value config file");

    // --- xor-sweep / sandwich-sweep -----------------------------------------
    auto* xs = app.add_subcommand("xor-sweep", "XOR lemma margins on random states");
    u64 xs_cases = 25, xs_seed = 7;
    std::string xs_out;
    xs->add_option("--cases", xs_cases, "cases per (p, t) configuration")
        ->capture_default_str();
    xs->add_option("--seed", xs_seed)->capture_default_str();
    xs->add_option("--out", xs_out);
    xs->add_option("--config", cfg_path, "flat key=value config file");

    auto* sw =
        app.add_subcommand("sandwich-sweep", "collision sandwich on random states");
    u64 sw_cases = 25, sw_seed = 7;
    std::string sw_out;
    sw->add_option("--cases", sw_cases, "cases per dimension configuration")
        ->capture_default_str();
    sw->add_option("--seed", sw_seed)->capture_default_str();
    sw->add_option("--out", sw_out);
    sw->add_option("--config", cfg_path, "flat key=value config file");

    // --- game-scan -----------------------------------------------------------
    auto* gs = app.add_subcommand(
        "game-scan", "communication-game bound over classical leak functions");
    i64 gs_p = 3;
    int gs_n = 2;
    u64 gs_sample = 0, gs_seed = 1;
    std::string gs_out;
    gs->add_option("--p", gs_p)->required();
    gs->add_option("--n", gs_n)->required();
    gs->add_option("--sample", gs_sample,
                   "0 = exhaustive over all leak maps, else random maps beyond "
                   "the affine family")
        ->capture_default_str();
    gs->add_option("--seed", gs_seed)->capture_default_str();
    gs->add_option("--out", gs_out);
    gs->add_option("--config", cfg_path, "flat key=value config file");

    // --- mac-attack -----------------------------------------------------------
    auto* ma = app.add_subcommand(
        "mac-attack", "exhaustive forgery advantage of the polynomial MAC");
    int ma_t = 2, ma_L = 1;
    std::string ma_out;
    ma->add_option("--t", ma_t, "tag bits")->capture_default_str();
    ma->add_option("--L", ma_L, "message blocks")->capture_default_str();
    ma->add_option("--out", ma_out);
    ma->add_option("--config", cfg_path, "flat key=value config file");

    // --- dw-run / one-round-run ------------------------------------------------
    auto* dr = app.add_subcommand("dw-run", "two-round protocol security experiment");
    proto::ProtocolParams dw;
    dw.d2 = 4;
    dw.t = 2;
    dw.m = 2;
    SourceSpec dr_src;
    std::string dr_adv = "identity", dr_mode = "exhaustive", dr_out;
    std::string dr_eps_mac = "0", dr_eps_ext = "0", dr_eps_nmext = "0";
    u64 dr_trials = 4096, dr_seed = 1;
    bool dr_single = false;
    dr->add_option("--p", dw.p)->capture_default_str();
    dr->add_option("--n", dw.n)->capture_default_str();
    dr->add_option("--d2", dw.d2, "extractor seed bits")->capture_default_str();
    dr->add_option("--t", dw.t, "tag bits")->capture_default_str();
    dr->add_option("--m", dw.m, "output key bits")->capture_default_str();
    dr->add_option("--k", dw.k, "claimed min-entropy (reporting only)")
        ->capture_default_str();
    dr->add_option("--eps-mac", dr_eps_mac)->capture_default_str();
    dr->add_option("--eps-ext", dr_eps_ext)->capture_default_str();
    dr->add_option("--eps-nmext", dr_eps_nmext)->capture_default_str();
    add_source_flags(dr, dr_src);
    dr->add_option("--adversary", dr_adv,
                   "identity | seed-shift:C | xor2:Y,W | replace2:Y,W")
        ->capture_default_str();
    dr->add_option("--mode", dr_mode)
        ->check(CLI::IsMember({"exhaustive", "mc"}))
        ->capture_default_str();
    dr->add_option("--trials", dr_trials, "Monte Carlo trials (--mode mc)")
        ->capture_default_str();
    dr->add_option("--seed", dr_seed)->capture_default_str();
    dr->add_flag("--single", dr_single, "print one sampled transcript instead");
    dr->add_option("--out", dr_out);
    dr->add_option("--config", cfg_path, "flat key=value config file");

    auto* orr =
        app.add_subcommand("one-round-run", "one-round protocol security experiment");
    proto::ProtocolParams orp;
    orp.mode = proto::Mode::one_round;
    orp.p = 2;
    orp.n = 4;
    orp.v = 1;
    orp.m = 1;
    SourceSpec or_src;
    std::string or_adv = "identity", or_mode = "exhaustive", or_out;
    std::string or_eps_ext = "0";
    u64 or_trials = 4096, or_seed = 1;
    bool or_single = false;
    orr->add_option("--n", orp.n)->capture_default_str();
    orr->add_option("--v", orp.v, "confirmation bits")->capture_default_str();
    orr->add_option("--m", orp.m, "output key bits")->capture_default_str();
    orr->add_option("--k", orp.k, "claimed min-entropy (reporting only)")
        ->capture_default_str();
    orr->add_option("--eps-ext", or_eps_ext)->capture_default_str();
    add_source_flags(orr, or_src);
    orr->add_option("--adversary", or_adv, "identity | xor2:Y,W | replace2:Y,W")
        ->capture_default_str();
    orr->add_option("--mode", or_mode)
        ->check(CLI::IsMember({"exhaustive", "mc"}))
        ->capture_default_str();
    orr->add_option("--trials", or_trials)->capture_default_str();
    orr->add_option("--seed", or_seed)->capture_default_str();
    orr->add_flag("--single", or_single, "print one sampled transcript instead");
    orr->add_option("--out", or_out);
    orr->add_option("--config", cfg_path, "flat key=value config file");

    // --- report -----------------------------------------------------------------
    auto* rp = app.add_subcommand("report", "one-shot verification battery (JSON)");
    u64 rp_seed = 1, rp_cases = 24;
    std::string rp_out;
    rp->add_option("--seed", rp_seed)->capture_default_str();
    rp->add_option("--cases", rp_cases, "sweep cases per configuration")
        ->capture_default_str();
    rp->add_option("--out", rp_out);
    rp->add_option("--config", cfg_path, "flat key=value config file");

    std::vector<const char*> argv;
    argv.push_back("nmext");
    for (const auto& a : full_args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, out);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, out);
        return 64;
    }

    try {
        if (ev->parsed()) {
            ext::NmExtParams P(ev_p, ev_n);
            field::FpVector x = field::make_vector(ev_p, parse_symbols(ev_x));
            field::FpVector y = field::make_vector(ev_p, parse_symbols(ev_y));
            out << ext::nmext_eval(P, x, y) << '\n';
            return 0;
        }
        if (ns->parsed()) {
            u64 seed = resolve_seed(ns_seed);
            u64 xs_space = 1;
            for (int i = 0; i < ns_n; ++i) xs_space *= static_cast<u64>(ns_p);
            proto::ClassicalSource src = build_source(ns_src, xs_space);
            scan::ScanResult r =
                scan::nm_distance_scan(ns_p, ns_n, src, ns_sample, seed, ns_eps);
            ScanEmit em = scan_table(ns_p, ns_n, src, r);
            emit(out, em.text, ns_out);
            return em.oracle_ok ? 0 : 2;
        }
        if (xs->parsed()) {
            scan::SweepSummary s = scan::xor_sweep(resolve_seed(xs_seed), xs_cases);
            emit(out, sweep_csv(s, false), xs_out);
            return s.violations == 0 ? 0 : 2;
        }
        if (sw->parsed()) {
            scan::SweepSummary s =
                scan::sandwich_sweep(resolve_seed(sw_seed), sw_cases);
            emit(out, sweep_csv(s, true), sw_out);
            return s.violations == 0 ? 0 : 2;
        }
        if (gs->parsed()) {
            scan::GameScanResult g =
                scan::game_scan(gs_p, gs_n, gs_sample, resolve_seed(gs_seed));
            emit(out, game_json(gs_p, gs_n, g).dump(2) + "\n", gs_out);
            return (g.violations == 0 && g.cross_ok) ? 0 : 2;
        }
        if (ma->parsed()) {
            mac::MacParams P(ma_t, ma_L);
            Rat adv = mac::mac_forgery_advantage(P);
            Rat level = rat(ma_L) / rat_pow2(static_cast<unsigned>(ma_t));
            json j;
            j["schema"] = 1;
            j["type"] = "mac-attack";
            j["t"] = ma_t;
            j["L"] = ma_L;
            j["advantage"] = rat_str(adv);
            j["advantage_double"] = rat_double(adv);
            j["level"] = rat_str(level);
            j["level_double"] = rat_double(level);
            j["tight"] = (adv == level);
            j["holds"] = (adv <= level);
            emit(out, j.dump(2) + "\n", ma_out);
            return adv <= level ? 0 : 2;
        }
        if (dr->parsed()) {
            u64 seed = resolve_seed(dr_seed);
            dw.mode = proto::Mode::dw;
            dw.eps_mac = parse_rat(dr_eps_mac);
            dw.eps_ext = parse_rat(dr_eps_ext);
            dw.eps_nmext = parse_rat(dr_eps_nmext);
            dw.validate();
            proto::ClassicalSource src = build_source(dr_src, dw.x_space());
            proto::AdversaryStrategy adv = proto::parse_adversary(dr_adv);
            if (dr_single) {
                RngStream rng(seed, "cli-single");
                auto tr = proto::run_dw(dw, src, adv, rng);
                emit(out, proto::transcript_to_json(tr) + "\n", dr_out);
                return 0;
            }
            proto::SecurityReport r = proto::security_experiment(
                dw, src, adv,
                dr_mode == "mc" ? proto::ExperimentMode::monte_carlo
                                : proto::ExperimentMode::exhaustive,
                dr_trials, seed);
            emit(out, proto::security_report_to_json(r) + "\n", dr_out);
            return 0;
        }
        if (orr->parsed()) {
            u64 seed = resolve_seed(or_seed);
            orp.eps_ext = parse_rat(or_eps_ext);
            orp.validate();
            proto::ClassicalSource src = build_source(or_src, orp.x_space());
            proto::AdversaryStrategy adv = proto::parse_adversary(or_adv);
            if (or_single) {
                RngStream rng(seed, "cli-single");
                u64 xi = src.atoms[rng.below(src.atoms.size())].x;
                u64 low_mask = (u64{1} << orp.half()) - 1;
                field::FpVector x1 = ext::bits_to_vector(orp.half(), xi & low_mask);
                field::FpVector x2 =
                    ext::bits_to_vector(orp.half(), xi >> orp.half());
                auto tr = proto::run_one_round(orp, x1, x2, adv, rng);
                emit(out, proto::transcript_to_json(tr) + "\n", or_out);
                return 0;
            }
            proto::SecurityReport r = proto::security_experiment(
                orp, src, adv,
                or_mode == "mc" ? proto::ExperimentMode::monte_carlo
                                : proto::ExperimentMode::exhaustive,
                or_trials, seed);
            emit(out, proto::security_report_to_json(r) + "\n", or_out);
            return 0;
        }
        if (rp->parsed()) {
            u64 violations = 0;
            json j = run_report_battery(resolve_seed(rp_seed), rp_cases, violations);
            emit(out, j.dump(2) + "\n", rp_out);
            return violations == 0 ? 0 : 2;
        }
    } catch (const ResourceError& e) {
        out << "resource error: " << e.what() << '\n';
        return 3;
    } catch (const DomainError& e) {
        out << "usage error: " << e.what() << '\n';
        return 64;
    } catch (const std::exception& e) {
        out << "error: " << e.what() << '\n';
        return 70;
    }
    return 64;
}

} // namespace nmext::cli
