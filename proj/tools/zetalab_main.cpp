// zetalab: command-line driver for the shifted-moment laboratory.
//
// Subcommands:
//   verify      run named identity suites over seeded random instances
//   correlate   exact divisor-correlation window sums vs the delta-method
//               prediction
//   moments     direct moment vs the recipe prediction
//   vandermonde stratum terms: contour form vs summed swap terms
//   report      merge CSV reports produced by the other subcommands
//
// Exit codes: 0 pass, 1 tolerance failure, 2 usage/config error.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "zetalab/arith.hpp"
#include "zetalab/config.hpp"
#include "zetalab/delta.hpp"
#include "zetalab/moments.hpp"
#include "zetalab/report.hpp"
#include "zetalab/shifts.hpp"
#include "zetalab/verify_suites.hpp"
#include "zetalab/weights.hpp"

namespace {

using namespace zetalab;
using ordered_json = nlohmann::ordered_json;

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

// Parse the config file (if any) and pin its subcommand to the invoked one.
RunConfig load_config(const std::string& path, const char* invoked) {
    RunConfig cfg;
    if (!path.empty()) cfg = parse_config_file(path);
    if (!cfg.subcommand.empty() && cfg.subcommand != invoked)
        throw ConfigError("config " + (path.empty() ? std::string("<defaults>") : path) +
                          ": subcommand \"" + cfg.subcommand +
                          "\" does not match the invoked subcommand \"" + invoked + "\"");
    cfg.subcommand = invoked;
    return cfg;
}

// Digest base for report rows: the math-relevant config fields only, so the
// digest is stable under changes to output paths, timing, or gates.
std::string math_params(const RunConfig& cfg) {
    RunConfig scrub = cfg;
    scrub.subcommand.clear();
    scrub.out_csv.clear();
    scrub.out_json.clear();
    scrub.timing = false;
    scrub.gate_rel.reset();
    return serialize_config(scrub);
}

void emit_csv(const RunConfig& cfg, const std::vector<ComparisonRow>& rows) {
    const std::string csv = rows_to_csv(rows, cfg.timing);
    if (cfg.out_csv.empty()) {
        std::fputs(csv.c_str(), stdout);
    } else {
        write_text_file(cfg.out_csv, csv);
        std::fprintf(stderr, "wrote %s\n", cfg.out_csv.c_str());
    }
}

void emit_json(const RunConfig& cfg, const ordered_json& j) {
    if (cfg.out_json.empty()) return;
    write_text_file(cfg.out_json, j.dump(2) + "\n");
    std::fprintf(stderr, "wrote %s\n", cfg.out_json.c_str());
}

ordered_json cplx_json(cplx z) { return ordered_json::array({z.real(), z.imag()}); }

ordered_json row_json(const ComparisonRow& r, bool timing) {
    ordered_json o;
    o["label"] = r.label;
    o["lhs"] = cplx_json(r.lhs);
    o["rhs"] = cplx_json(r.rhs);
    o["abs_err"] = std::abs(r.lhs - r.rhs);
    o["rel_err"] = rel_err(r.lhs, r.rhs);
    o["params_digest"] = r.params_digest;
    o["seconds"] = timing ? r.seconds : 0.0;
    return o;
}

// ---------------------------------------------------------------- verify ---

int cmd_verify(const RunConfig& cfg, double tol_flag) {
    const double tol_override = tol_flag > 0.0 ? tol_flag : cfg.gate_rel.value_or(0.0);
    std::vector<std::string> names;
    if (cfg.suite.empty())
        names = suite_names();
    else
        names.push_back(cfg.suite);

    std::vector<SuiteResult> results;
    for (const std::string& n : names) results.push_back(run_suite(n, cfg.seed, tol_override));

    std::printf("%-42s %6s  %-11s %-8s %s\n", "identity", "rows", "max rel err", "gate",
                "result");
    bool all_pass = true;
    std::size_t total_rows = 0;
    std::vector<ComparisonRow> all_rows;
    for (const SuiteResult& r : results) {
        struct Group {
            int n = 0;
            double mx = 0.0;
            double gate = 0.0;
            bool pass = true;
        };
        std::vector<std::pair<std::string, Group>> groups;
        for (const ComparisonRow& row : r.rows) {
            const std::size_t cut = row.label.find('/');
            const std::string g =
                cut == std::string::npos ? row.label : row.label.substr(0, cut);
            Group* slot = nullptr;
            for (auto& [name, info] : groups)
                if (name == g) slot = &info;
            if (!slot) {
                groups.emplace_back(g, Group{});
                slot = &groups.back().second;
                slot->gate = r.gate_for(row.label);
            }
            const double e = rel_err(row.lhs, row.rhs);
            slot->n += 1;
            if (e > slot->mx) slot->mx = e;
            if (e > r.gate_for(row.label)) slot->pass = false;
        }
        for (const auto& [g, info] : groups) {
            std::printf("%-42s %6d  %-11.3e %-8.0e %s\n", (r.name + "/" + g).c_str(), info.n,
                        info.mx, info.gate, info.pass ? "pass" : "FAIL");
        }
        if (!r.pass) {
            all_pass = false;
            std::fprintf(stderr,
                         "FAIL %s: worst instance %s, rel err %.3e exceeds gate %.1e\n",
                         r.name.c_str(), r.worst_label.c_str(), r.max_rel,
                         r.gate_for(r.worst_label));
        }
        total_rows += r.rows.size();
        all_rows.insert(all_rows.end(), r.rows.begin(), r.rows.end());
    }
    std::printf("verify: %s (%zu suites, %zu rows, seed %llu)\n", all_pass ? "PASS" : "FAIL",
                results.size(), total_rows, static_cast<unsigned long long>(cfg.seed));

    if (!cfg.out_csv.empty()) emit_csv(cfg, all_rows);
    if (!cfg.out_json.empty()) {
        ordered_json j;
        j["tool"] = "zetalab";
        j["subcommand"] = "verify";
        j["seed"] = cfg.seed;
        j["pass"] = all_pass;
        ordered_json suites = ordered_json::array();
        for (const SuiteResult& r : results) {
            ordered_json s;
            s["name"] = r.name;
            s["statement"] = r.statement;
            s["tolerance"] = r.tolerance;
            ordered_json gates = ordered_json::array();
            for (const auto& [prefix, tol] : r.gates)
                gates.push_back(ordered_json{{"prefix", prefix}, {"tolerance", tol}});
            s["gates"] = gates;
            s["max_rel_err"] = r.max_rel;
            s["worst_instance"] = r.worst_label;
            s["pass"] = r.pass;
            ordered_json rows = ordered_json::array();
            for (const ComparisonRow& row : r.rows) {
                ordered_json o = row_json(row, cfg.timing);
                o["gate"] = r.gate_for(row.label);
                rows.push_back(o);
            }
            s["rows"] = rows;
            suites.push_back(s);
        }
        j["suites"] = suites;
        emit_json(cfg, j);
    }
    return all_pass ? 0 : 1;
}

// ------------------------------------------------------------- correlate ---

// Range checks that must reject bad parameters before any long computation.
void validate_correlate(const RunConfig& cfg) {
    auto reject = [](const std::string& msg) { throw ConfigError("correlate: " + msg); };
    if (cfg.M < 1 || cfg.N < 1) reject("moduli M, N must be >= 1");
    if (std::gcd(cfg.M, cfg.N) != 1) reject("moduli M, N must be coprime");
    if (cfg.h_values.empty()) reject("h_values must be nonempty");
    for (long long h : cfg.h_values)
        if (h == 0) reject("offsets h must be nonzero");
    if (!(cfg.X >= 32.0 && cfg.X <= 2e6)) reject("X must lie in [32, 2e6]");
    if (!(cfg.X + cfg.window_shift >= 2.0)) reject("window_shift pushes the window below 2");
    if (!(cfg.radius > 0.0 && cfg.radius <= 0.45)) reject("radius must lie in (0, 0.45]");
    if (cfg.circle_nodes < 8) reject("circle_nodes must be >= 8");
    if (cfg.Q_max < 64 || cfg.Q_max > 5000000) reject("Q_max must lie in [64, 5e6]");
    test_functions(cfg.weight);  // throws std::invalid_argument for unknown names
    for (const ShiftMultiset* s : {&cfg.A, &cfg.B})
        for (const cplx& g : *s)
            if (std::abs(g) >= 0.75 * cfg.radius)
                reject("shift " + std::to_string(g.real()) + "+" + std::to_string(g.imag()) +
                       "i lies too close to the contour (need |shift| < 0.75 * radius)");
}

int cmd_correlate(const RunConfig& cfg) {
    validate_correlate(cfg);

    long long h_abs_max = 0;
    for (long long h : cfg.h_values) h_abs_max = std::max(h_abs_max, std::llabs(h));
    const double window_top = 2.0 * cfg.X + cfg.window_shift;
    const std::uint64_t need_n =
        static_cast<std::uint64_t>(std::ceil(window_top)) + static_cast<std::uint64_t>(h_abs_max) + 16;
    const std::uint64_t n_max = std::max<std::uint64_t>(need_n, cfg.Q_max + 1);
    if (n_max > 8000000)
        throw ConfigError("correlate: window and Q_max require a factor table of " +
                          std::to_string(n_max) + " entries (cap 8000000)");
    const ArithContext ctx(static_cast<std::size_t>(n_max), 10000);

    const std::string digest_base = math_params(cfg);
    std::vector<ComparisonRow> rows;
    ordered_json jrows = ordered_json::array();
    for (long long h : cfg.h_values) {
        CorrelationInstance inst{cfg.A,          cfg.B, cfg.M, cfg.N,
                                 h,              cfg.X, cfg.window_shift,
                                 cfg.weight};
        const double t0 = now_seconds();
        const cplx direct = direct_correlation(ctx, inst);
        const DeltaPrediction pred =
            delta_prediction(ctx, inst, cfg.circle_nodes, cfg.radius, cfg.Q_max);
        const double dt = now_seconds() - t0;

        ComparisonRow row;
        row.label = "h=" + std::to_string(h);
        row.lhs = direct;
        row.rhs = pred.value;
        row.params_digest = digest_hex(digest_base + ";h=" + std::to_string(h));
        row.seconds = dt;
        rows.push_back(row);

        ordered_json o = row_json(row, cfg.timing);
        o["h"] = h;
        o["q_tail_bound"] = pred.q_tail_bound;
        o["q_tail_last_octave"] = pred.q_tail_last_octave;
        o["truncations"] = ordered_json{{"Q_max", cfg.Q_max},
                                        {"circle_nodes", cfg.circle_nodes},
                                        {"radius", cfg.radius}};
        jrows.push_back(o);
    }

    emit_csv(cfg, rows);

    std::string worst;
    const double mx = max_rel_err(rows, &worst);
    std::fprintf(stderr, "correlate: %zu offsets, max rel err %.3e at %s\n", rows.size(), mx,
                 worst.c_str());

    int rc = 0;
    if (cfg.gate_rel && mx > *cfg.gate_rel) {
        std::fprintf(stderr, "gate exceeded: rel err %.3e > %.3e at %s\n", mx, *cfg.gate_rel,
                     worst.c_str());
        rc = 1;
    }

    if (!cfg.out_json.empty()) {
        ordered_json j;
        j["tool"] = "zetalab";
        j["subcommand"] = "correlate";
        j["config"] = ordered_json::parse(serialize_config(cfg));
        j["rows"] = jrows;
        j["max_rel_err"] = mx;
        if (cfg.gate_rel)
            j["gate_rel"] = *cfg.gate_rel;
        else
            j["gate_rel"] = nullptr;
        j["pass"] = rc == 0;
        emit_json(cfg, j);
    }
    return rc;
}

// --------------------------------------------------------------- moments ---

MomentConfig to_moment_config(const RunConfig& cfg) {
    MomentConfig mc;
    mc.T = cfg.T;
    mc.X = cfg.X;
    mc.epsilon = cfg.epsilon;
    mc.quad.circle_nodes = cfg.circle_nodes;
    mc.quad.line_height = cfg.line_height;
    mc.quad.line_nodes = cfg.line_nodes;
    mc.quad.t_nodes = cfg.t_nodes;
    mc.trunc.P_cut = cfg.P_cut;
    mc.trunc.N_direct = cfg.N_direct;
    mc.trunc.direction_bound = cfg.direction_bound;
    mc.trunc.h_bound = cfg.h_bound;
    mc.trunc.MN_bound = cfg.MN_bound;
    mc.weight = cfg.weight;
    return mc;
}

ordered_json moment_truncations_json(const RunConfig& cfg) {
    return ordered_json{{"P_cut", cfg.P_cut},
                        {"line_nodes", cfg.line_nodes},
                        {"line_height", cfg.line_height},
                        {"circle_nodes", cfg.circle_nodes},
                        {"t_nodes", cfg.t_nodes},
                        {"h_bound", cfg.h_bound},
                        {"direction_bound", cfg.direction_bound},
                        {"N_direct", cfg.N_direct}};
}

int finish_compare(const RunConfig& cfg, const char* sub,
                   std::vector<ComparisonRow>& rows, ordered_json& jrows) {
    emit_csv(cfg, rows);
    std::string worst;
    const double mx = max_rel_err(rows, &worst);
    std::fprintf(stderr, "%s: %zu rows, max rel err %.3e at %s\n", sub, rows.size(), mx,
                 worst.c_str());
    int rc = 0;
    if (cfg.gate_rel && mx > *cfg.gate_rel) {
        std::fprintf(stderr, "gate exceeded: rel err %.3e > %.3e at %s\n", mx, *cfg.gate_rel,
                     worst.c_str());
        rc = 1;
    }
    if (!cfg.out_json.empty()) {
        ordered_json j;
        j["tool"] = "zetalab";
        j["subcommand"] = sub;
        j["config"] = ordered_json::parse(serialize_config(cfg));
        j["rows"] = jrows;
        j["max_rel_err"] = mx;
        if (cfg.gate_rel)
            j["gate_rel"] = *cfg.gate_rel;
        else
            j["gate_rel"] = nullptr;
        j["pass"] = rc == 0;
        emit_json(cfg, j);
    }
    return rc;
}

int cmd_moments(RunConfig cfg, bool had_config) {
    // A bare invocation exercises the default one-shift comparison; a config
    // controls everything, and explicitly empty shift sets select the trivial
    // moment (only m = n = 1 survives the taper and the divisor weights).
    if (!had_config && cfg.A.empty() && cfg.B.empty()) {
        cfg.A = ShiftMultiset{cplx{0.01, 0.0}};
        cfg.B = ShiftMultiset{cplx{-0.01, 0.0}};
    }
    const MomentConfig mc = to_moment_config(cfg);
    validate_moment_config(mc, {&cfg.A, &cfg.B});
    if (cfg.X > static_cast<double>(cfg.N_direct))
        throw ConfigError("moments: X exceeds the direct-summation bound N_direct");
    const auto n_need = static_cast<std::uint64_t>(std::ceil(cfg.X)) + 16;
    if (n_need > 8000000)
        throw ConfigError("moments: X requires a factor table of " +
                          std::to_string(n_need) + " entries (cap 8000000)");
    const ArithContext ctx(std::max<std::size_t>(n_need, 4096), 10000);

    const std::string digest = digest_hex(math_params(cfg));
    std::vector<ComparisonRow> rows;
    ordered_json jrows = ordered_json::array();

    const double t0 = now_seconds();
    const cplx direct = direct_moment(ctx, cfg.A, cfg.B, mc);
    const double t1 = now_seconds();
    const LineIntegral recipe = recipe_moment(ctx, cfg.A, cfg.B, mc);
    const double dt = now_seconds() - t1;

    ComparisonRow row;
    row.label = cfg.A.empty() && cfg.B.empty() ? "trivial" : "moment";
    row.lhs = direct;
    row.rhs = recipe.value;
    row.params_digest = digest;
    row.seconds = (t1 - t0) + dt;
    rows.push_back(row);

    ordered_json o = row_json(row, cfg.timing);
    o["direct_seconds"] = cfg.timing ? t1 - t0 : 0.0;
    o["recipe_seconds"] = cfg.timing ? dt : 0.0;
    o["line_tail_rel"] = recipe.line_tail_rel;
    o["euler_tail_rel"] = recipe.euler_tail_rel;
    o["truncations"] = moment_truncations_json(cfg);
    if (cfg.A.empty() && cfg.B.empty()) {
        // Closed form of the trivial moment, for the record.
        const TestFunctionPair& pair = test_functions(cfg.weight);
        const double u1 = pair.upsilon(1.0 / cfg.X);
        o["closed_form"] = cplx_json(fourier_psi(pair, 0.0) * u1 * u1);
    }
    jrows.push_back(o);
    return finish_compare(cfg, "moments", rows, jrows);
}

// ----------------------------------------------------------- vandermonde ---

int cmd_vandermonde(RunConfig cfg, bool had_config, int ell) {
    if (ell != 1 && ell != 2)
        throw ConfigError("vandermonde: --ell must be 1 or 2");
    if (!had_config && cfg.A.empty() && cfg.B.empty()) {
        // Built-in demonstration profile: small shifts inside 0.8*epsilon and
        // a reduced quadrature (the stratum identity holds node by node, so a
        // short line keeps the run quick without weakening the comparison).
        if (ell == 1) {
            cfg.A = ShiftMultiset{cplx{0.01, 0.0}};
            cfg.B = ShiftMultiset{cplx{-0.01, 0.0}};
            cfg.line_height = 12.0;
            cfg.line_nodes = 241;
            cfg.circle_nodes = 32;
        } else {
            cfg.A = ShiftMultiset{cplx{0.012, 0.0}, cplx{-0.018, 0.0}};
            cfg.B = ShiftMultiset{cplx{0.006, 0.0}, cplx{-0.012, 0.0}};
            cfg.line_height = 4.0;
            cfg.line_nodes = 41;
            cfg.circle_nodes = 12;
        }
        cfg.P_cut = 200;
    }
    cfg.ell = ell;
    MomentConfig mc = to_moment_config(cfg);

    const double t0 = now_seconds();
    const LineIntegral vd = vandermonde_S_ell(ell, cfg.A, cfg.B, mc);
    const double t1 = now_seconds();

    // The summed swap terms on the same vertical line (the contour form
    // integrates over Re(xi + eta) = 4 epsilon, so the swap side is evaluated
    // there rather than at its own default abscissa).
    const ArithContext ctx(4096, 101);
    LineIntegral swaps;
    for (const auto& uv : enumerate_swaps(cfg.A, cfg.B, static_cast<std::size_t>(ell))) {
        const LineIntegral term =
            swap_term(ctx, cfg.A, cfg.B, uv.first, uv.second, mc, 4.0 * cfg.epsilon);
        swaps.value += term.value;
        swaps.line_tail_rel = std::max(swaps.line_tail_rel, term.line_tail_rel);
        swaps.euler_tail_rel = std::max(swaps.euler_tail_rel, term.euler_tail_rel);
    }
    const double dt = now_seconds() - t1;

    std::vector<ComparisonRow> rows;
    ComparisonRow row;
    row.label = "ell=" + std::to_string(ell);
    row.lhs = vd.value;
    row.rhs = swaps.value;
    row.params_digest = digest_hex(math_params(cfg));
    row.seconds = (t1 - t0) + dt;
    rows.push_back(row);

    ordered_json jrows = ordered_json::array();
    ordered_json o = row_json(row, cfg.timing);
    o["ell"] = ell;
    o["vandermonde_seconds"] = cfg.timing ? t1 - t0 : 0.0;
    o["swap_seconds"] = cfg.timing ? dt : 0.0;
    o["vandermonde_line_tail_rel"] = vd.line_tail_rel;
    o["vandermonde_euler_tail_rel"] = vd.euler_tail_rel;
    o["swap_line_tail_rel"] = swaps.line_tail_rel;
    o["swap_euler_tail_rel"] = swaps.euler_tail_rel;
    o["truncations"] = moment_truncations_json(cfg);
    jrows.push_back(o);
    return finish_compare(cfg, "vandermonde", rows, jrows);
}

// ---------------------------------------------------------------- report ---

int cmd_report(const std::vector<std::string>& files, const std::string& out) {
    std::vector<std::string> texts;
    texts.reserve(files.size());
    for (const std::string& f : files) texts.push_back(read_text_file(f));
    const std::string merged = merge_csv(texts);
    if (out.empty())
        std::fputs(merged.c_str(), stdout);
    else
        write_text_file(out, merged);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for shifted moments of the Riemann zeta function"};
    app.require_subcommand(1);
    app.footer("Exit codes: 0 pass, 1 tolerance failure, 2 usage/config error.\n"
               "Worker threads come from ZETALAB_THREADS (default 1).");

    int rc = 0;

    struct VerifyOpts {
        std::string config, suite, out_csv, out_json;
        std::uint64_t seed = 0;
        double tol = 0.0;
        bool timing = false;
    } vo;
    CLI::App* verify = app.add_subcommand(
        "verify", "run named identity suites over seeded random instances");
    verify->add_option("--config", vo.config, "JSON config file");
    verify->add_option("--suite", vo.suite, "suite name (default: every suite)");
    CLI::Option* vseed = verify->add_option("--seed", vo.seed, "random seed");
    verify->add_option("--tol", vo.tol, "override every tolerance gate");
    verify->add_option("--out-csv", vo.out_csv, "write rows as CSV to this path");
    verify->add_option("--out-json", vo.out_json, "write a machine-readable summary here");
    CLI::Option* vtiming =
        verify->add_flag("--timing", vo.timing, "record wall-clock seconds in reports");
    verify->callback([&] {
        RunConfig cfg = load_config(vo.config, "verify");
        if (!vo.suite.empty()) cfg.suite = vo.suite;
        if (vseed->count() > 0) cfg.seed = vo.seed;
        if (!vo.out_csv.empty()) cfg.out_csv = vo.out_csv;
        if (!vo.out_json.empty()) cfg.out_json = vo.out_json;
        if (vtiming->count() > 0) cfg.timing = true;
        rc = cmd_verify(cfg, vo.tol);
    });

    struct CorrelateOpts {
        std::string config, out_csv, out_json;
        double gate = 0.0;
        bool timing = false;
    } co;
    CLI::App* correlate = app.add_subcommand(
        "correlate", "exact divisor-correlation window sums vs the delta-method prediction");
    correlate->add_option("--config", co.config, "JSON config file");
    correlate->add_option("--out-csv", co.out_csv, "write rows as CSV to this path");
    correlate->add_option("--out-json", co.out_json, "write a machine-readable summary here");
    CLI::Option* cgate = correlate->add_option(
        "--gate-rel", co.gate, "exit 1 if any row exceeds this relative error");
    CLI::Option* ctiming =
        correlate->add_flag("--timing", co.timing, "record wall-clock seconds in reports");
    correlate->callback([&] {
        RunConfig cfg = load_config(co.config, "correlate");
        if (!co.out_csv.empty()) cfg.out_csv = co.out_csv;
        if (!co.out_json.empty()) cfg.out_json = co.out_json;
        if (cgate->count() > 0) cfg.gate_rel = co.gate;
        if (ctiming->count() > 0) cfg.timing = true;
        rc = cmd_correlate(cfg);
    });

    struct CompareOpts {
        std::string config, out_csv, out_json;
        double gate = 0.0;
        bool timing = false;
        int ell = 1;
    } mo, vdo;
    CLI::App* moments =
        app.add_subcommand("moments", "direct moment vs the recipe prediction");
    moments->description(
        "direct moment vs the recipe prediction\n"
        "Without --config, compares the default instance A={0.01}, B={-0.01}\n"
        "at T=2000, X=1000. Explicitly empty shift arrays in a config select\n"
        "the trivial moment psi-hat(0) Upsilon(1/X)^2.");
    moments->add_option("--config", mo.config, "JSON config file");
    moments->add_option("--out-csv", mo.out_csv, "write rows as CSV to this path");
    moments->add_option("--out-json", mo.out_json, "write a machine-readable summary here");
    CLI::Option* mgate = moments->add_option(
        "--gate-rel", mo.gate, "exit 1 if any row exceeds this relative error");
    CLI::Option* mtiming =
        moments->add_flag("--timing", mo.timing, "record wall-clock seconds in reports");
    moments->callback([&] {
        RunConfig cfg = load_config(mo.config, "moments");
        if (!mo.out_csv.empty()) cfg.out_csv = mo.out_csv;
        if (!mo.out_json.empty()) cfg.out_json = mo.out_json;
        if (mgate->count() > 0) cfg.gate_rel = mo.gate;
        if (mtiming->count() > 0) cfg.timing = true;
        rc = cmd_moments(cfg, !mo.config.empty());
    });

    CLI::App* vandermonde = app.add_subcommand(
        "vandermonde", "stratum terms: contour form vs summed swap terms");
    vandermonde->description(
        "stratum terms: contour form vs summed swap terms\n"
        "Without --config, runs a built-in reduced profile: ell=1 uses\n"
        "A={0.01}, B={-0.01}; ell=2 uses A={0.012,-0.018}, B={0.006,-0.012}.");
    vandermonde->add_option("--config", vdo.config, "JSON config file");
    CLI::Option* vdell =
        vandermonde->add_option("--ell", vdo.ell, "stratification level (1 or 2)");
    vandermonde->add_option("--out-csv", vdo.out_csv, "write rows as CSV to this path");
    vandermonde->add_option("--out-json", vdo.out_json,
                            "write a machine-readable summary here");
    CLI::Option* vdgate = vandermonde->add_option(
        "--gate-rel", vdo.gate, "exit 1 if any row exceeds this relative error");
    CLI::Option* vdtiming =
        vandermonde->add_flag("--timing", vdo.timing, "record wall-clock seconds in reports");
    vandermonde->callback([&] {
        RunConfig cfg = load_config(vdo.config, "vandermonde");
        if (!vdo.out_csv.empty()) cfg.out_csv = vdo.out_csv;
        if (!vdo.out_json.empty()) cfg.out_json = vdo.out_json;
        if (vdgate->count() > 0) cfg.gate_rel = vdo.gate;
        if (vdtiming->count() > 0) cfg.timing = true;
        const int ell = vdell->count() > 0 ? vdo.ell : cfg.ell;
        rc = cmd_vandermonde(cfg, !vdo.config.empty(), ell);
    });

    struct ReportOpts {
        std::vector<std::string> merge;
        std::string out;
    } ro;
    CLI::App* report =
        app.add_subcommand("report", "merge CSV reports produced by other subcommands");
    report->add_option("--merge", ro.merge, "CSV report files to merge")
        ->required()
        ->expected(1, -1);
    report->add_option("--out", ro.out, "merged CSV destination (default: stdout)");
    report->callback([&] { rc = cmd_report(ro.merge, ro.out); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return rc;
}
