// rabisim — scenario runner for the semiclassical / quantum Rabi engines.
//
// Subcommands:
//   run        integrate a scenario and emit observables as CSV
//   presets    list the built-in scenario catalog
//   table1     print the 0th-order transition-rate magnitudes
//   resonance  print the self-consistent multiphoton resonance frequency
//   fom        figure-of-merit scan over dressed-state transitions (CSV)

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "rabi/dressed.hpp"
#include "rabi/scenario.hpp"
#include "rabi/srm.hpp"

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

struct RunConfig {
    std::string preset;
    double alpha2 = 0.0; // 0 = keep preset value
    std::string engines;
    double t_end = 0.0;  // 0 = keep preset value
    int samples = 0;
    double tol = 1e-10;
    std::string out = "run.csv";
    std::string frame = "rotating";
    int threads = 1;
};

// flat key=value file, '#' comments; CLI flags override
void load_config_file(const std::string& path, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw rabi::UnknownPreset("cannot open config file: " + path);
    std::string line;
    std::map<std::string, std::string> kv;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    auto get = [&](const char* key, auto& slot) {
        auto it = kv.find(key);
        if (it == kv.end()) return;
        std::stringstream ss(it->second);
        ss >> slot;
        if (ss.fail())
            throw rabi::UnknownPreset(std::string("bad config value for ") + key);
        kv.erase(it);
    };
    get("preset", cfg.preset);
    get("alpha2", cfg.alpha2);
    get("engines", cfg.engines);
    get("t_end", cfg.t_end);
    get("samples", cfg.samples);
    get("tol", cfg.tol);
    get("out", cfg.out);
    get("frame", cfg.frame);
    get("threads", cfg.threads);
    if (!kv.empty())
        throw rabi::UnknownPreset("unknown config key: " + kv.begin()->first);
}

int cmd_run(const RunConfig& cfg) {
    if (cfg.preset.empty())
        throw rabi::UnknownPreset("run: no preset given (flag --preset or config)");
    rabi::Scenario sc = rabi::preset(cfg.preset);
    if (cfg.alpha2 > 0.0)
        sc.qrm = rabi::make_qrm_params(sc.qrm.srm, std::sqrt(cfg.alpha2),
                                       sc.qrm.k_photon, sc.qrm.tail_eps);
    if (cfg.t_end > 0.0) {
        sc.t_end = cfg.t_end;
        if (sc.t_star && *sc.t_star > sc.t_end) sc.t_star.reset();
    }
    if (cfg.samples > 1) sc.sample_count = cfg.samples;
    if (!cfg.engines.empty()) {
        sc.engines.clear();
        for (const std::string& name : split(cfg.engines, ','))
            sc.engines.push_back(rabi::engine_from_name(name));
    }
    rabi::Frame frame;
    if (cfg.frame == "rotating")
        frame = rabi::Frame::rotating;
    else if (cfg.frame == "lab")
        frame = rabi::Frame::lab;
    else
        throw rabi::UnknownPreset("unknown frame: " + cfg.frame);

    const rabi::CostEstimate cost = rabi::estimate_cost(sc);
    std::printf("# scenario %s: window %lld Fock states (state dim %lld)\n",
                sc.name.c_str(), static_cast<long long>(cost.window_size),
                static_cast<long long>(cost.state_dim));
    bool has_qrm = false;
    for (rabi::Engine e : sc.engines)
        has_qrm |= (e == rabi::Engine::qrm_full || e == rabi::Engine::qrm_reduced);
    if (has_qrm)
        std::printf("# qrm_full estimate: ~%.2g adaptive steps over t_end=%g "
                    "(roughly %.2g state updates)\n",
                    cost.est_qrm_steps, sc.t_end,
                    cost.est_qrm_steps * 8.0 * static_cast<double>(cost.state_dim));
    if (has_qrm && frame == rabi::Frame::lab)
        std::printf("# note: lab-frame steps resolve phases at nu*n_max; "
                    "expect orders of magnitude more work than --frame rotating\n");
    std::fflush(stdout);

    const rabi::RunResult result = rabi::run(sc, cfg.threads, cfg.tol, frame);
    rabi::write_csv(result, cfg.out);
    std::printf("# wrote %s\n", cfg.out.c_str());

    const rabi::Summary sum = rabi::summarize(result);
    for (const rabi::EngineSummary& e : sum.engines)
        std::printf("%-13s first_pe_max %.6g at t=%.6g  dn_min % .4g  "
                    "s_vn_max %.4g\n",
                    rabi::engine_name(e.engine).c_str(), e.first_max_pe,
                    e.first_max_t, e.dn_min, e.s_vn_max);
    for (const rabi::EngineSeries& es : result.series)
        std::printf("# %-13s steps %zu norm_drift %.3g wall %.1fs\n",
                    rabi::engine_name(es.engine).c_str(), es.steps, es.norm_drift,
                    es.wall_seconds);
    if (sum.qrm_srm_gap)
        std::printf("max |pe(qrm) - pe(srm_analytic)| over first period: %.4g\n",
                    *sum.qrm_srm_gap);
    return 0;
}

int cmd_presets() {
    for (const std::string& name : rabi::preset_names())
        std::fputs(rabi::serialize_scenario(rabi::preset(name)).c_str(), stdout);
    return 0;
}

int cmd_table1() {
    const std::vector<double> omegas{1.5, 2.0, 2.5, 3.0, 3.5};
    const auto rows = rabi::rate_table(omegas, 0.1);
    std::printf("%-12s", "coefficient");
    for (double w : omegas) std::printf("  omega0=%-6.3g", w);
    std::printf("\n");
    const char* names[5] = {"|Xi_{-R}|", "|Xi_{-2-R}|", "|Xi_{-4-R}|",
                            "|Xi_{-6-R}|", "|Xi_{-8-R}|"};
    for (int k = 0; k < 5; ++k) {
        std::printf("%-12s", names[k]);
        for (const auto& row : rows) std::printf("  %-13.3e", row.xi[k]);
        std::printf("\n");
    }
    return 0;
}

int cmd_resonance(int k, double g0, double tol) {
    const double omega0 = rabi::resonance_omega0(k, g0, 1.0, tol);
    rabi::SrmParams p;
    p.omega0 = omega0;
    p.g0 = g0;
    const rabi::DerivedSrm d = rabi::derive_srm(p);
    const rabi::FrequencyShift s = rabi::frequency_shift_for(p, d);
    std::printf("k=%d g0=%g: omega0 = %.9g nu  (delta = %.6g, r = %.9g)\n", k, g0,
                omega0, s.delta, s.r);
    return 0;
}

int cmd_fom(double alpha, double omega0, double eps_omega_rel, double eps_g_rel,
            double eta_omega, double eta_g, long long n_lo, long long n_hi,
            long long pad, const std::string& out) {
    rabi::SrmParams srm;
    srm.omega0 = omega0;
    srm.g0 = 0.1;
    srm.eps_omega = eps_omega_rel * omega0;
    srm.eta_omega = eta_omega;
    srm.eps_g = eps_g_rel * 0.1;
    srm.eta_g = eta_g;
    const rabi::QrmParams qrm = rabi::make_qrm_params(srm, alpha);

    const auto a2 = static_cast<long long>(alpha * alpha);
    if (n_lo <= 0) n_lo = a2 - 2 * static_cast<long long>(alpha);
    if (n_hi <= 0) n_hi = a2 + 2 * static_cast<long long>(alpha);
    rabi::FockWindow w{std::max<long long>(0, n_lo - pad), n_hi + pad};
    const rabi::DressedBasis basis = rabi::dressed_states(qrm, w);

    std::FILE* f = std::fopen(out.c_str(), "w");
    if (!f) throw rabi::Error("fom: cannot open " + out);
    std::fprintf(f, "n,f_O_S_A2,f_O_A_S2,f_g_S_A4,f_g_A_S4,"
                    "f_O_S_S2,f_O_A_A2,f_g_S_S4,f_g_A_A4\n");
    using rabi::ModKind;
    for (const rabi::DressedPair& p2 : basis.pairs) {
        if (p2.n < n_lo || p2.n > n_hi) continue;
        const rabi::DressedPair* q2 = basis.find_pair(p2.n + 2);
        const rabi::DressedPair* q4 = basis.find_pair(p2.n + 4);
        if (!q2 || !q4 || q4->n > n_hi + pad) continue;
        auto fom = [&](ModKind kind, int ca, int cb, double eta) {
            return rabi::figure_of_merit(kind, qrm, basis, ca, cb, eta);
        };
        std::fprintf(
            f, "%lld,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n",
            static_cast<long long>(p2.n),
            fom(ModKind::omega, p2.col_s, q2->col_a, eta_omega),
            fom(ModKind::omega, p2.col_a, q2->col_s, eta_omega),
            fom(ModKind::g, p2.col_s, q4->col_a, eta_g),
            fom(ModKind::g, p2.col_a, q4->col_s, eta_g),
            fom(ModKind::omega, p2.col_s, q2->col_s, eta_omega),
            fom(ModKind::omega, p2.col_a, q2->col_a, eta_omega),
            fom(ModKind::g, p2.col_s, q4->col_s, eta_g),
            fom(ModKind::g, p2.col_a, q4->col_a, eta_g));
    }
    std::fclose(f);
    std::printf("# wrote %s (%zu dressed pairs)\n", out.c_str(), basis.pairs.size());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"semiclassical / quantum Rabi model scenario runner"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;
    auto* run = app.add_subcommand("run", "integrate a scenario, write CSV");
    run->add_option("config", config_path, "flat key=value config file");
    run->add_option("--preset", cfg.preset, "scenario name, e.g. fig2:a5e3");
    run->add_option("--alpha2", cfg.alpha2, "override initial mean photon number");
    run->add_option("--engines", cfg.engines,
                    "comma list: srm_analytic,srm_exact,qrm_full,qrm_reduced");
    run->add_option("--t-end", cfg.t_end, "integration span (units 1/nu)");
    run->add_option("--samples", cfg.samples, "output grid size");
    run->add_option("--tol", cfg.tol, "absolute integrator tolerance");
    run->add_option("--out", cfg.out, "output CSV path");
    run->add_option("--frame", cfg.frame, "rotating | lab");
    run->add_option("--threads", cfg.threads, "max concurrent engines");

    auto* presets = app.add_subcommand("presets", "list the scenario catalog");

    auto* table1 = app.add_subcommand("table1", "0th-order rate magnitudes");

    int res_k = 1;
    double res_g0 = 0.1, res_tol = 1e-10;
    auto* resonance =
        app.add_subcommand("resonance", "self-consistent resonance frequency");
    resonance->add_option("--k", res_k, "resonance index ((2k+1)-photon)");
    resonance->add_option("--g0", res_g0, "bare coupling (units of nu)");
    resonance->add_option("--tol", res_tol, "fixed-point tolerance");

    double fom_alpha = 1e3, fom_omega0 = 2.984973, fom_eo = 0.02, fom_eg = -0.02,
           fom_etao = 2.0, fom_etag = 4.0;
    long long fom_lo = 0, fom_hi = 0, fom_pad = 60;
    std::string fom_out = "fom.csv";
    auto* fom = app.add_subcommand("fom", "figure-of-merit scan (CSV)");
    fom->add_option("--alpha", fom_alpha, "coherent amplitude");
    fom->add_option("--omega0", fom_omega0, "qubit frequency (units of nu)");
    fom->add_option("--eps-omega", fom_eo, "eps_Omega / Omega_0");
    fom->add_option("--eps-g", fom_eg, "check_eps_g / check_g0");
    fom->add_option("--eta-omega", fom_etao, "Omega-modulation frequency");
    fom->add_option("--eta-g", fom_etag, "g-modulation frequency");
    fom->add_option("--n-lo", fom_lo, "scan start (default alpha^2 - 2 alpha)");
    fom->add_option("--n-hi", fom_hi, "scan end (default alpha^2 + 2 alpha)");
    fom->add_option("--pad", fom_pad, "diagonalization window padding");
    fom->add_option("--out", fom_out, "output CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*run) {
            if (!config_path.empty()) {
                RunConfig file_cfg;
                load_config_file(config_path, file_cfg);
                // flags already parsed into cfg win over file values
                RunConfig merged = file_cfg;
                if (run->count("--preset")) merged.preset = cfg.preset;
                if (run->count("--alpha2")) merged.alpha2 = cfg.alpha2;
                if (run->count("--engines")) merged.engines = cfg.engines;
                if (run->count("--t-end")) merged.t_end = cfg.t_end;
                if (run->count("--samples")) merged.samples = cfg.samples;
                if (run->count("--tol")) merged.tol = cfg.tol;
                if (run->count("--out")) merged.out = cfg.out;
                if (run->count("--frame")) merged.frame = cfg.frame;
                if (run->count("--threads")) merged.threads = cfg.threads;
                return cmd_run(merged);
            }
            return cmd_run(cfg);
        }
        if (*presets) return cmd_presets();
        if (*table1) return cmd_table1();
        if (*resonance) return cmd_resonance(res_k, res_g0, res_tol);
        if (*fom)
            return cmd_fom(fom_alpha, fom_omega0, fom_eo, fom_eg, fom_etao,
                           fom_etag, fom_lo, fom_hi, fom_pad, fom_out);
    } catch (const rabi::UnknownPreset& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const rabi::Error& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
