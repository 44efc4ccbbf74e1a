#include "rabi/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>

#include "rabi/dressed.hpp"
#include "rabi/qrm.hpp"
#include "rabi/srm.hpp"

namespace rabi {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct PresetSpec {
    const char* fig;
    double eps_omega_rel; // in units of omega0
    double eta_omega;
    double eps_g_rel;     // in units of g0
    double eta_g;
    double t_star;
};

// All scenarios share omega0 = 2.98497 nu and check_g0 = 0.1 nu / alpha.
constexpr double kOmega0 = 2.98497;
constexpr double kG0 = 0.1;

constexpr PresetSpec kPresets[] = {
    {"fig2", 0.00, 0.0, 0.00, 0.0, 18910.0},
    {"fig4", 0.02, 2.0, 0.00, 0.0, 23820.0},
    {"fig5", 0.02, 2.0, -0.02, 4.0, 24840.0},
    {"fig6", 0.02, 0.4, -0.02, 1.6, 14690.0},
    {"fig7", 0.02, 0.4, -0.02, 2.4, 24440.0},
    {"fig8", 0.04, 2.3, -0.04, 1.7, 25170.0},
    {"fig9", 0.04, 2.3, -0.04, 6.3, 26950.0},
};

} // namespace

std::string engine_name(Engine e) {
    switch (e) {
        case Engine::srm_analytic: return "srm_analytic";
        case Engine::srm_exact: return "srm_exact";
        case Engine::qrm_full: return "qrm_full";
        case Engine::qrm_reduced: return "qrm_reduced";
    }
    return "?";
}

Engine engine_from_name(const std::string& name) {
    for (Engine e : {Engine::srm_analytic, Engine::srm_exact, Engine::qrm_full,
                     Engine::qrm_reduced})
        if (engine_name(e) == name) return e;
    throw UnknownPreset("unknown engine: " + name);
}

Scenario preset(const std::string& name) {
    const auto colon = name.find(':');
    if (colon == std::string::npos)
        throw UnknownPreset("preset name must look like figN:a5e3, got: " + name);
    const std::string fig = name.substr(0, colon);
    const std::string atag = name.substr(colon + 1);
    double alpha2 = 0.0;
    if (atag == "a5e3")
        alpha2 = 5.0e3;
    else if (atag == "a3e4")
        alpha2 = 3.0e4;
    else
        throw UnknownPreset("unknown alpha tag: " + atag);
    for (const PresetSpec& spec : kPresets) {
        if (fig != spec.fig) continue;
        const double alpha = std::sqrt(alpha2);
        SrmParams srm;
        srm.nu = 1.0;
        srm.omega0 = kOmega0;
        srm.g0 = kG0;
        srm.eps_omega = spec.eps_omega_rel * kOmega0;
        srm.eta_omega = spec.eta_omega;
        srm.eps_g = spec.eps_g_rel * kG0;
        srm.eta_g = spec.eta_g;
        Scenario s;
        s.name = name;
        s.qrm = make_qrm_params(srm, alpha, 3);
        s.t_end = 3.0e4;
        s.sample_count = 2000;
        s.t_star = spec.t_star;
        s.engines = {Engine::srm_analytic, Engine::srm_exact, Engine::qrm_full};
        return s;
    }
    throw UnknownPreset("unknown preset: " + name);
}

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const PresetSpec& spec : kPresets)
        for (const char* tag : {"a5e3", "a3e4"})
            names.push_back(std::string(spec.fig) + ":" + tag);
    return names;
}

std::string serialize_scenario(const Scenario& s) {
    char buf[512];
    const SrmParams& p = s.qrm.srm;
    std::snprintf(buf, sizeof(buf),
                  "%s nu=%.17g omega0=%.17g g0=%.17g eps_omega=%.17g "
                  "eta_omega=%.17g eps_g=%.17g eta_g=%.17g alpha=%.17g "
                  "check_g0=%.17g check_eps_g=%.17g K=%d tail_eps=%.17g "
                  "t_end=%.17g samples=%d t_star=%.17g\n",
                  s.name.c_str(), p.nu, p.omega0, p.g0, p.eps_omega, p.eta_omega,
                  p.eps_g, p.eta_g, s.qrm.alpha, s.qrm.check_g0, s.qrm.check_eps_g,
                  s.qrm.k_photon, s.qrm.tail_eps, s.t_end, s.sample_count,
                  s.t_star.value_or(-1.0));
    return buf;
}

namespace {

std::vector<double> uniform_grid(double t_end, int count) {
    std::vector<double> t(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        t[static_cast<std::size_t>(i)] = t_end * static_cast<double>(i) /
                                         static_cast<double>(count - 1);
    return t;
}

ObservableSample srm_sample(double t, double pe) {
    ObservableSample s;
    s.t = t;
    s.pe = pe;
    s.dn = s.s_vn = s.s_lin = s.p_init = s.p_coh = kNan;
    return s;
}

EngineSeries run_srm_analytic(const Scenario& sc, const std::vector<double>& grid) {
    const auto start = std::chrono::steady_clock::now();
    EngineSeries out;
    out.engine = Engine::srm_analytic;
    const SrmAnalytic a = srm_analytic(sc.qrm.srm);
    out.samples.reserve(grid.size());
    for (double t : grid)
        out.samples.push_back(srm_sample(t, pe_analytic(a, t)));
    out.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    return out;
}

EngineSeries run_srm_exact(const Scenario& sc, const std::vector<double>& grid,
                           double tol) {
    const auto start = std::chrono::steady_clock::now();
    EngineSeries out;
    out.engine = Engine::srm_exact;
    out.samples.resize(grid.size());
    const SrmParams& p = sc.qrm.srm;
    const DerivedSrm d = derive_srm(p);
    const SlowAmplitudes init = ground_state_amplitudes(d);
    // the norm-drift contract (<= 1e-8 over the span) needs 1e-12 here
    const double srm_tol = std::min(tol, 1e-12);
    const OdeStats stats = evolve_exact(
        p, d, init, 0.0, sc.t_end, grid,
        [&](std::size_t i, double t, const SlowAmplitudes& amps) {
            out.samples[i] = srm_sample(t, pe_from_amplitudes(p, d, d.R, amps, t));
            out.norm_drift =
                std::max(out.norm_drift, std::abs(amps.norm2() - 1.0));
        },
        srm_tol, srm_tol);
    out.steps = stats.n_accepted;
    out.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    return out;
}

struct QrmOutput {
    EngineSeries series;
    std::optional<PhotonDelta> photon;
};

QrmOutput run_qrm_full(const Scenario& sc, const std::vector<double>& grid,
                       double tol, Frame frame) {
    const auto start = std::chrono::steady_clock::now();
    QrmOutput out;
    out.series.engine = Engine::qrm_full;
    out.series.samples.resize(grid.size());

    const FockWindow w = fock_window(sc.qrm.alpha, sc.qrm.tail_eps);
    const HamiltonianAction h = build_hamiltonian(sc.qrm, w, frame);
    const JointState psi0 = ground_coherent_state(sc.qrm.alpha, w, frame);

    // merge grid with the snapshot time; remember which indices are grid rows
    std::vector<double> times = grid;
    std::optional<double> t_star;
    if (sc.t_star && *sc.t_star <= sc.t_end + 1e-9) t_star = *sc.t_star;
    if (t_star) times.push_back(*t_star);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end(),
                            [](double a, double b) {
                                return std::abs(a - b) <= 1e-9 * (std::abs(a) + 1.0);
                            }),
                times.end());

    std::size_t grid_next = 0;
    const IntegrationResult res = integrate_schrodinger(
        h, psi0, 0.0, sc.t_end, times,
        [&](std::size_t, double t, const JointState& psi) {
            if (t_star && std::abs(t - *t_star) <= 1e-9 * (t + 1.0))
                out.photon = photon_delta(psi, psi0);
            if (grid_next < grid.size() &&
                std::abs(t - grid[grid_next]) <= 1e-9 * (t + 1.0)) {
                out.series.samples[grid_next] =
                    observe(psi, psi0, sc.qrm.alpha, t, sc.qrm.srm.nu);
                ++grid_next;
            }
        },
        /*rtol=*/1e-8, /*atol=*/tol);
    out.series.norm_drift = res.max_norm_drift;
    out.series.steps = res.stats.n_accepted;
    out.series.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    return out;
}

EngineSeries run_qrm_reduced(const Scenario& sc, const std::vector<double>& grid,
                             double tol) {
    const auto start = std::chrono::steady_clock::now();
    EngineSeries out;
    out.engine = Engine::qrm_reduced;
    out.samples.resize(grid.size());

    const FockWindow w = fock_window(sc.qrm.alpha, sc.qrm.tail_eps);
    const DressedBasis basis = dressed_states(sc.qrm, w);
    const JointState psi0 = ground_coherent_state(sc.qrm.alpha, w, Frame::lab);
    const DressedAmplitudes amps0 = project_to_dressed(psi0, basis);
    const int order =
        (sc.qrm.srm.eps_omega != 0.0 && sc.qrm.check_eps_g != 0.0) ? 2 : 1;

    ReducedOptions opt;
    opt.rtol = 1e-10;
    opt.atol = tol;
    const OdeStats stats = evolve_dressed_slow(
        basis, sc.qrm, amps0, order, 0.0, sc.t_end, grid,
        [&](std::size_t i, double t, const JointState& psi) {
            out.samples[i] = observe(psi, psi0, sc.qrm.alpha, t, sc.qrm.srm.nu);
            out.norm_drift = std::max(out.norm_drift, std::abs(psi.norm2() - 1.0));
        },
        opt);
    out.steps = stats.n_accepted;
    out.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    return out;
}

} // namespace

RunResult run(const Scenario& s, int threads, double tol, Frame frame) {
    if (s.sample_count < 2) throw DomainError("run: sample_count must be >= 2");
    if (s.t_star && *s.t_star > s.t_end + 1e-9)
        throw DomainError("run: t_star beyond t_end");
    const std::vector<double> grid = uniform_grid(s.t_end, s.sample_count);

    RunResult result;
    result.scenario = s.name;
    result.t_end = s.t_end;

    std::optional<PhotonDelta> photon;
    auto execute = [&](Engine e) -> EngineSeries {
        switch (e) {
            case Engine::srm_analytic: return run_srm_analytic(s, grid);
            case Engine::srm_exact: return run_srm_exact(s, grid, tol);
            case Engine::qrm_full: {
                QrmOutput q = run_qrm_full(s, grid, tol, frame);
                photon = std::move(q.photon);
                return std::move(q.series);
            }
            case Engine::qrm_reduced: return run_qrm_reduced(s, grid, tol);
        }
        throw DomainError("run: unknown engine");
    };

    if (threads > 1 && s.engines.size() > 1) {
        std::vector<std::future<EngineSeries>> futures;
        futures.reserve(s.engines.size());
        for (Engine e : s.engines)
            futures.push_back(
                std::async(std::launch::async, [&execute, e] { return execute(e); }));
        for (auto& f : futures) result.series.push_back(f.get());
    } else {
        for (Engine e : s.engines) result.series.push_back(execute(e));
    }
    result.photon = std::move(photon);
    return result;
}

CostEstimate estimate_cost(const Scenario& s) {
    CostEstimate c;
    const FockWindow w = fock_window(s.qrm.alpha, s.qrm.tail_eps);
    c.window_size = w.size();
    c.state_dim = 2 * w.size();
    // step ~ 0.05 / nu against the rotating-frame frequencies (~Omega0)
    c.est_qrm_steps = s.t_end / 0.05;
    return c;
}

void write_csv(const RunResult& r, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw Error("write_csv: cannot open " + path);
    std::fprintf(f, "t,engine,pe,dn,s_vn,s_lin,p_init,p_coh\n");
    for (const EngineSeries& es : r.series) {
        const std::string name = engine_name(es.engine);
        for (const ObservableSample& s : es.samples)
            std::fprintf(f, "%.12g,%s,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", s.t,
                         name.c_str(), s.pe, s.dn, s.s_vn, s.s_lin, s.p_init,
                         s.p_coh);
    }
    if (std::fclose(f) != 0) throw Error("write_csv: close failed for " + path);

    if (r.photon) {
        const auto dot = path.rfind('.');
        const std::string stem = dot == std::string::npos ? path : path.substr(0, dot);
        const std::string ppath = stem + "_photons.csv";
        std::FILE* pf = std::fopen(ppath.c_str(), "w");
        if (!pf) throw Error("write_csv: cannot open " + ppath);
        std::fprintf(pf, "n,p0,pt,delta\n");
        const PhotonDelta& d = *r.photon;
        for (std::size_t j = 0; j < d.delta.size(); ++j)
            std::fprintf(pf, "%lld,%.12g,%.12g,%.12g\n",
                         static_cast<long long>(d.window.n_min +
                                                static_cast<std::int64_t>(j)),
                         d.p0[j], d.pt[j], d.delta[j]);
        if (std::fclose(pf) != 0) throw Error("write_csv: close failed for " + ppath);
    }
}

std::pair<double, double> first_pe_maximum(const std::vector<ObservableSample>& s) {
    const std::size_t n = s.size();
    if (n < 3) throw DomainError("first_pe_maximum: need at least 3 samples");
    // moving average over 5 points to wash out the aliased 2 nu fringe
    std::vector<double> sm(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        int cnt = 0;
        for (int k = -2; k <= 2; ++k) {
            const std::int64_t j = static_cast<std::int64_t>(i) + k;
            if (j >= 0 && j < static_cast<std::int64_t>(n)) {
                acc += s[static_cast<std::size_t>(j)].pe;
                ++cnt;
            }
        }
        sm[i] = acc / cnt;
    }
    const double global_max = *std::max_element(sm.begin(), sm.end());
    // hysteresis: enter the first peak region at 0.9*max, leave below 0.5*max
    std::size_t i0 = 0;
    while (i0 < n && sm[i0] < 0.9 * global_max) ++i0;
    if (i0 == n) return {s[n - 1].t, sm[n - 1]};
    std::size_t i1 = i0;
    while (i1 < n && sm[i1] >= 0.5 * global_max) ++i1;
    std::size_t peak = i0;
    for (std::size_t i = i0; i < i1; ++i)
        if (sm[i] > sm[peak]) peak = i;
    double t_peak = s[peak].t;
    if (peak > 0 && peak + 1 < n) {
        const double a = sm[peak - 1], b = sm[peak], c = sm[peak + 1];
        const double denom = a - 2.0 * b + c;
        if (denom != 0.0) {
            const double shift = std::clamp(0.5 * (a - c) / denom, -1.0, 1.0);
            t_peak += shift * (s[1].t - s[0].t);
        }
    }
    return {t_peak, sm[peak]};
}

Summary summarize(const RunResult& r) {
    Summary sum;
    sum.scenario = r.scenario;
    const EngineSeries* analytic = nullptr;
    const EngineSeries* qrm = nullptr;
    for (const EngineSeries& es : r.series) {
        EngineSummary e;
        e.engine = es.engine;
        std::tie(e.first_max_t, e.first_max_pe) = first_pe_maximum(es.samples);
        e.dn_min = std::numeric_limits<double>::infinity();
        for (const ObservableSample& s : es.samples) {
            if (!std::isnan(s.dn)) e.dn_min = std::min(e.dn_min, s.dn);
            if (!std::isnan(s.s_vn)) e.s_vn_max = std::max(e.s_vn_max, s.s_vn);
            if (!std::isnan(s.s_lin)) e.s_lin_max = std::max(e.s_lin_max, s.s_lin);
        }
        if (!std::isfinite(e.dn_min)) e.dn_min = kNan;
        sum.engines.push_back(e);
        if (es.engine == Engine::srm_analytic) analytic = &es;
        if (es.engine == Engine::qrm_full) qrm = &es;
    }
    if (analytic && qrm) {
        const double period = 2.0 * first_pe_maximum(analytic->samples).first;
        double gap = 0.0;
        for (std::size_t i = 0; i < analytic->samples.size(); ++i) {
            if (analytic->samples[i].t > period) break;
            gap = std::max(gap,
                           std::abs(analytic->samples[i].pe - qrm->samples[i].pe));
        }
        sum.qrm_srm_gap = gap;
    }
    return sum;
}

std::vector<RateTableRow> rate_table(const std::vector<double>& omega0_values,
                                     double g0, double nu) {
    std::vector<RateTableRow> rows;
    rows.reserve(omega0_values.size());
    for (double omega0 : omega0_values) {
        SrmParams p;
        p.nu = nu;
        p.omega0 = omega0;
        p.g0 = g0;
        const DerivedSrm d = derive_srm(p);
        const auto terms = expand_harmonics(p, d, 0);
        RateTableRow row{omega0, {0.0, 0.0, 0.0, 0.0, 0.0}};
        for (const auto& t : terms) {
            if (t.a != 0 || t.b != 0) continue;
            if (t.w <= 0 && t.w >= -4)
                row.xi[static_cast<std::size_t>(-t.w)] = std::abs(t.amplitude);
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace rabi
