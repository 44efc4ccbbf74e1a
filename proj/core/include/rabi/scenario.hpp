#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rabi/observables.hpp"
#include "rabi/params.hpp"

namespace rabi {

enum class Engine { srm_analytic, srm_exact, qrm_full, qrm_reduced };

std::string engine_name(Engine e);
Engine engine_from_name(const std::string& name);

// One reproducible run: parameters, span, grid, snapshot time and engines.
struct Scenario {
    std::string name;
    QrmParams qrm;
    double t_end = 3.0e4;
    int sample_count = 2000;
    std::optional<double> t_star; // photon-statistics snapshot time
    std::vector<Engine> engines;
};

// Catalog of the built-in scenarios: "figN:a5e3" / "figN:a3e4" with
// N in {2,4,5,6,7,8,9}. Throws UnknownPreset otherwise.
Scenario preset(const std::string& name);
std::vector<std::string> preset_names();

// Stable text form of a scenario (all parameters, fixed formatting); used by
// the catalog bit-stability check and `presets`.
std::string serialize_scenario(const Scenario& s);

struct EngineSeries {
    Engine engine = Engine::srm_analytic;
    std::vector<ObservableSample> samples; // one per grid point
    double norm_drift = 0.0;
    std::size_t steps = 0;
    double wall_seconds = 0.0;
};

struct RunResult {
    std::string scenario;
    double t_end = 0.0;
    std::vector<EngineSeries> series;
    std::optional<PhotonDelta> photon; // snapshot at t_star (qrm_full engine)
};

// Runs every requested engine on the shared uniform grid. threads > 1 lets
// independent engines run concurrently (they share only immutable inputs).
RunResult run(const Scenario& s, int threads = 1, double tol = 1e-10,
              Frame frame = Frame::rotating);

// Rough cost figures the CLI prints before a run.
struct CostEstimate {
    std::int64_t window_size = 0;
    std::int64_t state_dim = 0;
    double est_qrm_steps = 0.0;
};
CostEstimate estimate_cost(const Scenario& s);

// CSV emission: header "t,engine,pe,dn,s_vn,s_lin,p_init,p_coh", one row per
// (sample, engine), 12 significant digits. The photon snapshot goes to a
// sibling file "<stem>_photons.csv" with header "n,p0,pt,delta".
void write_csv(const RunResult& r, const std::string& path);

struct EngineSummary {
    Engine engine;
    double first_max_t = 0.0;
    double first_max_pe = 0.0;
    double dn_min = 0.0;
    double s_vn_max = 0.0;
    double s_lin_max = 0.0;
};

struct Summary {
    std::string scenario;
    std::vector<EngineSummary> engines;
    // max |P_e(qrm_full) - P_e(srm_analytic)| over the first analytic period;
    // present only when both engines ran.
    std::optional<double> qrm_srm_gap;
};

Summary summarize(const RunResult& r);

// First P_e maximum of a sampled curve: the curve is lightly smoothed (the
// 2 nu interference fringe aliases on coarse grids), then the first local
// maximum above 80% of the global maximum is refined parabolically.
std::pair<double, double> first_pe_maximum(const std::vector<ObservableSample>& s);

// Table of 0th-order coefficient magnitudes |Xi_{-R}|, |Xi_{-2-R}|,
// |Xi_{-4-R}|, |Xi_{-6-R}|, |Xi_{-8-R}| for a grid of omega0 values.
struct RateTableRow {
    double omega0;
    double xi[5];
};
std::vector<RateTableRow> rate_table(const std::vector<double>& omega0_values,
                                     double g0, double nu = 1.0);

} // namespace rabi
