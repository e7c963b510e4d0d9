#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bess/capability.hpp"
#include "bess/config.hpp"
#include "bess/core.hpp"
#include "bess/discretizer.hpp"

namespace bess {

/// Uniformly spaced grid measurements.
struct Trace {
    std::vector<GridMeasurement> samples;
    double dt_s = 0.1;
};

/// Synthetic grid trace: mean-reverting walks for frequency (around
/// f_nom) and AC voltage (around 1 pu). Identical seeds give bit-identical
/// traces; zero volatility gives a constant trace.
Trace gen_trace(std::uint64_t seed, double duration_s, const OuParams& ou, double f_nom);

enum class TickStatus {
    passthrough,         ///< initial set-point applied unchanged
    projected,           ///< set-point moved onto the feasible region
    zeroed,              ///< baseline protection reset the set-point to zero
    infeasible,          ///< projection found no feasible point; zero applied
    battery_infeasible,  ///< plant DC-voltage solve failed mid-tick; zero applied
    soc_violation        ///< SoC left [0, 1]; never expected, kept loud
};

const char* to_string(TickStatus s);
TickStatus tick_status_from_string(const std::string& s);

struct TickRecord {
    double t;
    double f;
    double v_ac;
    double p0, q0;        ///< droop output [pu]
    double p, q;          ///< applied set-point [pu]
    double v_dc;          ///< DC-bus voltage at end of tick [pu]
    double soc;           ///< SoC at end of tick
    bool initial_feasible;
    double latency_us;    ///< projection-stage wall time
    TickStatus status;
};

struct TickLog {
    std::vector<TickRecord> ticks;
};

struct EnergyMetrics {
    double tde_kwh = 0.0;  ///< total discharged energy
    double tce_kwh = 0.0;  ///< total charged energy
    double tse_kwh = 0.0;  ///< energy delivered at initially-infeasible ticks
};

enum class Method { optimizer, fast, baseline };

Method method_from_string(const std::string& s);

struct SimResult {
    TickLog log;
    EnergyMetrics metrics;
};

/// Closed-loop run: droop -> projection (per `method`) -> battery plant in
/// delta_t substeps, one tick per trace sample. Projection or plant
/// infeasibility zeroes that tick's power and the run continues. The fast
/// method may be seeded with a previously saved ray table; it is adopted
/// for its curve bin and rebuilt whenever the context drifts.
SimResult simulate(const Trace& trace, Method method, const Config& cfg,
                   const CapabilityCurveSet& curves, double soc0 = 0.5,
                   const RayTable* seed_table = nullptr);

/// Recompute metrics from a log (same accumulation order as simulate, so
/// results agree exactly).
EnergyMetrics metrics_from_log(const TickLog& log, const Config& cfg);

struct LatencySummary {
    double median_us;
    double p99_us;
    double max_us;
};

struct HistogramBin {
    double lo_us, hi_us;
    std::uint64_t count;
};

struct BenchResult {
    std::vector<double> solve_us;  ///< per-tick samples, warm-up excluded
    std::vector<double> fast_us;
    LatencySummary solve_summary;
    LatencySummary fast_summary;
};

/// Time solve() and fast_project() on identical per-tick inputs over the
/// trace; the plant evolves with the optimizer's output. The first
/// `warmup` ticks are executed but excluded from the samples. Ray-table
/// rebuilds happen outside the timed window (they are offline work).
BenchResult bench(const Trace& trace, const Config& cfg, const CapabilityCurveSet& curves,
                  double soc0 = 0.5, int warmup = 100);

LatencySummary summarize_latencies(std::vector<double> samples_us);
std::vector<HistogramBin> make_histogram(const std::vector<double>& samples_us, int bins = 40);

// CSV I/O (all headers as documented in the README; floats round-trip).
void write_trace_csv(const Trace& trace, const std::string& path);
Trace read_trace_csv(const std::string& path);
void write_ticklog_csv(const TickLog& log, const std::string& path);
TickLog read_ticklog_csv(const std::string& path);
void write_metrics_csv(const EnergyMetrics& m, const std::string& path);
std::string metrics_csv(const EnergyMetrics& m);
void write_histogram_csv(const std::vector<HistogramBin>& bins, const std::string& path);

}  // namespace bess
