#include "bess/cli.hpp"

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bess/battery.hpp"
#include "bess/capability.hpp"
#include "bess/config.hpp"
#include "bess/discretizer.hpp"
#include "bess/harness.hpp"
#include "bess/optimizer.hpp"

namespace bess::cli {

namespace {

struct ProjectArgs {
    std::string config = "./bess.conf";
    std::string curves = "./curves.conf";
    double p0 = 0.0, q0 = 0.0;
    double vac = 1.0, vdc = 1.0, soc = 0.5;
    std::string method = "opt";
};

/// Projection context for one-shot CLI use: rested battery (zero RC
/// branch voltages) at the given SoC and measured voltages.
ProjectionProblem one_shot_problem(const ProjectArgs& a, const Config& cfg,
                                   const CapabilityCurve& curve) {
    BatteryState st;
    st.soc = a.soc;
    st.vc = {0.0, 0.0, 0.0};
    st.v_dc = a.vdc;
    st.i_prev = 0.0;
    const PowerBounds pb = soc_power_bounds(st, cfg.battery, cfg.control.tick_s, cfg.base);
    return {Setpoint{a.p0, a.q0},
            curve,
            st.vc_sum(),
            ocv(st.soc, cfg.battery),
            cfg.battery.r_s,
            cfg.control.eta,
            pb.p_dc_min,
            pb.p_dc_max,
            cfg.battery.v_dc_min,
            cfg.battery.v_dc_max,
            cfg.control.xi};
}

int run_project(const ProjectArgs& a) {
    const Config cfg = load_config(a.config);
    const CapabilityCurveSet set = load_curves(a.curves);
    const CapabilityCurve& curve = select_curve(set, a.vac, a.vdc);
    const ProjectionProblem prob = one_shot_problem(a, cfg, curve);

    Setpoint s;
    bool tight = false;
    ProjectionStatus status;
    if (method_from_string(a.method) == Method::fast) {
        const RayTable table = build_table(RayContext{curve, prob.p_dc_min, prob.p_dc_max,
                                                      cfg.control.eta, a.vac, a.vdc, a.soc});
        s = fast_project(prob.s0, table);
        status = (s.p == prob.s0.p && s.q == prob.s0.q) ? ProjectionStatus::passthrough
                                                        : ProjectionStatus::feasible;
        const auto vs = v_star(p_dc_of_p_ac(s.p, branch_of(s.p), cfg.control.eta), prob);
        tight = vs.feasible && vs.tight;
    } else {
        const ProjectionResult r = solve(prob);
        if (r.status == ProjectionStatus::infeasible) {
            std::fprintf(stderr, "infeasible: no set-point admits a tight DC voltage\n");
            return 1;
        }
        s = r.s;
        tight = r.tight;
        status = r.status;
    }
    std::printf("%.17g,%.17g,%d,%s\n", s.p, s.q, tight ? 1 : 0, to_string(status));
    return 0;
}

void print_summary(const char* name, const LatencySummary& s) {
    std::printf("%s: median %.3f us, p99 %.3f us, max %.3f us\n", name, s.median_us, s.p99_us,
                s.max_us);
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"BESS set-point projection and control-loop simulator"};
    app.require_subcommand(1);
    int rc = 0;

    // gen-trace
    auto* gen = app.add_subcommand("gen-trace", "generate a synthetic grid trace");
    struct {
        std::string config = "./bess.conf";
        std::string out;
        std::uint64_t seed = 0;
        double duration_s = 0.0;
        double dt_s = -1.0, f_vol = -1.0, vac_vol = -1.0;
    } g;
    gen->add_option("--config", g.config, "config file")->capture_default_str();
    gen->add_option("--seed", g.seed, "RNG seed")->required();
    gen->add_option("--duration-s", g.duration_s, "trace length [s]")->required();
    gen->add_option("--out", g.out, "output trace CSV")->required();
    gen->add_option("--dt-s", g.dt_s, "sample spacing [s] (default: config trace.dt_s)");
    gen->add_option("--f-vol", g.f_vol, "frequency volatility [Hz/sqrt(s)]");
    gen->add_option("--vac-vol", g.vac_vol, "AC-voltage volatility [pu/sqrt(s)]");
    gen->callback([&]() {
        Config cfg = load_config(g.config);
        if (g.dt_s > 0.0) cfg.trace.dt_s = g.dt_s;
        if (g.f_vol >= 0.0) cfg.trace.f_vol = g.f_vol;
        if (g.vac_vol >= 0.0) cfg.trace.vac_vol = g.vac_vol;
        write_trace_csv(gen_trace(g.seed, g.duration_s, cfg.trace, cfg.base.f_hz), g.out);
    });

    // discretize
    auto* dis = app.add_subcommand("discretize", "build and save a ray table");
    struct {
        std::string config = "./bess.conf";
        std::string curves = "./curves.conf";
        std::string out;
        double vac = 1.0, vdc = 1.0, soc = 0.5;
        int resolution = 1;
    } d;
    dis->add_option("--config", d.config)->capture_default_str();
    dis->add_option("--curves", d.curves)->capture_default_str();
    dis->add_option("--vac", d.vac, "measured AC voltage [pu]")->capture_default_str();
    dis->add_option("--vdc", d.vdc, "measured DC voltage [pu]")->capture_default_str();
    dis->add_option("--soc", d.soc, "measured state of charge")->capture_default_str();
    dis->add_option("--resolution", d.resolution, "angular resolution [deg]")
        ->capture_default_str();
    dis->add_option("--out", d.out, "output table CSV")->required();
    dis->callback([&]() {
        const Config cfg = load_config(d.config);
        const CapabilityCurveSet set = load_curves(d.curves);
        const CapabilityCurve& curve = select_curve(set, d.vac, d.vdc);
        BatteryState st;
        st.soc = d.soc;
        st.v_dc = d.vdc;
        st.i_prev = 0.0;
        const PowerBounds pb = soc_power_bounds(st, cfg.battery, cfg.control.tick_s, cfg.base);
        const RayTable table = build_table(
            RayContext{curve, pb.p_dc_min, pb.p_dc_max, cfg.control.eta, d.vac, d.vdc, d.soc},
            d.resolution);
        save_table(table, d.out, file_hash_hex(d.curves));
    });

    // project
    auto* proj = app.add_subcommand("project", "project one set-point onto the feasible region");
    ProjectArgs p;
    proj->add_option("--config", p.config)->capture_default_str();
    proj->add_option("--curves", p.curves)->capture_default_str();
    proj->add_option("--p0", p.p0, "initial active power [pu]")->required();
    proj->add_option("--q0", p.q0, "initial reactive power [pu]")->required();
    proj->add_option("--vac", p.vac)->capture_default_str();
    proj->add_option("--vdc", p.vdc)->capture_default_str();
    proj->add_option("--soc", p.soc)->capture_default_str();
    proj->add_option("--method", p.method, "opt or fast")->capture_default_str();
    proj->callback([&]() { rc = run_project(p); });

    // simulate
    auto* sim = app.add_subcommand("simulate", "closed-loop simulation over a trace");
    struct {
        std::string config = "./bess.conf";
        std::string curves = "./curves.conf";
        std::string trace, log, metrics, table;
        std::string method = "opt";
        double soc0 = 0.5;
    } s;
    sim->add_option("--config", s.config)->capture_default_str();
    sim->add_option("--curves", s.curves)->capture_default_str();
    sim->add_option("--trace", s.trace, "input trace CSV")->required();
    sim->add_option("--method", s.method, "opt, fast or baseline")->capture_default_str();
    sim->add_option("--log", s.log, "output tick log CSV")->required();
    sim->add_option("--metrics", s.metrics, "output metrics CSV")->required();
    sim->add_option("--soc0", s.soc0, "initial state of charge")->capture_default_str();
    sim->add_option("--table", s.table,
                    "saved ray table to seed --method fast (rebuilt when stale)");
    sim->callback([&]() {
        const Config cfg = load_config(s.config);
        const CapabilityCurveSet set = load_curves(s.curves);
        const Trace trace = read_trace_csv(s.trace);
        RayTable seed;
        if (!s.table.empty()) {
            seed = load_table(s.table);
            if (!seed.curve_hash.empty() && seed.curve_hash != file_hash_hex(s.curves))
                throw ConfigError("table `" + s.table +
                                  "` was built from a different curve file");
        }
        const SimResult res = simulate(trace, method_from_string(s.method), cfg, set, s.soc0,
                                       s.table.empty() ? nullptr : &seed);
        write_ticklog_csv(res.log, s.log);
        write_metrics_csv(res.metrics, s.metrics);
        std::fputs(metrics_csv(res.metrics).c_str(), stdout);
    });

    // bench
    auto* ben = app.add_subcommand("bench", "latency benchmark of both algorithms");
    struct {
        std::string config = "./bess.conf";
        std::string curves = "./curves.conf";
        std::string trace, out;
        double soc0 = 0.5;
        int warmup = 100;
    } b;
    ben->add_option("--config", b.config)->capture_default_str();
    ben->add_option("--curves", b.curves)->capture_default_str();
    ben->add_option("--trace", b.trace, "input trace CSV")->required();
    ben->add_option("--out", b.out, "output prefix; writes <out>.opt.csv and <out>.fast.csv")
        ->required();
    ben->add_option("--soc0", b.soc0)->capture_default_str();
    ben->add_option("--warmup", b.warmup, "ticks excluded from statistics")
        ->capture_default_str();
    ben->callback([&]() {
        const Config cfg = load_config(b.config);
        const CapabilityCurveSet set = load_curves(b.curves);
        const Trace trace = read_trace_csv(b.trace);
        const BenchResult res = bench(trace, cfg, set, b.soc0, b.warmup);
        write_histogram_csv(make_histogram(res.solve_us), b.out + ".opt.csv");
        write_histogram_csv(make_histogram(res.fast_us), b.out + ".fast.csv");
        print_summary("solve", res.solve_summary);
        print_summary("fast_project", res.fast_summary);
        if (res.fast_summary.median_us > 0.0)
            std::printf("median ratio: %.1f\n",
                        res.solve_summary.median_us / res.fast_summary.median_us);
    });

    // metrics
    auto* met = app.add_subcommand("metrics", "recompute energy metrics from a tick log");
    struct {
        std::string config = "./bess.conf";
        std::string log;
    } mt;
    met->add_option("--config", mt.config)->capture_default_str();
    met->add_option("--log", mt.log, "tick log CSV")->required();
    met->callback([&]() {
        const Config cfg = load_config(mt.config);
        const TickLog log = read_ticklog_csv(mt.log);
        std::fputs(metrics_csv(metrics_from_log(log, cfg)).c_str(), stdout);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return rc;
}

}  // namespace bess::cli
