// Acceptance suite: one line per criterion, nonzero exit if any fail.
// Every tolerance is pinned here, in code.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "bess/discretizer.hpp"
#include "bess/harness.hpp"
#include "bess/optimizer.hpp"
#include "util.hpp"

using namespace bess;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;
std::vector<std::pair<int, std::string>> g_lines;

void report(int id, const char* name, bool pass, const std::string& detail) {
    char buf[600];
    std::snprintf(buf, sizeof buf, "%s  %2d. %-28s %s", pass ? "PASS" : "FAIL", id, name,
                  detail.c_str());
    g_lines.emplace_back(id, buf);
    if (!pass) ++g_failures;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// shared default context: shipped curves, rested mid-range battery
struct Fixture {
    Config cfg = load_config(test::repo_path("bess.conf"));
    CapabilityCurveSet curves = load_curves(test::repo_path("curves.conf"));

    ProjectionProblem mid_problem(const Setpoint& s0) const {
        const CapabilityCurve& curve = select_curve(curves, 1.0, 1.0);
        BatteryState st;
        st.soc = 0.5;
        st.v_dc = ocv(0.5, cfg.battery);
        st.i_prev = 0.0;
        const PowerBounds pb = soc_power_bounds(st, cfg.battery, cfg.control.tick_s, cfg.base);
        return {s0,
                curve,
                0.0,
                ocv(0.5, cfg.battery),
                cfg.battery.r_s,
                cfg.control.eta,
                pb.p_dc_min,
                pb.p_dc_max,
                cfg.battery.v_dc_min,
                cfg.battery.v_dc_max,
                cfg.control.xi};
    }

    RayTable mid_table() const {
        ProjectionProblem p = mid_problem({0.0, 0.0});
        return build_table(
            RayContext{p.curve, p.p_dc_min, p.p_dc_max, p.eta, 1.0, 1.0, 0.5});
    }
};

// --- 1. pass-through identity -------------------------------------------
void criterion_1(const Fixture& fx) {
    const auto t0 = Clock::now();
    const RayTable table = fx.mid_table();
    std::mt19937_64 rng(1001);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int done = 0, exact = 0;
    while (done < 10000) {
        const double ang = 360.0 * u(rng);
        double ux, uy;
        unit_vec_deg(ang, ux, uy);
        const Setpoint s0{1.2 * u(rng) * ux, 1.2 * u(rng) * uy};
        const int j = angle_index(s0, table.res_deg);
        if (std::hypot(s0.p, s0.q) > table.smax[static_cast<std::size_t>(j - 1)] * 0.999)
            continue;
        ProjectionProblem prob = fx.mid_problem(s0);
        if (!initial_feasible(prob)) continue;
        ++done;
        const ProjectionResult r = solve(prob);
        const Setpoint f = fast_project(s0, table);
        if (r.status == ProjectionStatus::passthrough && r.s.p == s0.p && r.s.q == s0.q &&
            f.p == s0.p && f.q == s0.q)
            ++exact;
    }
    const double dt = seconds_since(t0);
    report(1, "pass-through identity", exact == 10000 && dt < 10.0,
           fmt("%d/10000 bit-exact, %.2f s (< 10 s)", exact, dt));
}

// --- 2./3. oracle equivalence and relaxation tightness ------------------
void criteria_2_3() {
    const auto t0 = Clock::now();
    test::InstanceGen gen(2002);
    const double grid = 1e-3;
    int n = 0, close = 0, tight = 0, thm1 = 0;
    double worst = 0.0, worst_resid = 0.0;
    for (int i = 0; i < 500; ++i) {
        const ProjectionProblem p = gen.random_problem(true);
        const ProjectionResult o = oracle(p, grid);
        const ProjectionResult r = solve(p);
        if (o.status != ProjectionStatus::feasible) continue;
        ++n;
        if (r.status != ProjectionStatus::infeasible) ++thm1;
        else continue;
        const double d = std::hypot(r.s.p - o.s.p, r.s.q - o.s.q);
        worst = std::max(worst, d);
        if (d <= 2e-3) ++close;
        const double resid =
            r.v_dc * r.v_dc + (p.vc_sum - p.e) * r.v_dc + r.p_dc * p.r_s;
        worst_resid = std::max(worst_resid, std::abs(resid));
        const double v_s = r.p_dc * p.r_s / r.v_dc;
        if (std::abs(resid) <= 1e-8 && r.v_dc >= v_s && r.tight) ++tight;
    }
    const double dt = seconds_since(t0);
    report(2, "oracle equivalence", n == 500 && thm1 == n && close == n && dt < 300.0,
           fmt("%d/%d within 2e-3 (worst %.2e), feasibility preserved %d/%d, %.1f s (< 300 s)",
               close, n, worst, thm1, n, dt));
    report(3, "relaxation tightness", n == 500 && tight == n,
           fmt("%d/%d residual <= 1e-8 and v >= v_s (worst residual %.2e)", tight, n,
               worst_resid));
}

// --- 4. xi sweep ---------------------------------------------------------
void criterion_4() {
    test::InstanceGen gen(3003);
    int ok = 0, n = 0;
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        ProjectionProblem p = gen.random_problem(true);
        bool have = false, all_ok = true;
        Setpoint first{};
        for (double xi : {1e-8, 1e-6, 1e-4}) {
            p.xi = xi;
            const ProjectionResult r = solve(p);
            if (r.status == ProjectionStatus::infeasible) {
                all_ok = false;
                break;
            }
            if (!have) {
                first = r.s;
                have = true;
            } else {
                const double d =
                    std::max(std::abs(r.s.p - first.p), std::abs(r.s.q - first.q));
                worst = std::max(worst, d);
                if (d > 1e-4) all_ok = false;
            }
        }
        if (have) {
            ++n;
            if (all_ok) ++ok;
        }
    }
    report(4, "xi-sweep insensitivity", n == 100 && ok == n,
           fmt("%d/%d spread <= 1e-4 over {1e-8,1e-6,1e-4} (worst %.2e)", ok, n, worst));
}

// --- 5. Algorithm-2 fidelity ---------------------------------------------
void criterion_5(const Fixture& fx) {
    const RayTable table = fx.mid_table();
    std::mt19937_64 rng(4004);
    std::uniform_real_distribution<double> u(-2.4, 2.4);
    int done = 0, ok = 0;
    while (done < 1000) {
        const Setpoint s0{u(rng), u(rng)};
        const int j = angle_index(s0, table.res_deg);
        if (std::hypot(s0.p, s0.q) <= table.smax[static_cast<std::size_t>(j - 1)]) continue;
        ++done;
        const Setpoint r = fast_project(s0, table);
        const double in_ang = std::atan2(s0.q, s0.p) * 57.29577951308232;
        const double out_ang = std::atan2(r.q, r.p) * 57.29577951308232;
        const double ang_diff =
            std::abs(std::fmod(out_ang - in_ang + 540.0, 360.0) - 180.0);
        const double mag_err =
            std::abs(std::hypot(r.p, r.q) - table.smax[static_cast<std::size_t>(j - 1)]);
        const Setpoint shrunk{r.p * (1.0 - 1e-9), r.q * (1.0 - 1e-9)};
        const double p_dc = p_dc_of_p_ac(shrunk.p, branch_of(shrunk.p), table.ctx.eta);
        const bool feas = h_eval(table.ctx.curve, shrunk) <= 1e-6 &&
                          p_dc >= table.ctx.p_dc_min - 1e-6 &&
                          p_dc <= table.ctx.p_dc_max + 1e-6;
        if (ang_diff <= 1.0 + 1e-9 && mag_err <= 1e-6 && feas) ++ok;
    }
    report(5, "fast-projection fidelity", ok == 1000,
           fmt("%d/1000 within 1 degree, 1e-6 magnitude, feasible with margin", ok));
}

// --- 6. latency ratio ----------------------------------------------------
void criterion_6(const Fixture& fx) {
    const auto t0 = Clock::now();
    // bench under load on the densely fitted curves: strong droop, both
    // channels active, so the medians measure the algorithms rather than
    // the pass-through shortcut
    const CapabilityCurveSet fitted = load_curves(test::repo_path("curves_fitted.conf"));
    Config cfg = fx.cfg;
    cfg.droop.alpha_mw_per_hz = -11.0;
    OuParams ou = cfg.trace;
    ou.f_vol = 0.06;
    ou.vac_vol = 0.02;
    const Trace trace = gen_trace(42, 360.0, ou, cfg.base.f_hz);  // 3600 ticks
    const BenchResult res = bench(trace, cfg, fitted, 0.5, 100);
    const double dt = seconds_since(t0);
    const double ratio = res.solve_summary.median_us / res.fast_summary.median_us;
    report(6, "latency ratio",
           ratio >= 10.0 && res.fast_summary.median_us < 1000.0 && dt < 120.0,
           fmt("median solve %.2f us / fast %.3f us = %.0fx (>= 10), %.1f s (< 120 s)",
               res.solve_summary.median_us, res.fast_summary.median_us, ratio, dt));
}

// --- 7./8./10. closed-loop safety, energy trend, golden metrics ----------
// Golden values frozen from the first verified seed-42 scenario-1 run.
constexpr double kGoldenTde = 123.4698774178821;
constexpr double kGoldenTce = 151.94013527395222;
constexpr double kGoldenTse = 44.858999999999519;

void criteria_7_8_10(const Fixture& fx) {
    const Trace trace = gen_trace(42, 3600.0, fx.cfg.trace, fx.cfg.base.f_hz);
    Config s1 = fx.cfg;  // 8 MW/Hz
    Config s2 = fx.cfg;
    s2.droop.alpha_mw_per_hz = -11.0;

    struct Run {
        const char* name;
        const Config* cfg;
        Method method;
        SimResult res;
    };
    std::vector<Run> runs = {{"s1-opt", &s1, Method::optimizer, {}},
                             {"s1-fast", &s1, Method::fast, {}},
                             {"s2-opt", &s2, Method::optimizer, {}},
                             {"s2-fast", &s2, Method::fast, {}}};
    bool safe = true;
    std::string first_violation;
    for (auto& r : runs) {
        r.res = simulate(trace, r.method, *r.cfg, fx.curves, 0.5);
        for (const auto& tick : r.res.log.ticks) {
            const bool band = tick.soc >= fx.cfg.battery.soc_min - 1e-9 &&
                              tick.soc <= fx.cfg.battery.soc_max + 1e-9;
            const bool abort = tick.status == TickStatus::battery_infeasible ||
                               tick.status == TickStatus::soc_violation ||
                               tick.status == TickStatus::infeasible;
            if (!band || abort) {
                safe = false;
                if (first_violation.empty())
                    first_violation = fmt("%s t=%.1f status=%s soc=%.6f", r.name, tick.t,
                                          to_string(tick.status), tick.soc);
            }
        }
    }
    report(7, "closed-loop safety", safe,
           safe ? fmt("4 one-hour runs inside [%.2f, %.2f] +- 1e-9, no aborted ticks",
                      fx.cfg.battery.soc_min, fx.cfg.battery.soc_max)
                : first_violation);

    const SimResult base1 = simulate(trace, Method::baseline, s1, fx.curves, 0.5);
    const SimResult base2 = simulate(trace, Method::baseline, s2, fx.curves, 0.5);
    std::size_t sat = 0;
    for (const auto& tick : runs[0].res.log.ticks)
        if (!tick.initial_feasible) ++sat;
    const double sat_pct = 100.0 * static_cast<double>(sat) /
                           static_cast<double>(runs[0].res.log.ticks.size());
    const auto& m1o = runs[0].res.metrics;
    const auto& m1f = runs[1].res.metrics;
    const auto& m2o = runs[2].res.metrics;
    const auto& m2f = runs[3].res.metrics;
    const bool trend = m2o.tse_kwh > m1o.tse_kwh && m1o.tse_kwh > 0.0 &&
                       m2f.tse_kwh > m1f.tse_kwh && m1f.tse_kwh > 0.0 &&
                       sat_pct >= 1.0;
    const bool base_ok =
        base1.metrics.tse_kwh == 0.0 && base2.metrics.tse_kwh == 0.0 &&
        base1.metrics.tde_kwh + base1.metrics.tce_kwh < m1o.tde_kwh + m1o.tce_kwh &&
        base1.metrics.tde_kwh + base1.metrics.tce_kwh < m1f.tde_kwh + m1f.tce_kwh &&
        base2.metrics.tde_kwh + base2.metrics.tce_kwh < m2o.tde_kwh + m2o.tce_kwh &&
        base2.metrics.tde_kwh + base2.metrics.tce_kwh < m2f.tde_kwh + m2f.tce_kwh;
    report(8, "droop-scenario energy trend", trend && base_ok,
           fmt("TSE opt 11 MW/Hz %.2f > 8 MW/Hz %.2f kWh (fast %.2f > %.2f), saturated "
               "ticks %.1f%% (>= 1%%), baseline TSE = 0 and lower TDE+TCE",
               m2o.tse_kwh, m1o.tse_kwh, m2f.tse_kwh, m1f.tse_kwh, sat_pct));

    const bool frozen = kGoldenTde >= 0.0;
    const bool golden = frozen && m1o.tde_kwh == kGoldenTde && m1o.tce_kwh == kGoldenTce &&
                        m1o.tse_kwh == kGoldenTse;
    report(10, "metrics regression", golden,
           frozen ? fmt("seed-42 scenario-1 optimizer run reproduces the golden values%s",
                        golden ? "" : " NOT")
                  : fmt("golden values not frozen; measured tde=%.17g tce=%.17g tse=%.17g",
                        m1o.tde_kwh, m1o.tce_kwh, m1o.tse_kwh));
}

// --- 9. battery model exactness ------------------------------------------
void criterion_9(const Fixture& fx) {
    const TTCParams& bat = fx.cfg.battery;
    std::mt19937_64 rng(9009);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int ok_compose = 0, ok_decay = 0;
    const int n = 5000;
    for (int i = 0; i < n; ++i) {
        std::array<double, 3> vc{0.02 * u(rng), 0.02 * u(rng), 0.02 * u(rng)};
        const double v_s = 0.05 * (u(rng) - 0.5);
        const auto one = update_vc(vc, bat, 0.050, v_s);
        const auto two = update_vc(update_vc(vc, bat, 0.025, v_s), bat, 0.025, v_s);
        bool good = true;
        for (int k = 0; k < 3; ++k) good = good && std::abs(one[k] - two[k]) <= 1e-12;
        if (good) ++ok_compose;

        const double dt = 0.01 + 20.0 * u(rng);
        const auto dec = update_vc(vc, bat, dt, 0.0);
        good = true;
        for (int k = 0; k < 3; ++k)
            good = good && std::abs(dec[k] - vc[k] * std::exp(-dt / bat.tau(k))) <= 1e-12;
        if (good) ++ok_decay;
    }
    report(9, "battery model exactness", ok_compose == n && ok_decay == n,
           fmt("%d/%d half-step compositions and %d/%d decays within 1e-12", ok_compose, n,
               ok_decay, n));
}

}  // namespace

int main() {
    const Fixture fx;
    criterion_1(fx);
    criteria_2_3();
    criterion_4();
    criterion_5(fx);
    criterion_6(fx);
    criteria_7_8_10(fx);
    criterion_9(fx);
    std::stable_sort(g_lines.begin(), g_lines.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [id, line] : g_lines) std::puts(line.c_str());
    if (g_failures) std::printf("%d criterion(s) FAILED\n", g_failures);
    else std::printf("all acceptance criteria passed\n");
    return g_failures == 0 ? 0 : 1;
}
