#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "bess/battery.hpp"
#include "bess/capability.hpp"
#include "bess/config.hpp"
#include "bess/optimizer.hpp"

namespace bess::test {

inline std::string repo_path(const std::string& rel) {
    return std::string(BESS_REPO_DIR) + "/" + rel;
}

/// Unique scratch directory, removed on destruction.
struct TempDir {
    std::filesystem::path path;
    TempDir() {
        static std::atomic<int> counter{0};
        path = std::filesystem::temp_directory_path() /
               ("bess_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    f << text;
}

inline CapabilityCurve unit_disk_curve() {
    CapabilityCurve c;
    c.v_ac_key = 1.0;
    c.v_dc_key = 1.0;
    c.disks.push_back({0.0, 0.0, 1.0});
    return c;
}

/// Projection problem with wide, non-binding battery constraints around a
/// mid-range state: the capability region is the only active geometry.
inline ProjectionProblem easy_problem(const Setpoint& s0, CapabilityCurve curve,
                                      double xi = 1e-6) {
    ProjectionProblem p;
    p.s0 = s0;
    p.curve = std::move(curve);
    p.vc_sum = 0.0;
    p.e = 0.975;  // OCV at soc = 0.5 with the default affine law
    p.r_s = 0.04;
    p.eta = 0.95;
    p.p_dc_min = -1e4;
    p.p_dc_max = 1e4;
    p.v_dc_min = 600.0 / 700.0;
    p.v_dc_max = 800.0 / 700.0;
    p.xi = xi;
    return p;
}

/// Deterministic random-instance stream shared by the optimizer property
/// tests and the acceptance suite.
struct InstanceGen {
    std::mt19937_64 rng;
    TTCParams bat;  // capacity table + SoC band for the power bounds

    explicit InstanceGen(std::uint64_t seed) : rng(seed) {}

    double uniform(double a, double b) {
        return std::uniform_real_distribution<double>(a, b)(rng);
    }

    CapabilityCurve random_curve() {
        CapabilityCurve c;
        c.v_ac_key = 1.0;
        c.v_dc_key = 1.0;
        c.disks.push_back({0.0, 0.0, uniform(0.85, 1.15)});
        c.halfspaces.push_back({1.0, 0.0, uniform(0.75, 1.0)});
        c.halfspaces.push_back({-1.0, 0.0, uniform(0.75, 1.0)});
        c.halfspaces.push_back({0.0, 1.0, uniform(0.65, 1.0)});
        if (uniform(0.0, 1.0) < 0.4) {
            const double ang = uniform(0.0, 6.28318530717958648);
            c.halfspaces.push_back({std::cos(ang), std::sin(ang), uniform(0.7, 1.0)});
        }
        if (uniform(0.0, 1.0) < 0.3) c.soc_scale = uniform(0.85, 1.0);
        return c;
    }

    /// Instance with a feasible region (the origin always qualifies) and,
    /// when requested, an infeasible initial set-point.
    ProjectionProblem random_problem(bool infeasible_s0) {
        ProjectionProblem p;
        p.curve = random_curve();
        const double pick = uniform(0.0, 1.0);
        double soc;
        if (pick < 0.1) soc = bat.soc_min;        // charge side of the box pinned
        else if (pick < 0.2) soc = bat.soc_max;   // discharge side pinned
        else soc = uniform(0.15, 0.85);
        p.vc_sum = uniform(0.0, 0.008) + uniform(0.0, 0.008) + uniform(0.0, 0.008);
        p.e = ocv(soc, bat);
        p.r_s = uniform(0.02, 0.044);
        p.eta = uniform(0.90, 0.98);
        p.v_dc_min = bat.v_dc_min;
        p.v_dc_max = bat.v_dc_max;
        p.xi = 1e-6;

        BatteryState st;
        st.soc = soc;
        st.v_dc = p.e;  // rested bus near the OCV
        st.i_prev = 0.0;
        BaseQuantities base{720e3, 700.0, 300.0, 50.0};
        const PowerBounds pb = soc_power_bounds(st, bat, 0.1, base);
        p.p_dc_min = pb.p_dc_min;
        p.p_dc_max = pb.p_dc_max;

        for (int tries = 0; tries < 1000; ++tries) {
            p.s0 = {uniform(-2.0, 2.0), uniform(-2.0, 2.0)};
            if (initial_feasible(p) != infeasible_s0) return p;
        }
        return p;  // statistically unreachable
    }
};

}  // namespace bess::test
