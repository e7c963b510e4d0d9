#include "bess/discretizer.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "bess/battery.hpp"

namespace bess {

void unit_vec_deg(double deg, double& ux, double& uy) {
    double m = std::fmod(deg, 360.0);
    if (m < 0.0) m += 360.0;
    if (m == 0.0) {
        ux = 1.0;
        uy = 0.0;
    } else if (m == 90.0) {
        ux = 0.0;
        uy = 1.0;
    } else if (m == 180.0) {
        ux = -1.0;
        uy = 0.0;
    } else if (m == 270.0) {
        ux = 0.0;
        uy = -1.0;
    } else {
        const double rad = deg * (std::numbers::pi / 180.0);
        ux = std::cos(rad);
        uy = std::sin(rad);
    }
}

namespace {

bool ray_point_feasible(const RayContext& ctx, double p, double q) {
    if (h_eval(ctx.curve, Setpoint{p, q}) > 0.0) return false;
    const double p_dc = p_dc_of_p_ac(p, branch_of(p), ctx.eta);
    return p_dc >= ctx.p_dc_min && p_dc <= ctx.p_dc_max;
}

}  // namespace

double ray_max(double theta_deg, const RayContext& ctx) {
    double ux, uy;
    unit_vec_deg(theta_deg, ux, uy);
    double lo = 0.0;  // the origin is feasible by the curve's load-time invariant
    double hi = 2.0;
    if (ray_point_feasible(ctx, hi * ux, hi * uy)) return hi;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (ray_point_feasible(ctx, mid * ux, mid * uy))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

namespace {

void fill_directions(RayTable& t) {
    const int n = t.size();
    t.ux.resize(n);
    t.uy.resize(n);
    for (int j = 1; j <= n; ++j)
        unit_vec_deg(j * t.res_deg, t.ux[static_cast<std::size_t>(j - 1)],
                     t.uy[static_cast<std::size_t>(j - 1)]);
}

}  // namespace

RayTable build_table(const RayContext& ctx, int resolution_deg) {
    if (resolution_deg < 1 || 360 % resolution_deg != 0)
        throw ConfigError("resolution must be a positive divisor of 360 degrees");
    RayTable t;
    t.res_deg = static_cast<double>(resolution_deg);
    t.ctx = ctx;
    const int n = 360 / resolution_deg;
    t.smax.resize(n);
    for (int j = 1; j <= n; ++j) t.smax[j - 1] = ray_max(j * t.res_deg, ctx);
    fill_directions(t);
    return t;
}

int angle_index(const Setpoint& s0, double res_deg) {
    const int n = static_cast<int>(std::lround(360.0 / res_deg));
    double deg;
    if (s0.p == 0.0) {
        deg = s0.q >= 0.0 ? 90.0 : 270.0;
    } else {
        deg = std::atan2(s0.q, s0.p) * (180.0 / std::numbers::pi);
        if (deg <= 0.0) deg += 360.0;
    }
    double idx = deg / res_deg;
    // absorb floating-point dust at exact grid angles before ceiling
    const double snapped = std::round(idx);
    if (std::abs(idx - snapped) < 1e-9) idx = snapped;
    int j = static_cast<int>(std::ceil(idx));
    if (j < 1) j = n;  // an angle of ~0 degrees wraps to the last bin
    if (j > n) j = n;
    return j;
}

int angle_deg(const Setpoint& s0) { return angle_index(s0, 1.0); }

Setpoint fast_project(const Setpoint& s0, const RayTable& table) {
    const std::size_t j = static_cast<std::size_t>(angle_index(s0, table.res_deg)) - 1;
    const double rmax = table.smax[j];
    if (s0.p * s0.p + s0.q * s0.q <= rmax * rmax) return s0;
    return {rmax * table.ux[j], rmax * table.uy[j]};
}

std::string file_hash_hex(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open file for hashing: " + path);
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    char buf[4096];
    while (f.read(buf, sizeof buf) || f.gcount() > 0) {
        for (std::streamsize i = 0; i < f.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
        if (!f) break;
    }
    char out[17];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
    return out;
}

void save_table(const RayTable& table, const std::string& path, const std::string& curve_hash) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write table file: " + path);
    char line[200];
    std::snprintf(line, sizeof line, "# vac_pu=%.17g vdc_pu=%.17g soc=%.17g curve_hash=%s\n",
                  table.ctx.v_ac, table.ctx.v_dc, table.ctx.soc, curve_hash.c_str());
    f << line;
    std::snprintf(line, sizeof line, "# pdc_min=%.17g pdc_max=%.17g eta=%.17g\n",
                  table.ctx.p_dc_min, table.ctx.p_dc_max, table.ctx.eta);
    f << line;
    std::snprintf(line, sizeof line, "# resolution_deg=%.17g\n", table.res_deg);
    f << line;
    f << "deg,smax_pu\n";
    for (int j = 1; j <= table.size(); ++j) {
        std::snprintf(line, sizeof line, "%.17g,%.17g\n", j * table.res_deg,
                      table.smax[static_cast<std::size_t>(j - 1)]);
        f << line;
    }
}

RayTable load_table(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open table file: " + path);
    RayTable t;
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream in(line.substr(1));
            std::string tok;
            while (in >> tok) {
                const auto eq = tok.find('=');
                if (eq == std::string::npos) continue;
                const std::string key = tok.substr(0, eq);
                const std::string val = tok.substr(eq + 1);
                if (key == "vac_pu") t.ctx.v_ac = std::atof(val.c_str());
                else if (key == "vdc_pu") t.ctx.v_dc = std::atof(val.c_str());
                else if (key == "soc") t.ctx.soc = std::atof(val.c_str());
                else if (key == "pdc_min") t.ctx.p_dc_min = std::atof(val.c_str());
                else if (key == "pdc_max") t.ctx.p_dc_max = std::atof(val.c_str());
                else if (key == "eta") t.ctx.eta = std::atof(val.c_str());
                else if (key == "resolution_deg") t.res_deg = std::atof(val.c_str());
                else if (key == "curve_hash") t.curve_hash = val;
            }
            continue;
        }
        if (!header_seen) {  // column header row
            header_seen = true;
            continue;
        }
        double deg, smax;
        if (std::sscanf(line.c_str(), "%lf,%lf", &deg, &smax) != 2)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": bad table row");
        t.smax.push_back(smax);
    }
    if (t.smax.empty()) throw ConfigError(path + ": empty ray table");
    if (std::lround(360.0 / t.res_deg) != static_cast<long>(t.smax.size()))
        throw ConfigError(path + ": row count does not match resolution");
    for (double v : t.smax)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw ConfigError(path + ": table entries must be finite and >= 0");
    fill_directions(t);
    return t;
}

}  // namespace bess
