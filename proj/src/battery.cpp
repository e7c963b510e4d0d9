#include "bess/battery.hpp"

#include <cmath>
#include <limits>

namespace bess {

void TTCParams::validate() const {
    if (!(r_s > 0.0)) throw ConfigError("battery.rs_pu must be > 0");
    if (!(r_s < 0.045)) throw ConfigError("battery.rs_pu must be < 0.045");
    for (int k = 0; k < 3; ++k) {
        if (!(r[k] > 0.0))
            throw ConfigError("battery.r" + std::to_string(k + 1) + "_pu must be > 0");
        if (!(c[k] > 0.0))
            throw ConfigError("battery.c" + std::to_string(k + 1) + "_pu must be > 0");
    }
    if (!(soc_min >= 0.0 && soc_max <= 1.0 && soc_min < soc_max))
        throw ConfigError("battery.soc_min/soc_max must satisfy 0 <= soc_min < soc_max <= 1");
    if (!(v_dc_min > 0.0 && v_dc_min < v_dc_max))
        throw ConfigError("battery.vdc_min_pu/vdc_max_pu must satisfy 0 < min < max");
    if (c_max_table.size() < 2)
        throw ConfigError("battery.cmax_table needs at least 2 entries");
    double prev_i = -std::numeric_limits<double>::infinity();
    for (const auto& [i, cap] : c_max_table) {
        if (!(i >= 0.0) || !(i > prev_i))
            throw ConfigError("battery.cmax_table currents must be >= 0 and strictly increasing");
        if (!(cap > 0.0)) throw ConfigError("battery.cmax_table capacities must be > 0");
        prev_i = i;
    }
}

double ocv(double soc, const TTCParams& params) {
    return params.ocv_a + params.ocv_b * soc;
}

double c_max_lookup(double i_pu, const TTCParams& params) {
    const auto& t = params.c_max_table;
    const double x = std::abs(i_pu);
    if (x <= t.front().first) return t.front().second;
    if (x >= t.back().first) return t.back().second;
    for (std::size_t k = 1; k < t.size(); ++k) {
        if (x <= t[k].first) {
            const double w = (x - t[k - 1].first) / (t[k].first - t[k - 1].first);
            return t[k - 1].second + w * (t[k].second - t[k - 1].second);
        }
    }
    return t.back().second;  // unreachable for a valid table
}

double p_dc_of_p_ac(double p_ac, PowerBranch branch, double eta) {
    return branch == PowerBranch::charge ? eta * p_ac : p_ac / eta;
}

std::array<double, 3> update_vc(const std::array<double, 3>& vc, const TTCParams& params,
                                double dt_s, double v_s) {
    const double drive = v_s / params.r_s;  // source current into the RC ladder
    std::array<double, 3> out;
    for (int k = 0; k < 3; ++k) {
        const double decay = std::exp(-dt_s / params.tau(k));
        out[k] = vc[k] * decay + params.r[k] * drive * (1.0 - decay);
    }
    return out;
}

VdcResult solve_vdc(const std::array<double, 3>& vc, double soc, double p_dc,
                    const TTCParams& params) {
    const double a = ocv(soc, params) - (vc[0] + vc[1] + vc[2]);  // E - sum(vc)
    const double disc = a * a - 4.0 * p_dc * params.r_s;
    if (disc < 0.0)
        return {VdcStatus::infeasible_discriminant, std::numeric_limits<double>::quiet_NaN()};
    const double v = 0.5 * (a + std::sqrt(disc));
    if (v < params.v_dc_min || v > params.v_dc_max) return {VdcStatus::infeasible_bounds, v};
    return {VdcStatus::ok, v};
}

double soc_step(double soc, double p_dc, double v_dc, double dt_s, const TTCParams& params,
                const BaseQuantities& base) {
    const double i_pu = p_dc / v_dc;
    const double i_a = i_pu * base.i_base_a();
    return soc - i_a * (dt_s / 3600.0) / c_max_lookup(i_pu, params);
}

PowerBounds soc_power_bounds(const BatteryState& state, const TTCParams& params,
                             double tick_s, const BaseQuantities& base) {
    const double cap_ah = c_max_lookup(state.i_prev, params);
    // pu power that moves SoC by one unit over the tick
    const double scale = cap_ah * state.v_dc / ((tick_s / 3600.0) * base.i_base_a());
    return {-(params.soc_max - state.soc) * scale, (state.soc - params.soc_min) * scale};
}

}  // namespace bess
