#pragma once

#include <array>
#include <utility>
#include <vector>

#include "bess/core.hpp"

namespace bess {

/// Three-time-constant equivalent circuit: series resistance r_s, three
/// parallel RC branches, and an OCV source affine in SoC.
struct TTCParams {
    double r_s = 0.04;                     ///< series resistance [pu], < 0.045
    std::array<double, 3> r = {0.010, 0.010, 0.010};   ///< branch resistances [pu]
    std::array<double, 3> c = {10.0, 100.0, 1000.0};   ///< branch capacitances [pu·s]
    double ocv_a = 0.90;                   ///< OCV intercept [pu]
    double ocv_b = 0.15;                   ///< OCV slope [pu per unit SoC]
    /// (|current| [pu], capacity [A·h]) nodes, strictly increasing current.
    std::vector<std::pair<double, double>> c_max_table = {{0.5, 800.0}, {1.0, 780.0}};
    double soc_min = 0.10;
    double soc_max = 0.90;
    double v_dc_min = 600.0 / 700.0;       ///< DC-bus lower bound [pu]
    double v_dc_max = 800.0 / 700.0;       ///< DC-bus upper bound [pu]

    double tau(int k) const { return r[k] * c[k]; }  ///< branch time constant [s]
    void validate() const;
};

/// Plant state. A value type; update functions return new values.
struct BatteryState {
    double soc = 0.5;                      ///< state of charge, [0, 1]
    std::array<double, 3> vc = {0.0, 0.0, 0.0};  ///< RC branch voltages [pu]
    double v_dc = 1.0;                     ///< DC-bus voltage [pu]
    double i_prev = 0.0;                   ///< previous-loop DC current [pu]

    double vc_sum() const { return vc[0] + vc[1] + vc[2]; }
};

/// Charging/discharging branch of the converter efficiency relation.
/// Chosen once per loop from the sign of the initial set-point; a zero
/// initial active power takes the discharge branch.
enum class PowerBranch { charge, discharge };

inline PowerBranch branch_of(double p_ac0) {
    return p_ac0 < 0.0 ? PowerBranch::charge : PowerBranch::discharge;
}

/// Slope of the linear map p_dc = k * p_ac for the chosen branch.
inline double branch_slope(PowerBranch b, double eta) {
    return b == PowerBranch::charge ? eta : 1.0 / eta;
}

/// Open-circuit voltage E = a + b * soc [pu].
double ocv(double soc, const TTCParams& params);

/// Charge capacity [A·h] at a DC current, by piecewise-linear
/// interpolation on |i|, clamped to the table's end values.
double c_max_lookup(double i_pu, const TTCParams& params);

/// DC-side power for an AC-side power under the branch's efficiency.
double p_dc_of_p_ac(double p_ac, PowerBranch branch, double eta);

/// Advance the RC branch voltages by dt under a zero-order-hold source
/// voltage v_s (exact exponential solution of the branch ODE).
std::array<double, 3> update_vc(const std::array<double, 3>& vc, const TTCParams& params,
                                double dt_s, double v_s);

enum class VdcStatus { ok, infeasible_discriminant, infeasible_bounds };

struct VdcResult {
    VdcStatus status;
    double v;  ///< larger quadratic root [pu]; meaningful unless the discriminant failed
    bool ok() const { return status == VdcStatus::ok; }
};

/// Larger root of v^2 + (sum(vc) - E) v + p_dc * r_s = 0, the physical
/// DC-bus operating point. Infeasible when no real root exists or the
/// root leaves [v_dc_min, v_dc_max].
VdcResult solve_vdc(const std::array<double, 3>& vc, double soc, double p_dc,
                    const TTCParams& params);

/// New SoC after dt at constant DC power. Discharge (p_dc > 0) decreases
/// SoC. The result is NOT clamped; out-of-band values are the harness's
/// signal to raise a violation.
double soc_step(double soc, double p_dc, double v_dc, double dt_s,
                const TTCParams& params, const BaseQuantities& base);

struct PowerBounds {
    double p_dc_min;  ///< <= 0 while soc <= soc_max
    double p_dc_max;  ///< >= 0 while soc >= soc_min
};

/// One-step look-ahead DC power bounds keeping SoC inside
/// [soc_min, soc_max] after `tick` seconds at constant power. Capacity is
/// taken at the previous loop's current.
PowerBounds soc_power_bounds(const BatteryState& state, const TTCParams& params,
                             double tick_s, const BaseQuantities& base);

}  // namespace bess
