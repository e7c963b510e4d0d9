#pragma once

#include <stdexcept>
#include <string>

namespace bess {

/// Raised by config/curve/trace loaders; the message names the offending
/// key and line where possible.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Per-unit bases of the installation. All internal math is in per-unit;
/// SI values appear only at file and CLI boundaries.
struct BaseQuantities {
    double s_va;     ///< apparent power base [VA]
    double v_dc_v;   ///< DC-bus voltage base [V]
    double v_ac_v;   ///< AC line voltage base [V]
    double f_hz;     ///< nominal grid frequency [Hz]

    /// DC current base [A] (power base over DC voltage base).
    double i_base_a() const { return s_va / v_dc_v; }

    void validate() const;
};

/// Quantity kinds with a defined per-unit base.
enum class PuKind { power, dc_voltage, ac_voltage, current };

/// Parse a kind name ("power", "dc_voltage", "ac_voltage", "current").
/// Throws ConfigError on anything else.
PuKind pu_kind_from_string(const std::string& name);

double to_pu(double value_si, const BaseQuantities& base, PuKind kind);
double from_pu(double value_pu, const BaseQuantities& base, PuKind kind);

/// Active/reactive power pair [pu]. Sign convention: p > 0 discharges the
/// battery (injection into the grid), p < 0 charges it.
struct Setpoint {
    double p = 0.0;
    double q = 0.0;
};

/// One timestamped grid sample driving the droop stage.
struct GridMeasurement {
    double t;     ///< [s]
    double f;     ///< frequency [Hz], plausible range (45, 55)
    double v_ac;  ///< AC voltage magnitude [pu], plausible range (0.5, 1.5)
};

/// Control-loop timing and converter parameters.
struct ControlParams {
    double delta_t_s;  ///< inner battery-update step [s]
    double tick_s;     ///< control-loop period [s], >= delta_t_s
    double eta;        ///< converter efficiency, (0, 1]
    double xi;         ///< DC-voltage penalty weight, > 0

    void validate() const;
};

}  // namespace bess
