#pragma once

#include "bess/core.hpp"

namespace bess {

/// Droop law parameters. Coefficients are signed: the stabilizing response
/// (under-frequency -> discharge, under-voltage -> inject reactive) needs
/// alpha, beta < 0 with the deviation measured as (measured - nominal).
struct DroopConfig {
    double alpha_mw_per_hz = -8.0;    ///< frequency droop [MW/Hz]
    double beta_kvar_per_v = -8.39;   ///< voltage droop [kVar/V]
    double db_f_hz = 0.010;           ///< frequency dead-band [Hz], >= 0
    double db_v_v = 1.0;              ///< voltage dead-band [V], >= 0
    double p_max_pu = 1.0;            ///< rated active power magnitude [pu]
    double q_max_pu = 1.0;            ///< rated reactive power magnitude [pu]

    void validate() const;
};

/// Initial set-point from frequency/voltage deviations with dead-bands.
/// Deviations are measured from nominal (no dead-band re-anchoring) and
/// the output is NOT saturated; projection is downstream's job.
Setpoint initial_setpoint(const GridMeasurement& m, const DroopConfig& cfg,
                          const BaseQuantities& base);

}  // namespace bess
