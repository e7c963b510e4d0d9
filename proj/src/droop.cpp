#include "bess/droop.hpp"

#include <cmath>

namespace bess {

void DroopConfig::validate() const {
    if (!(db_f_hz >= 0.0)) throw ConfigError("droop.db_f_hz must be >= 0");
    if (!(db_v_v >= 0.0)) throw ConfigError("droop.db_v_v must be >= 0");
    if (!(p_max_pu > 0.0)) throw ConfigError("droop.p_max_pu must be > 0");
    if (!(q_max_pu > 0.0)) throw ConfigError("droop.q_max_pu must be > 0");
}

Setpoint initial_setpoint(const GridMeasurement& m, const DroopConfig& cfg,
                          const BaseQuantities& base) {
    Setpoint s;
    const double df_hz = m.f - base.f_hz;
    if (std::abs(df_hz) > cfg.db_f_hz)
        s.p = to_pu(cfg.alpha_mw_per_hz * 1e6 * df_hz, base, PuKind::power);
    const double dv_v = (m.v_ac - 1.0) * base.v_ac_v;  // nominal AC voltage is 1 pu
    if (std::abs(dv_v) > cfg.db_v_v)
        s.q = to_pu(cfg.beta_kvar_per_v * 1e3 * dv_v, base, PuKind::power);
    return s;
}

}  // namespace bess
