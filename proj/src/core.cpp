#include "bess/core.hpp"

namespace bess {

void BaseQuantities::validate() const {
    if (!(s_va > 0.0)) throw ConfigError("base.s_va must be > 0");
    if (!(v_dc_v > 0.0)) throw ConfigError("base.vdc_v must be > 0");
    if (!(v_ac_v > 0.0)) throw ConfigError("base.vac_v must be > 0");
    if (!(f_hz > 0.0)) throw ConfigError("base.f_hz must be > 0");
}

void ControlParams::validate() const {
    if (!(delta_t_s > 0.0)) throw ConfigError("control.delta_t_s must be > 0");
    if (!(tick_s >= delta_t_s)) throw ConfigError("control.delta_t_s must be <= control.tick_s");
    if (!(eta > 0.0 && eta <= 1.0)) throw ConfigError("control.eta must be in (0, 1]");
    if (!(xi > 0.0)) throw ConfigError("control.xi must be > 0");
}

PuKind pu_kind_from_string(const std::string& name) {
    if (name == "power") return PuKind::power;
    if (name == "dc_voltage") return PuKind::dc_voltage;
    if (name == "ac_voltage") return PuKind::ac_voltage;
    if (name == "current") return PuKind::current;
    throw ConfigError("unknown per-unit kind: `" + name + "`");
}

namespace {

double base_of(const BaseQuantities& base, PuKind kind) {
    switch (kind) {
        case PuKind::power: return base.s_va;
        case PuKind::dc_voltage: return base.v_dc_v;
        case PuKind::ac_voltage: return base.v_ac_v;
        case PuKind::current: return base.i_base_a();
    }
    throw ConfigError("unknown per-unit kind");
}

}  // namespace

double to_pu(double value_si, const BaseQuantities& base, PuKind kind) {
    return value_si / base_of(base, kind);
}

double from_pu(double value_pu, const BaseQuantities& base, PuKind kind) {
    return value_pu * base_of(base, kind);
}

}  // namespace bess
