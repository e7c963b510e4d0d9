#include "bess/config.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "bess/kv.hpp"

namespace bess {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct KeyMap {
    std::map<std::string, KvEntry> entries;  // "section.key" -> entry
    std::set<std::string> consumed;

    const KvEntry* find(const std::string& dotted) {
        auto it = entries.find(dotted);
        if (it == entries.end()) return nullptr;
        consumed.insert(dotted);
        return &it->second;
    }

    double number(const std::string& dotted, double fallback) {
        const KvEntry* e = find(dotted);
        return e ? kv_double(*e) : fallback;
    }

    double required(const std::string& dotted) {
        const KvEntry* e = find(dotted);
        if (!e) throw ConfigError("missing required key `" + dotted + "`");
        return kv_double(*e);
    }
};

std::vector<std::pair<double, double>> parse_cmax_table(const KvEntry& e) {
    // format: i1:c1, i2:c2, ...
    std::vector<std::pair<double, double>> table;
    std::istringstream in(e.value);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw ConfigError("line " + std::to_string(e.line) +
                              ": key `battery.cmax_table`: expected `current:capacity`, got `" +
                              item + "`");
        KvEntry i_e{e.section, e.key, item.substr(0, colon), e.line};
        KvEntry c_e{e.section, e.key, item.substr(colon + 1), e.line};
        // reuse the numeric parser so errors name the key and line
        auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto t = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string{} : s.substr(b, t - b + 1);
        };
        i_e.value = strip(i_e.value);
        c_e.value = strip(c_e.value);
        table.emplace_back(kv_double(i_e), kv_double(c_e));
    }
    return table;
}

}  // namespace

Config parse_config(const std::string& text, const std::string& origin) {
    const auto raw = parse_kv_text(text, origin);
    KeyMap kv;
    for (const auto& e : raw) {
        if (e.key.empty()) continue;  // section marker
        const std::string dotted = e.section + "." + e.key;
        if (kv.entries.count(dotted))
            throw ConfigError(origin + ":" + std::to_string(e.line) + ": duplicate key `" +
                              dotted + "`");
        kv.entries.emplace(dotted, e);
    }

    Config cfg;
    cfg.base.s_va = kv.required("base.s_va");
    cfg.base.v_dc_v = kv.required("base.vdc_v");
    cfg.base.v_ac_v = kv.required("base.vac_v");
    cfg.base.f_hz = kv.required("base.f_hz");

    cfg.control.delta_t_s = kv.required("control.delta_t_s");
    cfg.control.tick_s = kv.required("control.tick_s");
    cfg.control.eta = kv.required("control.eta");
    cfg.control.xi = kv.required("control.xi");

    cfg.droop.alpha_mw_per_hz = kv.number("droop.alpha_mw_per_hz", cfg.droop.alpha_mw_per_hz);
    cfg.droop.beta_kvar_per_v = kv.number("droop.beta_kvar_per_v", cfg.droop.beta_kvar_per_v);
    cfg.droop.db_f_hz = kv.number("droop.db_f_hz", cfg.droop.db_f_hz);
    cfg.droop.db_v_v = kv.number("droop.db_v_v", cfg.droop.db_v_v);
    cfg.droop.p_max_pu = kv.number("droop.p_max_pu", cfg.droop.p_max_pu);
    cfg.droop.q_max_pu = kv.number("droop.q_max_pu", cfg.droop.q_max_pu);

    cfg.battery.r_s = kv.number("battery.rs_pu", cfg.battery.r_s);
    for (int k = 0; k < 3; ++k) {
        const std::string n = std::to_string(k + 1);
        cfg.battery.r[k] = kv.number("battery.r" + n + "_pu", cfg.battery.r[k]);
        cfg.battery.c[k] = kv.number("battery.c" + n + "_pu", cfg.battery.c[k]);
    }
    cfg.battery.ocv_a = kv.number("battery.ocv_a_pu", cfg.battery.ocv_a);
    cfg.battery.ocv_b = kv.number("battery.ocv_b_pu", cfg.battery.ocv_b);
    cfg.battery.soc_min = kv.number("battery.soc_min", cfg.battery.soc_min);
    cfg.battery.soc_max = kv.number("battery.soc_max", cfg.battery.soc_max);
    cfg.battery.v_dc_min = kv.number("battery.vdc_min_pu", cfg.battery.v_dc_min);
    cfg.battery.v_dc_max = kv.number("battery.vdc_max_pu", cfg.battery.v_dc_max);
    if (const KvEntry* e = kv.find("battery.cmax_table"))
        cfg.battery.c_max_table = parse_cmax_table(*e);

    cfg.trace.f_reversion = kv.number("trace.f_reversion_per_s", cfg.trace.f_reversion);
    cfg.trace.f_vol = kv.number("trace.f_vol_hz", cfg.trace.f_vol);
    cfg.trace.vac_reversion = kv.number("trace.vac_reversion_per_s", cfg.trace.vac_reversion);
    cfg.trace.vac_vol = kv.number("trace.vac_vol_pu", cfg.trace.vac_vol);
    cfg.trace.dt_s = kv.number("trace.dt_s", cfg.trace.dt_s);

    for (const auto& [dotted, e] : kv.entries)
        if (!kv.consumed.count(dotted))
            throw ConfigError(origin + ":" + std::to_string(e.line) + ": unknown key `" +
                              dotted + "`");

    cfg.base.validate();
    cfg.control.validate();
    cfg.droop.validate();
    cfg.battery.validate();
    if (!(cfg.trace.dt_s > 0.0)) throw ConfigError("trace.dt_s must be > 0");
    if (!(cfg.trace.f_reversion >= 0.0 && cfg.trace.vac_reversion >= 0.0))
        throw ConfigError("trace reversion rates must be >= 0");
    if (!(cfg.trace.f_vol >= 0.0 && cfg.trace.vac_vol >= 0.0))
        throw ConfigError("trace volatilities must be >= 0");
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_config(buf.str(), path);
}

std::string render_config(const Config& cfg) {
    std::ostringstream out;
    out << "[base]\n";
    out << "s_va = " << fmt(cfg.base.s_va) << "\n";
    out << "vdc_v = " << fmt(cfg.base.v_dc_v) << "\n";
    out << "vac_v = " << fmt(cfg.base.v_ac_v) << "\n";
    out << "f_hz = " << fmt(cfg.base.f_hz) << "\n\n";

    out << "[control]\n";
    out << "delta_t_s = " << fmt(cfg.control.delta_t_s) << "\n";
    out << "tick_s = " << fmt(cfg.control.tick_s) << "\n";
    out << "eta = " << fmt(cfg.control.eta) << "\n";
    out << "xi = " << fmt(cfg.control.xi) << "\n\n";

    out << "[droop]\n";
    out << "alpha_mw_per_hz = " << fmt(cfg.droop.alpha_mw_per_hz) << "\n";
    out << "beta_kvar_per_v = " << fmt(cfg.droop.beta_kvar_per_v) << "\n";
    out << "db_f_hz = " << fmt(cfg.droop.db_f_hz) << "\n";
    out << "db_v_v = " << fmt(cfg.droop.db_v_v) << "\n";
    out << "p_max_pu = " << fmt(cfg.droop.p_max_pu) << "\n";
    out << "q_max_pu = " << fmt(cfg.droop.q_max_pu) << "\n\n";

    out << "[battery]\n";
    out << "rs_pu = " << fmt(cfg.battery.r_s) << "\n";
    for (int k = 0; k < 3; ++k) {
        const std::string n = std::to_string(k + 1);
        out << "r" << n << "_pu = " << fmt(cfg.battery.r[k]) << "\n";
        out << "c" << n << "_pu = " << fmt(cfg.battery.c[k]) << "\n";
    }
    out << "ocv_a_pu = " << fmt(cfg.battery.ocv_a) << "\n";
    out << "ocv_b_pu = " << fmt(cfg.battery.ocv_b) << "\n";
    out << "soc_min = " << fmt(cfg.battery.soc_min) << "\n";
    out << "soc_max = " << fmt(cfg.battery.soc_max) << "\n";
    out << "vdc_min_pu = " << fmt(cfg.battery.v_dc_min) << "\n";
    out << "vdc_max_pu = " << fmt(cfg.battery.v_dc_max) << "\n";
    out << "cmax_table = ";
    for (std::size_t k = 0; k < cfg.battery.c_max_table.size(); ++k) {
        if (k) out << ", ";
        out << fmt(cfg.battery.c_max_table[k].first) << ":"
            << fmt(cfg.battery.c_max_table[k].second);
    }
    out << "\n\n";

    out << "[trace]\n";
    out << "f_reversion_per_s = " << fmt(cfg.trace.f_reversion) << "\n";
    out << "f_vol_hz = " << fmt(cfg.trace.f_vol) << "\n";
    out << "vac_reversion_per_s = " << fmt(cfg.trace.vac_reversion) << "\n";
    out << "vac_vol_pu = " << fmt(cfg.trace.vac_vol) << "\n";
    out << "dt_s = " << fmt(cfg.trace.dt_s) << "\n";
    return out.str();
}

}  // namespace bess
