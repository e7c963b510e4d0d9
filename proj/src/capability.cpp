#include "bess/capability.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "bess/kv.hpp"

namespace bess {

void CapabilityCurve::validate(const std::string& origin) const {
    if (disks.empty())
        throw ConfigError(origin + ": curve needs at least one disk (bounded region)");
    for (const auto& d : disks)
        if (!(d.r > 0.0)) throw ConfigError(origin + ": disk radius must be > 0");
    for (const auto& h : halfspaces)
        if (h.a == 0.0 && h.b == 0.0)
            throw ConfigError(origin + ": halfspace has zero normal");
    if (!(soc_scale > 0.0)) throw ConfigError(origin + ": soc_scale must be > 0");
    if (!(h_eval(*this, Setpoint{0.0, 0.0}) < 0.0))
        throw ConfigError(origin + ": region must contain the origin strictly");
}

double h_eval(const CapabilityCurve& curve, const Setpoint& s) {
    const double p = s.p / curve.soc_scale;
    const double q = s.q / curve.soc_scale;
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& h : curve.halfspaces) worst = std::max(worst, h.a * p + h.b * q - h.c);
    for (const auto& d : curve.disks)
        worst = std::max(worst, std::hypot(p - d.p0, q - d.q0) - d.r);
    return worst;
}

const CapabilityCurve& select_curve(const CapabilityCurveSet& set, double v_ac, double v_dc) {
    const CapabilityCurve* best = nullptr;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (const auto& c : set.curves) {
        const double da = v_ac - c.v_ac_key;
        const double dd = v_dc - c.v_dc_key;
        const double d2 = da * da + dd * dd;
        if (d2 < best_d2 || (d2 == best_d2 && best && c.v_dc_key < best->v_dc_key)) {
            best = &c;
            best_d2 = d2;
        }
    }
    if (!best) throw ConfigError("select_curve: empty curve set");
    return *best;
}

Box2 bounding_box(const CapabilityCurve& curve) {
    const double inf = std::numeric_limits<double>::infinity();
    Box2 b{-inf, inf, -inf, inf};
    for (const auto& d : curve.disks) {
        b.p_min = std::max(b.p_min, d.p0 - d.r);
        b.p_max = std::min(b.p_max, d.p0 + d.r);
        b.q_min = std::max(b.q_min, d.q0 - d.r);
        b.q_max = std::min(b.q_max, d.q0 + d.r);
    }
    for (const auto& h : curve.halfspaces) {
        if (h.b == 0.0 && h.a != 0.0) {
            if (h.a > 0.0) b.p_max = std::min(b.p_max, h.c / h.a);
            else b.p_min = std::max(b.p_min, h.c / h.a);
        } else if (h.a == 0.0 && h.b != 0.0) {
            if (h.b > 0.0) b.q_max = std::min(b.q_max, h.c / h.b);
            else b.q_min = std::max(b.q_min, h.c / h.b);
        }
    }
    b.p_min *= curve.soc_scale;
    b.p_max *= curve.soc_scale;
    b.q_min *= curve.soc_scale;
    b.q_max *= curve.soc_scale;
    return b;
}

namespace {

std::vector<double> parse_numbers(const KvEntry& e, std::size_t want) {
    std::istringstream in(e.value);
    std::vector<double> v;
    double x;
    while (in >> x) v.push_back(x);
    if (!in.eof() || v.size() != want)
        throw ConfigError("line " + std::to_string(e.line) + ": key `" + e.key + "`: expected " +
                          std::to_string(want) + " numbers, got `" + e.value + "`");
    return v;
}

}  // namespace

CapabilityCurveSet parse_curves(const std::string& text, const std::string& origin) {
    const auto entries = parse_kv_text(text, origin);
    CapabilityCurveSet set;
    CapabilityCurve cur;
    bool open = false;
    bool have_vac = false, have_vdc = false;
    int open_line = 0;

    auto close = [&]() {
        if (!open) return;
        const std::string where = origin + ":" + std::to_string(open_line);
        if (!have_vac || !have_vdc)
            throw ConfigError(where + ": curve missing vac_pu/vdc_pu");
        cur.validate(where);
        set.curves.push_back(cur);
    };

    for (const auto& e : entries) {
        if (e.key.empty()) {  // section marker
            if (e.section != "curve")
                throw ConfigError(origin + ":" + std::to_string(e.line) +
                                  ": unknown section `[" + e.section + "]`");
            close();
            cur = CapabilityCurve{};
            open = true;
            have_vac = have_vdc = false;
            open_line = e.line;
            continue;
        }
        if (!open)
            throw ConfigError(origin + ":" + std::to_string(e.line) +
                              ": key outside a [curve] section");
        if (e.key == "vac_pu") {
            cur.v_ac_key = kv_double(e);
            have_vac = true;
        } else if (e.key == "vdc_pu") {
            cur.v_dc_key = kv_double(e);
            have_vdc = true;
        } else if (e.key == "halfspace") {
            const auto v = parse_numbers(e, 3);
            cur.halfspaces.push_back({v[0], v[1], v[2]});
        } else if (e.key == "disk") {
            const auto v = parse_numbers(e, 3);
            cur.disks.push_back({v[0], v[1], v[2]});
        } else if (e.key == "soc_scale") {
            cur.soc_scale = kv_double(e);
        } else {
            throw ConfigError(origin + ":" + std::to_string(e.line) + ": unknown key `curve." +
                              e.key + "`");
        }
    }
    close();
    if (set.curves.empty()) throw ConfigError(origin + ": no [curve] sections");
    for (std::size_t i = 0; i < set.curves.size(); ++i)
        for (std::size_t j = i + 1; j < set.curves.size(); ++j)
            if (set.curves[i].v_ac_key == set.curves[j].v_ac_key &&
                set.curves[i].v_dc_key == set.curves[j].v_dc_key)
                throw ConfigError(origin + ": duplicate curve key (vac=" +
                                  std::to_string(set.curves[i].v_ac_key) +
                                  ", vdc=" + std::to_string(set.curves[i].v_dc_key) + ")");
    return set;
}

CapabilityCurveSet load_curves(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open curve file: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_curves(buf.str(), path);
}

}  // namespace bess
