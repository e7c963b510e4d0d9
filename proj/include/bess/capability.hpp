#pragma once

#include <string>
#include <vector>

#include "bess/core.hpp"

namespace bess {

/// a*P + b*Q <= c
struct Halfspace {
    double a, b, c;
};

/// (P - p0)^2 + (Q - q0)^2 <= r^2
struct Disk {
    double p0, q0, r;
};

/// One convex converter capability region, valid around a (v_ac, v_dc)
/// operating point. The region is the intersection of the half-planes and
/// disks (at least one disk, so it is bounded) and must contain the
/// origin strictly in its interior: zero power is always deliverable.
struct CapabilityCurve {
    double v_ac_key;   ///< AC voltage this curve was fitted at [pu]
    double v_dc_key;   ///< DC voltage this curve was fitted at [pu]
    std::vector<Halfspace> halfspaces;
    std::vector<Disk> disks;
    double soc_scale = 1.0;  ///< optional isotropic derating factor

    void validate(const std::string& origin) const;
};

/// Voltage-indexed family of capability curves.
struct CapabilityCurveSet {
    std::vector<CapabilityCurve> curves;
};

/// Load and validate a curve file (see README for the format). Throws
/// ConfigError on parse errors, empty sets, non-positive radii, duplicate
/// keys, or a curve that does not strictly contain the origin.
CapabilityCurveSet load_curves(const std::string& path);
CapabilityCurveSet parse_curves(const std::string& text, const std::string& origin);

/// Curve whose (v_ac_key, v_dc_key) is nearest to the measured voltages;
/// ties go to the smaller v_dc_key (the more conservative region).
const CapabilityCurve& select_curve(const CapabilityCurveSet& set, double v_ac, double v_dc);

/// Signed worst-case constraint margin at a set-point, after dividing P,Q
/// by soc_scale. <= 0 iff the point is inside the region. Half-space
/// margin is a*P + b*Q - c; disk margin is the radial excess.
double h_eval(const CapabilityCurve& curve, const Setpoint& s);

/// Axis-aligned bounding box of the region in actual (not soc-scaled)
/// coordinates, from the disks and any axis-aligned half-spaces. Finite
/// because every curve carries a disk.
struct Box2 {
    double p_min, p_max, q_min, q_max;
};
Box2 bounding_box(const CapabilityCurve& curve);

}  // namespace bess
