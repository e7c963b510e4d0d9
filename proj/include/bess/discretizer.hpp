#pragma once

#include <string>
#include <vector>

#include "bess/capability.hpp"
#include "bess/core.hpp"

namespace bess {

/// Static context a ray table is built against: the capability curve and
/// SoC-derived DC power box frozen at build time, plus the measured
/// operating point recorded for provenance. The DC-voltage equation does
/// not appear here; the measured v_dc stands in for it.
struct RayContext {
    CapabilityCurve curve;
    double p_dc_min = -1e30;
    double p_dc_max = 1e30;
    double eta = 0.95;
    double v_ac = 1.0;   ///< recorded context [pu]
    double v_dc = 1.0;   ///< recorded context [pu]
    double soc = 0.5;    ///< recorded context
};

/// Per-degree maximum feasible radius in the (P, Q) plane. The unit
/// direction of every angle is cached so the lookup path never touches
/// trigonometry beyond the one arctangent.
struct RayTable {
    std::vector<double> smax;   ///< entry j-1 = max radius along angle j*res_deg
    std::vector<double> ux, uy; ///< cached unit direction per entry
    double res_deg = 1.0;       ///< angular resolution [deg], 360/size()
    RayContext ctx;
    std::string curve_hash;     ///< stamp of the curve file (loaded tables)

    int size() const { return static_cast<int>(smax.size()); }
};

/// Unit direction for an angle in degrees, exact at multiples of 90 so
/// axis-aligned rays carry no active/reactive leakage.
void unit_vec_deg(double deg, double& ux, double& uy);

/// Largest radius r such that r*(cos theta, sin theta) satisfies the
/// capability region and the branch-mapped DC power box. Bisection on
/// [0, 2], 60 iterations; feasible radii form an interval because the
/// region is convex and contains the origin.
double ray_max(double theta_deg, const RayContext& ctx);

/// smax[j] = ray_max(j * res) for j = 1..360/res. resolution_deg must
/// divide 360.
RayTable build_table(const RayContext& ctx, int resolution_deg = 1);

/// Quadrant-correct polar angle of s0 mapped to (0, 360] then ceiled.
/// P = 0 maps to 90 (q >= 0) or 270; angle 0 wraps to 360.
int angle_deg(const Setpoint& s0);

/// Generalization used by fast_project for non-1-degree tables.
int angle_index(const Setpoint& s0, double res_deg);

/// Algorithm-2 lookup: pass s0 through unchanged when its magnitude is
/// within the table entry for its (ceiled) angle, otherwise clip radially
/// onto that entry along the integer-degree direction.
Setpoint fast_project(const Setpoint& s0, const RayTable& table);

/// CSV persistence: `deg,smax_pu` rows with `#` header comments recording
/// the build context and the curve-file hash.
void save_table(const RayTable& table, const std::string& path,
                const std::string& curve_hash);
RayTable load_table(const std::string& path);

/// FNV-1a content hash used to stamp tables with their curve file.
std::string file_hash_hex(const std::string& path);

}  // namespace bess
