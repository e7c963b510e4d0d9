#include "bess/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace bess {

namespace {

constexpr double kPassEps = 1e-12;   // pass-through feasibility tolerance
constexpr double kVerifyTol = 1e-8;  // constraint satisfaction at returned points
constexpr double kSweepTol = 1e-15;  // Dykstra start-of-sweep displacement
constexpr int kMaxSweeps = 10000;

constexpr double kInf = std::numeric_limits<double>::infinity();

/// DC-power interval on which the larger quadratic root lies inside
/// [v_min, v_max]. Points outside are excluded from the feasible set:
/// a clamped voltage would satisfy the relaxation but not the equality
/// model, so the solution would be invalid for the original problem.
struct PdcWindow {
    bool ok;
    double lo, hi;
};

PdcWindow tight_pdc_window(double a, double r_s, double v_min, double v_max) {
    if (v_max < 0.5 * a) return {false, 0.0, 0.0};  // root never drops to v_max
    const double lo = v_max * (a - v_max) / r_s;
    const double hi =
        (v_min <= 0.5 * a) ? a * a / (4.0 * r_s) : v_min * (a - v_min) / r_s;
    return {true, lo, hi};
}

struct Point {
    double x, y;
};

/// One convex set with a closed-form Euclidean projection. Capability
/// constraints are pre-scaled by soc_scale so they live in actual (P, Q)
/// coordinates; the P-box edges are plain halfspaces.
struct ConvexSet {
    enum class Kind { halfspace, disk } kind;
    double a = 0, b = 0, c = 0;  // a*x + b*y <= c
    double cx = 0, cy = 0, r = 0;

    void project(Point& p) const {
        if (kind == Kind::halfspace) {
            const double d = a * p.x + b * p.y - c;
            if (d > 0.0) {
                const double n2 = a * a + b * b;
                p.x -= a * d / n2;
                p.y -= b * d / n2;
            }
        } else {
            const double dx = p.x - cx, dy = p.y - cy;
            const double dist = std::hypot(dx, dy);
            if (dist > r) {
                const double s = r / dist;
                p.x = cx + dx * s;
                p.y = cy + dy * s;
            }
        }
    }

    double distance(const Point& p) const {
        if (kind == Kind::halfspace) {
            const double d = a * p.x + b * p.y - c;
            return d > 0.0 ? d / std::hypot(a, b) : 0.0;
        }
        const double d = std::hypot(p.x - cx, p.y - cy) - r;
        return d > 0.0 ? d : 0.0;
    }
};

std::vector<ConvexSet> build_sets(const ProjectionProblem& prob, double p_lo, double p_hi) {
    const double s = prob.curve.soc_scale;
    std::vector<ConvexSet> sets;
    sets.reserve(prob.curve.halfspaces.size() + prob.curve.disks.size() + 2);
    ConvexSet box;
    box.kind = ConvexSet::Kind::halfspace;
    box.a = 1.0;
    box.b = 0.0;
    box.c = p_hi;
    sets.push_back(box);
    box.a = -1.0;
    box.c = -p_lo;
    sets.push_back(box);
    for (const auto& h : prob.curve.halfspaces) {
        ConvexSet cs;
        cs.kind = ConvexSet::Kind::halfspace;
        cs.a = h.a;
        cs.b = h.b;
        cs.c = h.c * s;
        sets.push_back(cs);
    }
    for (const auto& d : prob.curve.disks) {
        ConvexSet cs;
        cs.kind = ConvexSet::Kind::disk;
        cs.cx = d.p0 * s;
        cs.cy = d.q0 * s;
        cs.r = d.r * s;
        sets.push_back(cs);
    }
    return sets;
}

double max_violation(const Point& p, const std::vector<ConvexSet>& sets) {
    double worst = 0.0;
    for (const auto& s : sets) worst = std::max(worst, s.distance(p));
    return worst;
}

/// KKT certificate for the projection of `target` onto the intersection:
/// target - x must lie in the cone of the outward normals of the active
/// sets. In two dimensions any cone member is a non-negative combination
/// of at most two generators, so subsets of size <= 2 are exhaustive.
bool projection_certified(const Point& x, const Point& target,
                          const std::vector<ConvexSet>& sets) {
    const double rx = target.x - x.x, ry = target.y - x.y;
    const double rn = std::hypot(rx, ry);
    const double tol = 1e-6 * std::max(1.0, rn);
    if (rn <= tol) return true;  // interior optimum

    std::vector<Point> normals;
    for (const auto& s : sets) {
        if (s.kind == ConvexSet::Kind::halfspace) {
            const double nn = std::hypot(s.a, s.b);
            if (std::abs(s.a * x.x + s.b * x.y - s.c) / nn <= 1e-9)
                normals.push_back({s.a / nn, s.b / nn});
        } else {
            const double dx = x.x - s.cx, dy = x.y - s.cy;
            const double d = std::hypot(dx, dy);
            if (d > 0.0 && std::abs(d - s.r) <= 1e-9) normals.push_back({dx / d, dy / d});
        }
    }

    auto residual_single = [&](const Point& n) {
        const double lam = std::max(0.0, rx * n.x + ry * n.y);
        return std::hypot(rx - lam * n.x, ry - lam * n.y);
    };
    double best = rn;  // empty combination
    for (const auto& n : normals) best = std::min(best, residual_single(n));
    for (std::size_t i = 0; i < normals.size(); ++i) {
        for (std::size_t j = i + 1; j < normals.size(); ++j) {
            const Point &ni = normals[i], &nj = normals[j];
            const double det = ni.x * nj.y - ni.y * nj.x;
            if (std::abs(det) < 1e-12) continue;
            const double li = (rx * nj.y - ry * nj.x) / det;
            const double lj = (ni.x * ry - ni.y * rx) / det;
            if (li >= -1e-12 && lj >= -1e-12) return true;  // exact representation
        }
    }
    return best <= tol;
}

/// Cyclic projections with Dykstra's correction terms: converges to the
/// exact Euclidean projection of `target` onto the intersection (or to
/// the minimal-gap cycle when the intersection is empty, which the
/// caller detects through the residual violation).
Point dykstra(Point target, const std::vector<ConvexSet>& sets, bool& converged) {
    Point x = target;
    std::vector<Point> corr(sets.size(), Point{0.0, 0.0});
    converged = false;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        const Point start = x;
        for (std::size_t i = 0; i < sets.size(); ++i) {
            Point z{x.x + corr[i].x, x.y + corr[i].y};
            Point proj = z;
            sets[i].project(proj);
            corr[i] = {z.x - proj.x, z.y - proj.y};
            x = proj;
        }
        const double dx = x.x - start.x, dy = x.y - start.y;
        if (dx * dx + dy * dy < kSweepTol * kSweepTol) {
            converged = true;
            break;
        }
    }
    return x;
}

ProjectionResult infeasible_result() {
    return {Setpoint{0.0, 0.0}, std::numeric_limits<double>::quiet_NaN(), 0.0, kInf, false,
            ProjectionStatus::infeasible};
}

bool feasible_everywhere(const Point& p, const std::vector<ConvexSet>& sets, double tol) {
    for (const auto& s : sets)
        if (s.distance(p) > tol) return false;
    return true;
}

/// Exact projection by active-set enumeration, used when the sweep-based
/// iterate fails certification (near-tangential boundaries make cyclic
/// projections crawl). Candidates are the per-set projections of the
/// target and all pairwise boundary intersections; any candidate that is
/// feasible and certified IS the unique projection.
bool exact_projection(const Point& target, const std::vector<ConvexSet>& sets, Point& out) {
    std::vector<Point> cand;
    cand.push_back(target);
    for (const auto& s : sets) {
        Point p = target;
        s.project(p);
        cand.push_back(p);
    }
    for (std::size_t i = 0; i < sets.size(); ++i) {
        for (std::size_t j = i + 1; j < sets.size(); ++j) {
            const auto &a = sets[i], &b = sets[j];
            const bool ah = a.kind == ConvexSet::Kind::halfspace;
            const bool bh = b.kind == ConvexSet::Kind::halfspace;
            if (ah && bh) {
                const double det = a.a * b.b - a.b * b.a;
                if (std::abs(det) < 1e-12) continue;
                cand.push_back({(a.c * b.b - a.b * b.c) / det, (a.a * b.c - a.c * b.a) / det});
            } else if (ah != bh) {
                const auto& h = ah ? a : b;
                const auto& d = ah ? b : a;
                const double nn = std::hypot(h.a, h.b);
                const double dist = (h.a * d.cx + h.b * d.cy - h.c) / nn;
                if (std::abs(dist) > d.r) continue;
                const double fx = d.cx - h.a / nn * dist, fy = d.cy - h.b / nn * dist;
                const double along = std::sqrt(std::max(0.0, d.r * d.r - dist * dist));
                cand.push_back({fx - h.b / nn * along, fy + h.a / nn * along});
                cand.push_back({fx + h.b / nn * along, fy - h.a / nn * along});
            } else {
                const double dx = b.cx - a.cx, dy = b.cy - a.cy;
                const double d = std::hypot(dx, dy);
                if (d < 1e-15 || d > a.r + b.r || d < std::abs(a.r - b.r)) continue;
                const double along = (a.r * a.r - b.r * b.r + d * d) / (2.0 * d);
                const double h2 = a.r * a.r - along * along;
                const double h = std::sqrt(std::max(0.0, h2));
                const double mx = a.cx + along * dx / d, my = a.cy + along * dy / d;
                cand.push_back({mx - h * dy / d, my + h * dx / d});
                cand.push_back({mx + h * dy / d, my - h * dx / d});
            }
        }
    }
    bool found = false;
    double best_d2 = kInf;
    for (const auto& c : cand) {
        const double d2 = (c.x - target.x) * (c.x - target.x) +
                          (c.y - target.y) * (c.y - target.y);
        if (d2 >= best_d2) continue;
        if (!feasible_everywhere(c, sets, 1e-9)) continue;
        if (!projection_certified(c, target, sets)) continue;
        best_d2 = d2;
        out = c;
        found = true;
    }
    return found;
}

}  // namespace

const char* to_string(ProjectionStatus s) {
    switch (s) {
        case ProjectionStatus::feasible: return "feasible";
        case ProjectionStatus::infeasible: return "infeasible";
        case ProjectionStatus::passthrough: return "passthrough";
    }
    return "?";
}

VStarResult v_star(double p_dc, const ProjectionProblem& prob) {
    const double a = prob.e - prob.vc_sum;
    const double disc = a * a - 4.0 * p_dc * prob.r_s;
    if (disc < 0.0) return {false, 0.0, false};
    const double sq = std::sqrt(disc);
    const double v_hi = 0.5 * (a + sq);
    // smaller root by Vieta where it is stable
    const double v_lo = v_hi != 0.0 ? p_dc * prob.r_s / v_hi : 0.5 * (a - sq);
    const double hi = std::min(v_hi, prob.v_dc_max);
    const double lo = std::max(v_lo, prob.v_dc_min);
    if (hi < lo) return {false, 0.0, false};
    return {true, hi, hi == v_hi};
}

bool initial_feasible(const ProjectionProblem& prob, double eps) {
    if (h_eval(prob.curve, prob.s0) > eps) return false;
    const auto w = tight_pdc_window(prob.e - prob.vc_sum, prob.r_s, prob.v_dc_min, prob.v_dc_max);
    if (!w.ok) return false;
    const double lo = std::max(w.lo, prob.p_dc_min);
    const double hi = std::min(w.hi, prob.p_dc_max);
    if (lo > hi) return false;
    const double p_dc = prob.slope() * prob.s0.p;
    const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
    return p_dc >= lo - eps * scale && p_dc <= hi + eps * scale;
}

ProjectionResult solve(const ProjectionProblem& prob) {
    const double k = prob.slope();
    const double a = prob.e - prob.vc_sum;

    const auto w = tight_pdc_window(a, prob.r_s, prob.v_dc_min, prob.v_dc_max);
    if (!w.ok) return infeasible_result();
    const double pdc_lo = std::max(w.lo, prob.p_dc_min);
    const double pdc_hi = std::min(w.hi, prob.p_dc_max);
    if (pdc_lo > pdc_hi) return infeasible_result();

    auto finish = [&](const Setpoint& s, ProjectionStatus status) -> ProjectionResult {
        const double p_dc = std::clamp(k * s.p, pdc_lo, pdc_hi);
        const auto vs = v_star(p_dc, prob);
        if (!vs.feasible) return infeasible_result();  // cannot happen inside the window
        const double dp = s.p - prob.s0.p, dq = s.q - prob.s0.q;
        return {s, vs.v, p_dc, dp * dp + dq * dq - prob.xi * vs.v, vs.tight, status};
    };

    if (initial_feasible(prob, kPassEps)) return finish(prob.s0, ProjectionStatus::passthrough);

    // P-interval the tight-voltage window and SoC box allow
    const double p_lo = pdc_lo / k;
    const double p_hi = pdc_hi / k;
    const Box2 bb = bounding_box(prob.curve);
    if (p_hi < bb.p_min || p_lo > bb.p_max) return infeasible_result();

    const auto sets = build_sets(prob, p_lo, p_hi);

    // Derivative of the -xi * v(p_dc(P)) penalty term; the floor keeps it
    // finite where the discriminant pinches off at the window edge.
    auto phi_prime = [&](double p_ac) {
        double disc = a * a - 4.0 * (k * p_ac) * prob.r_s;
        if (disc < 1e-18) disc = 1e-18;
        return prob.xi * k * prob.r_s / std::sqrt(disc);
    };

    // Projection with a gradient-corrected target: x solves the penalized
    // program iff x = Proj(s0 - 0.5*phi'(x_P) e_P), and the map is a
    // contraction with factor 0.5*Lip(phi') (tiny for practical xi).
    bool all_converged = true;
    Point x{prob.s0.p, prob.s0.q};
    double tilt = 0.0;
    Point prev{kInf, kInf};
    bool settled = false;
    for (int outer = 0; outer < 100; ++outer) {
        bool conv = false;
        x = dykstra({prob.s0.p - 0.5 * tilt, prob.s0.q}, sets, conv);
        all_converged = all_converged && conv;
        const double dx = x.x - prev.x, dy = x.y - prev.y;
        if (outer > 0 && dx * dx + dy * dy < 1e-26) {
            settled = true;
            break;
        }
        prev = x;
        tilt = phi_prime(x.x);
    }
    all_converged = all_converged && settled;

    // pull the iterate onto the boundary dust left by the stopping rule
    for (int pass = 0; pass < 64 && max_violation(x, sets) > 1e-13; ++pass)
        for (const auto& s : sets) s.project(x);

    const Point tilted{prob.s0.p - 0.5 * tilt, prob.s0.q};
    bool certified = all_converged && projection_certified(x, tilted, sets);
    if (!certified) {
        // sweep iteration crawled (near-tangential boundaries); fall back
        // to the closed-form active-set candidates
        Point exact{0.0, 0.0};
        if (exact_projection(tilted, sets, exact)) {
            x = exact;
            certified = true;
        }
    }

    const Setpoint s{x.x, x.y};
    const double p_dc = k * s.p;
    const double scale = std::max({1.0, std::abs(pdc_lo), std::abs(pdc_hi)});
    const bool ok = h_eval(prob.curve, s) <= kVerifyTol &&
                    p_dc >= pdc_lo - kVerifyTol * scale && p_dc <= pdc_hi + kVerifyTol * scale;
    if (!ok) return infeasible_result();  // residual gap: the region is empty
    if (!certified) throw SolverDivergence("projection did not settle within the sweep budget");
    return finish(s, ProjectionStatus::feasible);
}

ProjectionResult oracle(const ProjectionProblem& prob, double grid_step) {
    const double k = prob.slope();
    const double a = prob.e - prob.vc_sum;
    const Box2 bb = bounding_box(prob.curve);

    const long ip_min = static_cast<long>(std::ceil(bb.p_min / grid_step));
    const long ip_max = static_cast<long>(std::floor(bb.p_max / grid_step));
    const long iq_min = static_cast<long>(std::ceil(bb.q_min / grid_step));
    const long iq_max = static_cast<long>(std::floor(bb.q_max / grid_step));
    if (ip_min > ip_max || iq_min > iq_max) return infeasible_result();

    const long ip0 = std::clamp(static_cast<long>(std::llround(prob.s0.p / grid_step)), ip_min,
                                ip_max);
    const long iq0 = std::clamp(static_cast<long>(std::llround(prob.s0.q / grid_step)), iq_min,
                                iq_max);

    double best_d2 = kInf;
    ProjectionResult best = infeasible_result();

    // per-candidate feasibility: capability, DC-power box, and an exact
    // in-bounds voltage root (re-derived here, not via v_star)
    auto admissible_v = [&](double p) -> double {
        const double p_dc = k * p;
        if (p_dc < prob.p_dc_min || p_dc > prob.p_dc_max)
            return std::numeric_limits<double>::quiet_NaN();
        const double disc = a * a - 4.0 * p_dc * prob.r_s;
        if (disc < 0.0) return std::numeric_limits<double>::quiet_NaN();
        const double v = 0.5 * (a + std::sqrt(disc));
        if (v < prob.v_dc_min || v > prob.v_dc_max)
            return std::numeric_limits<double>::quiet_NaN();
        return v;
    };

    // walk rows outward from the initial point; distances grow
    // monotonically outward, so every skipped point provably loses
    auto scan_row = [&](long ip) -> bool {
        if (ip < ip_min || ip > ip_max) return false;
        const double p = static_cast<double>(ip) * grid_step;
        const double dp = p - prob.s0.p;
        const double dp2 = dp * dp;
        if (dp2 >= best_d2) return false;
        const double v = admissible_v(p);
        if (std::isnan(v)) return true;

        auto try_q = [&](long iq) -> bool {
            if (iq < iq_min || iq > iq_max) return false;
            const double q = static_cast<double>(iq) * grid_step;
            const double dq = q - prob.s0.q;
            const double d2 = dp2 + dq * dq;
            if (d2 >= best_d2) return false;
            if (h_eval(prob.curve, Setpoint{p, q}) <= 0.0) {
                best = {Setpoint{p, q}, v, k * p, d2, true, ProjectionStatus::feasible};
                best_d2 = d2;
                return false;  // nearest feasible point in this direction
            }
            return true;
        };
        for (long iq = iq0; try_q(iq); ++iq) {}
        for (long iq = iq0 - 1; try_q(iq); --iq) {}
        return true;
    };
    for (long ip = ip0; scan_row(ip); ++ip) {}
    for (long ip = ip0 - 1; scan_row(ip); --ip) {}

    if (best.status == ProjectionStatus::infeasible) return best;

    auto feas = [&](const Setpoint& s) {
        return !std::isnan(admissible_v(s.p)) && h_eval(prob.curve, s) <= 0.0;
    };
    auto d2_of = [&](const Setpoint& s) {
        return (s.p - prob.s0.p) * (s.p - prob.s0.p) + (s.q - prob.s0.q) * (s.q - prob.s0.q);
    };

    // Polar polish: a grid argmin localizes the optimum in value but
    // smears along flat boundary arcs in coordinates. Seen from s0, the
    // entry distance into the (convex) region along a ray is quasiconvex
    // in the angle -- its sublevel sets are the direction cones of convex
    // sets -- so an angular search with a bisected entry point per ray
    // pins the projection down far inside the contracted grid_step*sqrt(2)
    // radius.
    Setpoint g = best.s;
    if (feas(prob.s0)) {
        g = prob.s0;
    } else {
        const double t_best = std::sqrt(best_d2);
        const double reach = 3.0 * (t_best + grid_step) + 1.0;
        auto entry = [&](double phi, Setpoint* point) -> double {
            const double cx = std::cos(phi), cy = std::sin(phi);
            double t_hi = -1.0;
            for (int j = 1; j <= 48; ++j) {  // locate any feasible stretch of the ray
                const double t = reach * j / 48.0;
                if (feas({prob.s0.p + t * cx, prob.s0.q + t * cy})) {
                    t_hi = t;
                    break;
                }
            }
            if (t_hi < 0.0) return kInf;
            double t_lo = 0.0;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (t_lo + t_hi);
                if (feas({prob.s0.p + mid * cx, prob.s0.q + mid * cy})) t_hi = mid;
                else t_lo = mid;
            }
            if (point) *point = {prob.s0.p + t_hi * cx, prob.s0.q + t_hi * cy};
            return t_hi;
        };
        // scan-and-rebracket: by quasiconvexity the argmin sample of each
        // round stays within one spacing of the true argmin, so shrinking
        // the window to +-1 spacing never loses it (and tolerates the
        // infinite plateau outside the hitting cone)
        double center = std::atan2(best.s.q - prob.s0.q, best.s.p - prob.s0.p);
        double span = 3.141592653589793;
        double best_t = entry(center, nullptr);
        double best_phi = center;
        for (int round = 0; round < 10; ++round) {
            const double spacing = span / 12.0;
            for (int j = -12; j <= 12; ++j) {
                const double phi = center + spacing * j;
                const double t = entry(phi, nullptr);
                if (t < best_t) {
                    best_t = t;
                    best_phi = phi;
                }
            }
            center = best_phi;
            span = 2.0 * spacing;
        }
        Setpoint polished;
        if (entry(best_phi, &polished) < kInf && feas(polished) && d2_of(polished) < best_d2)
            g = polished;
    }
    best.s = g;
    best.p_dc = k * g.p;
    best.v_dc = admissible_v(g.p);
    best.objective = d2_of(g);
    return best;
}

}  // namespace bess
