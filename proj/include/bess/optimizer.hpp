#pragma once

#include "bess/battery.hpp"
#include "bess/capability.hpp"
#include "bess/core.hpp"

namespace bess {

/// One projection instance: the initial set-point plus everything the
/// feasible region depends on at this control tick.
struct ProjectionProblem {
    Setpoint s0;              ///< droop output [pu]
    CapabilityCurve curve;    ///< capability region for the measured voltages
    double vc_sum;            ///< sum of RC branch voltages [pu]
    double e;                 ///< open-circuit voltage [pu]
    double r_s;               ///< series resistance [pu]
    double eta;               ///< converter efficiency
    double p_dc_min;          ///< SoC look-ahead bounds [pu]
    double p_dc_max;
    double v_dc_min;          ///< DC-bus voltage window [pu]
    double v_dc_max;
    double xi;                ///< DC-voltage penalty weight, > 0

    PowerBranch branch() const { return branch_of(s0.p); }
    double slope() const { return branch_slope(branch(), eta); }
};

enum class ProjectionStatus { feasible, infeasible, passthrough };

const char* to_string(ProjectionStatus s);

struct ProjectionResult {
    Setpoint s;        ///< final set-point [pu]
    double v_dc;       ///< DC-bus voltage at the solution [pu]
    double p_dc;       ///< DC-side power at the solution [pu]
    double objective;  ///< solved objective (see solve()/oracle() docs)
    bool tight;        ///< DC-voltage equation holds with equality
    ProjectionStatus status;
};

struct VStarResult {
    bool feasible;
    double v;     ///< largest admissible DC voltage for the given p_dc
    bool tight;   ///< v equals the larger quadratic root
};

/// Optimal DC voltage for a fixed DC power under the relaxed voltage
/// constraint: the largest v in [v_dc_min, v_dc_max] with
/// v^2 + (vc_sum - e) v + p_dc r_s <= 0. The penalty -xi*v always prefers
/// the largest admissible v, so this is min(larger root, v_dc_max); the
/// result is tight iff the root itself is returned.
VStarResult v_star(double p_dc, const ProjectionProblem& prob);

/// True when the initial set-point already satisfies every constraint
/// (capability, SoC power box, and a tight in-bounds DC voltage) within
/// `eps`. Shared by solve()'s pass-through shortcut, the baseline method,
/// and the sustained-energy accounting.
bool initial_feasible(const ProjectionProblem& prob, double eps = 1e-12);

/// Project the initial set-point onto the feasible region: minimize
/// (P-P0)^2 + (Q-Q0)^2 - xi*v over capability, SoC power bounds, and the
/// relaxed DC-voltage constraint, with untight (clamped-voltage) points
/// excluded so every feasible result is valid for the original equality
/// model. Pass-through returns s0 bit-exact. `objective` is the penalized
/// value; constraint satisfaction 1e-8, objective accuracy 1e-10.
/// Throws SolverDivergence if the projection fails to settle within the
/// sweep budget (10,000).
ProjectionResult solve(const ProjectionProblem& prob);

struct SolverDivergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Independent brute-force reference: exhaustive scan of the capability
/// bounding box at `grid_step`, keeping the feasible grid point nearest
/// s0. Feasibility per candidate re-derives the DC voltage from the exact
/// quadratic (larger root, in bounds). `objective` is the plain squared
/// distance (no penalty). Within grid_step*sqrt(2) of the true optimum.
ProjectionResult oracle(const ProjectionProblem& prob, double grid_step);

}  // namespace bess
