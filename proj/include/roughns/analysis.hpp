#pragma once

#include "roughns/drivers.hpp"
#include "roughns/horizon.hpp"
#include "roughns/rough_path.hpp"
#include "roughns/sewing.hpp"
#include "roughns/solver.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace roughns {

// ---- remainder diagnostics ---------------------------------------------------

struct RemainderRecord {
    double s = 0.0;
    double t = 0.0;
    double remainder_norm = 0.0; // negative-order Sobolev surrogate norm
    double interval = 0.0;       // t - s
    double control = 0.0;        // omega_Z(s,t) when a control is attached
};

/// Assembles the rough-expansion remainder of a solved trajectory in
/// velocity form,
///   r_{st} = du_{st} - dmu_{st} - A1_{st} u_s - A2_{st} u_s,
/// with the drift integral dmu = int (nu Lap u - P(u.grad u)) by composite
/// Simpson over the stored samples. States must be stored at uniform spacing.
class RemainderStudy {
public:
    RemainderStudy(const Trajectory& traj, const VectorFieldFamily& fam,
                   const RoughPathLift& lift, int sobolev_order = -2);

    std::size_t sample_count() const { return times_.size(); }
    double sample_spacing() const { return dt_; }

    /// Remainder record over [times[i], times[j]].
    RemainderRecord record(std::size_t i, std::size_t j) const;

    /// The same assembly in vorticity form (scalar in d=2), for the
    /// curl-intertwining cross-check.
    SpectralField velocity_remainder_field(std::size_t i, std::size_t j) const;
    SpectralField vorticity_remainder_field(std::size_t i, std::size_t j) const;

    struct LevelPoint {
        double interval = 0.0;
        double mean_norm = 0.0;
        std::size_t count = 0;
    };
    /// Mean remainder norm over all disjoint intervals of the given sample
    /// strides.
    std::vector<LevelPoint> level_means(const std::vector<std::size_t>& strides) const;

    static double fit_slope(const std::vector<LevelPoint>& levels);

private:
    SpectralField drift_integral(std::size_t i, std::size_t j) const;        // velocity
    SpectralField vorticity_drift_integral(std::size_t i, std::size_t j) const;

    const VectorFieldFamily* fam_;
    const RoughPathLift* lift_;
    int order_;
    int trunc_;
    double dt_ = 0.0;
    std::vector<double> times_;
    std::vector<SpectralField> u_;        // reconstructed velocities
    std::vector<SpectralField> drift_;    // nu Lap u - P(u.grad u)
    std::vector<SpectralField> xi_;       // vorticities
    std::vector<SpectralField> xi_drift_; // nu Lap xi - L_N Lie_u xi
};

// ---- pressure recovery ---------------------------------------------------------

struct PressureRecovery {
    std::vector<double> times;
    std::vector<SpectralField> pressure;   // gradient-sector fields
    double max_leray_residual = 0.0;       // max_t |P pi_t| / |pi_t|
    double max_cauchy_difference = 0.0;    // worst sewing tail across segments
    bool sewing_converged = true;
    double additivity_defect = 0.0;        // |I[0,b] - I[0,m] - I[m,b]|
};

/// Recovers the time-integrated pressure gradient path
///   pi_t = -int_0^t Q(u_r . grad u_r) dr + I_t,
/// where I is the sewing limit of the gradient-sector driver germ
/// h_{st} = AQ1_{st} u_s + AQ2_{st} u_s. Output at every `stride`-th stored
/// sample; a segment counts as converged when its tail estimate falls under
/// `tol`.
PressureRecovery pressure_recovery(const Trajectory& traj, const VectorFieldFamily& fam,
                                   const RoughPathLift& lift, std::size_t stride,
                                   double tol = 1e-9);

// ---- balance and convergence studies -------------------------------------------

/// max_t | |xi_t|^2 + 2 nu int_0^t |grad xi|^2 - |xi_0|^2 | / |xi_0|^2 for a
/// d=2 trajectory. Uses the solver-recorded dissipation integral when
/// available, otherwise the trapezoid of the stored palinstrophy.
double enstrophy_balance_residual(const Trajectory& traj, double viscosity);

/// d=3 stretching budget: the same residual, reported (not asserted) since
/// the balance fails by design in three dimensions.
struct StretchingBudget {
    double residual = 0.0;
    double enstrophy_initial = 0.0;
    double enstrophy_final = 0.0;
    double dissipation_total = 0.0;
};
StretchingBudget stretching_budget_3d(const Trajectory& traj);

struct WongZakaiRow {
    double mesh = 0.0;
    double c0_h0_distance = 0.0; // sup_t |u - u_ref|_0
    double l2_h1_distance = 0.0; // (int |u - u_ref|_1^2 dt)^{1/2}
};
struct WongZakaiStudy {
    std::vector<WongZakaiRow> rows; // coarse to fine
    double reference_mesh = 0.0;
    bool monotone = false;  // nonincreasing with 10% slack per level
    double final_over_initial = 0.0;
};

/// Solves the system for piecewise-linear interpolations of one Brownian
/// sample at a nested family of meshes and reports distances to the
/// finest-mesh reference solution.
WongZakaiStudy wong_zakai_study(const SamplePath& reference_path,
                                const std::vector<std::size_t>& strides,
                                const SpectralField& xi0, const std::array<double, 3>& mean0,
                                const SolverConfig& cfg, const VectorFieldFamily& fam);

struct StabilityRow {
    double perturbation = 0.0;   // epsilon
    double driver_distance = 0.0; // rough-path distance, scaling mode
    double solution_distance = 0.0; // sup_t |xi - xi'|_0
};
struct StabilityStudy {
    std::vector<StabilityRow> rows;
    bool distances_decreasing = false;
    double gronwall_constant = 0.0; // fitted C of the two-solution contraction bound
    double linearity_spread = 0.0;  // max/min of solution_distance / perturbation
};

/// Driver-scaling stability: solves with lifts of (1+eps) z and reports
/// rough-path distance vs solution distance per epsilon (decreasing).
StabilityStudy driver_stability_study(const SamplePath& base_path,
                                      const std::vector<double>& epsilons,
                                      const SpectralField& xi0,
                                      const std::array<double, 3>& mean0,
                                      const SolverConfig& cfg, const VectorFieldFamily& fam);

/// Initial-condition stability: perturbs xi0 by eps * (unit-norm field) and
/// fits the contraction constant C of
///   sup_t |dxi_t|^2 <= C (|dxi_0|^2 + |dmean_0|^2) exp{C |xi0|^2}.
StabilityStudy initial_condition_stability_study(
    const SamplePath& path, const std::vector<double>& epsilons, const SpectralField& xi0,
    const std::array<double, 3>& mean0, const SolverConfig& cfg, const VectorFieldFamily& fam,
    std::uint64_t perturbation_seed);

/// Fitted constant of the mean a priori bound
///   sup_t |mean_t| <= C exp{C (1 + sup_t |v_t|_1)^p} (1 + |mean_0|).
double fit_mean_bound_constant(const Trajectory& traj, double p);

/// Least-squares slope of log(y) against log(x).
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace roughns
