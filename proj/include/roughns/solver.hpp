#pragma once

#include "roughns/drivers.hpp"
#include "roughns/sample_path.hpp"
#include "roughns/spectral.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace roughns {

struct SolverConfig {
    int dim = 2;
    int trunc = 16;          // Galerkin band: modes with |k_i| <= trunc
    double viscosity = 0.0;  // kinematic viscosity
    double dt = 1e-3;        // step target; subdivided to fit noise breakpoints
    double horizon = 1.0;
    bool dealias = true;
    double blowup_factor = 1e6; // blow-up threshold relative to |xi_0|_0
    int store_every = 1;        // sample cadence in accepted steps
    bool store_states = true;   // keep spectral states for the analysis suite
};

/// Vorticity + mean state. The mean is the value of the constant velocity
/// mode (the k = 0 Fourier coefficient).
struct GalerkinState {
    double t = 0.0;
    SpectralField xi;                     // scalar (d=2) or vector (d=3), mean-free
    std::array<double, 3> mean{0.0, 0.0, 0.0};
};

struct Trajectory {
    SolverConfig config;
    std::vector<double> times;
    std::vector<SpectralField> states; // if config.store_states
    std::vector<std::array<double, 3>> means;
    std::vector<double> enstrophy;     // |xi|_0^2
    std::vector<double> palinstrophy;  // |grad xi|_0^2
    std::vector<double> h1_velocity;   // |u|_1
    std::vector<double> dissipation;   // 2 nu int_0^t |grad xi|_0^2, stage-accumulated
    bool blew_up = false;
    double blowup_time = 0.0;
    bool initial_mean_projected = false; // the given xi0 was not mean-free

    std::size_t size() const { return times.size(); }
    GalerkinState state_at(std::size_t i) const;
    /// Index of the stored sample at time t (within 1e-9), or throws.
    std::size_t index_of(double t) const;

    /// CSV: t,enstrophy,palinstrophy,h1_velocity,mean_1..mean_d,blowup_flag
    void write_csv(std::ostream& os) const;
    void write_csv_file(const std::string& path) const;
};

/// Velocity reconstruction u = K xi + mean.
SpectralField reconstruct_velocity(const GalerkinState& s);

/// Initial-data presets.
SpectralField taylor_green_vorticity(int trunc);
SpectralField random_band_vorticity(int dim, int trunc, int band, double l2_norm,
                                    std::uint64_t seed);

/// Integrate the Galerkin vorticity + mean system driven by the
/// piecewise-linear noise path. Steps subdivide every noise segment, the
/// viscous term is integrated exactly by a Fourier-diagonal factor, and the
/// transport + noise terms by the classical four-stage scheme. The viscous
/// dissipation integral is accumulated with the same stages.
Trajectory solve_vorticity(const SpectralField& xi0, const std::array<double, 3>& mean0,
                           const SolverConfig& cfg, const VectorFieldFamily& fam,
                           const SamplePath& noise);

/// Same dynamics in velocity form (Leray-projected band-truncated system);
/// used for the dual-formulation cross-checks. Returns sampled velocity
/// fields at the same cadence.
struct VelocityTrajectory {
    SolverConfig config;
    std::vector<double> times;
    std::vector<SpectralField> states; // velocity fields (with mean mode)
    bool blew_up = false;
    double blowup_time = 0.0;
};
VelocityTrajectory solve_velocity(const SpectralField& u0, const SolverConfig& cfg,
                                  const VectorFieldFamily& fam, const SamplePath& noise);

/// One stepper evaluation of the vorticity right-hand side
///   nu Lap xi - L_N[(u . grad) xi - 1_{d=3} (xi . grad) u]
///   + sum_k L_N[Lie_{sigma_k} xi] zdot^k,  u = K xi + mean,
/// exposed for oracle tests.
SpectralField vorticity_rhs(const GalerkinState& s, const SolverConfig& cfg,
                            const VectorFieldFamily& fam, const std::vector<double>& zdot);

/// Mean equation right-hand side: d mean^m / dt =
/// (2pi)^{-d} sum_k (v^l, d_m sigma_k^l) zdot^k with v = K xi.
std::array<double, 3> mean_rhs(const GalerkinState& s, const VectorFieldFamily& fam,
                               const std::vector<double>& zdot);

} // namespace roughns
