#pragma once

#include "roughns/rough_path.hpp"
#include "roughns/spectral.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace roughns {

/// The K divergence-free perturbation fields sigma_k as band-limited
/// trigonometric polynomials. Immutable after construction.
class VectorFieldFamily {
public:
    VectorFieldFamily() = default;
    /// Fields must be vector-valued, divergence-free and Hermitian.
    explicit VectorFieldFamily(std::vector<SpectralField> sigmas);

    int size() const { return static_cast<int>(sigma_.size()); }
    int dim() const { return sigma_.empty() ? 0 : sigma_.front().dim(); }
    int max_frequency() const { return max_freq_; }
    const SpectralField& sigma(int k) const { return sigma_.at(static_cast<std::size_t>(k)); }

    /// sup-norm of all derivatives of order exactly m, maximized over the
    /// family (W^{m,infty} seminorm, evaluated on an oversampled grid).
    double seminorm_inf(int order) const;

private:
    std::vector<SpectralField> sigma_;
    int max_freq_ = 0;
};

/// One evaluated rough increment (Z_{st}, ZZ_{st}) of the driving path.
struct DriverIncrement {
    double s = 0.0;
    double t = 0.0;
    std::vector<double> z; // K
    LevelTwo zz;           // K x K

    static DriverIncrement from_lift(const RoughPathLift& lift, double s, double t);
    static DriverIncrement zero(int k_dim);
};

/// (sigma . grad) phi + (grad sigma) phi with [(grad sigma) phi]_i =
/// phi^j d_i sigma^j; the one-form transport operator acting on velocity
/// fields. Output truncated to `trunc_out` (default: max of the inputs).
SpectralField lie_oneform(const SpectralField& sigma, const SpectralField& phi,
                          int trunc_out = -1);

/// Vorticity transport operator: (sigma . grad) phi in d=2 (phi scalar),
/// (sigma . grad) phi - (phi . grad) sigma in d=3 (phi vector).
SpectralField lie_vorticity(const SpectralField& sigma, const SpectralField& phi,
                            int trunc_out = -1);

/// Which realization of the rough driver acts.
enum class DriverForm {
    VelocityLeray,    // P Lie~_{sigma_k} .
    Vorticity,        // Lie_{sigma_k} .
    VelocityGradient, // Q Lie~_{sigma_k} . (level 2 composes Q Lie~ P Lie~)
};

/// First-level driver action: sum_k Op_k phi Z^k_{st}, truncated to trunc_out.
SpectralField apply_first_level(const VectorFieldFamily& fam, const DriverIncrement& inc,
                                const SpectralField& phi, DriverForm form,
                                int trunc_out = -1);

/// Second-level driver action: sum_{k,l} Op_k Op_l phi ZZ^{l,k}_{st}, with
/// every intermediate truncated to trunc_out (the Galerkin convention, which
/// keeps Chen's relation exact at fixed truncation).
SpectralField apply_second_level(const VectorFieldFamily& fam, const DriverIncrement& inc,
                                 const SpectralField& phi, DriverForm form,
                                 int trunc_out = -1);

/// delta A2_{s,mid,t} phi - A1_{mid,t} A1_{s,mid} phi for the chosen form;
/// vanishes for the Leray and vorticity forms.
SpectralField chen_defect_field(const VectorFieldFamily& fam, const RoughPathLift& lift,
                                double s, double mid, double t, const SpectralField& phi,
                                DriverForm form, int trunc_out = -1);

/// delta AQ2_{s,mid,t} phi - AQ1_{mid,t} A1_{s,mid} phi: the compensated
/// Chen defect of the gradient-sector drivers; vanishes identically.
SpectralField quasi_chen_defect(const VectorFieldFamily& fam, const RoughPathLift& lift,
                                double s, double mid, double t, const SpectralField& phi,
                                int trunc_out = -1);

/// The two increments of the velocity-mean functional, m-th components
///   L1^m = (v^l, d_m sigma_k^l) Z^k_{st}
///   L2^m = (v^l, d_n sigma_j^l d_m sigma_k^n - sigma_j^n d_n d_m sigma_k^l) ZZ^{j,k}_{st}
/// using the unnormalized L2 inner product on the torus. v must be mean-free.
struct MeanIncrements {
    std::array<double, 3> first{0.0, 0.0, 0.0};
    std::array<double, 3> second{0.0, 0.0, 0.0};
};
MeanIncrements mean_increments(const VectorFieldFamily& fam, const DriverIncrement& inc,
                               const SpectralField& v);

/// Density of the first mean functional: m-th component (v^l, d_m sigma_k^l),
/// one entry per k. Used by the solver's mean ODE.
std::vector<std::array<double, 3>> mean_density(const VectorFieldFamily& fam,
                                                const SpectralField& v);

// ---- family file format -----------------------------------------------------
//
// Structured text: '#' comments, then
//   d <2|3>
//   K <count>
//   sigma <index 1..K>
//   mode <k1> <k2> [<k3>] <re> <im> <component 1..d>
// Missing conjugate modes are filled in; inconsistent ones are an error.
// The loader rejects families that are not divergence-free.

VectorFieldFamily read_family(std::istream& is);
VectorFieldFamily read_family_file(const std::string& path);
VectorFieldFamily parse_family(const std::string& text);
void write_family(const VectorFieldFamily& fam, std::ostream& os);
void write_family_file(const VectorFieldFamily& fam, const std::string& path);

} // namespace roughns
