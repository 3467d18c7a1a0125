#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace roughns {

/// Truncated Fourier representation of a real field on the flat torus
/// [0,2pi)^d, d in {2,3}. Modes k with |k_i| <= N for every axis are stored
/// densely (including the redundant conjugate half), one block per component.
/// Convention: f(x) = sum_k c_k e^{i k.x}; real fields satisfy the Hermitian
/// symmetry c_{-k} = conj(c_k).
class SpectralField {
public:
    SpectralField() = default;
    SpectralField(int dim, int trunc, int comps);

    static SpectralField scalar(int dim, int trunc) { return {dim, trunc, 1}; }
    static SpectralField vector(int dim, int trunc) { return {dim, trunc, dim}; }

    int dim() const { return dim_; }
    int trunc() const { return trunc_; }
    int comps() const { return comps_; }
    int modes_per_axis() const { return 2 * trunc_ + 1; }
    std::size_t mode_count() const { return mode_count_; }

    bool is_scalar() const { return comps_ == 1; }
    bool is_vector() const { return comps_ == dim_; }

    /// Flat index of wavevector k (each |k_i| <= N), lexicographic with k_1
    /// slowest.
    std::size_t index(const int* k) const;
    /// Decode flat index back into a wavevector.
    void wavevector(std::size_t idx, int* k) const;

    std::complex<double>& coef(int c, std::size_t idx) { return coef_[c * mode_count_ + idx]; }
    const std::complex<double>& coef(int c, std::size_t idx) const {
        return coef_[c * mode_count_ + idx];
    }
    std::complex<double>& at(int c, int k1, int k2, int k3 = 0);
    const std::complex<double>& at(int c, int k1, int k2, int k3 = 0) const;

    std::vector<std::complex<double>>& data() { return coef_; }
    const std::vector<std::complex<double>>& data() const { return coef_; }

    /// Mean value of component c (the k = 0 coefficient; real part).
    double mean_value(int c) const;
    void set_mean_value(int c, double v);

    /// Symmetrize coefficients so the field is exactly real-valued.
    void enforce_hermitian();
    /// Zero the k = 0 mode of every component.
    void remove_mean();

    double max_abs_coef() const;

    // In-place linear algebra on coefficients. Shapes must match.
    SpectralField& operator+=(const SpectralField& other);
    SpectralField& operator-=(const SpectralField& other);
    SpectralField& operator*=(double a);
    void axpy(double a, const SpectralField& x); // this += a*x

private:
    int dim_ = 0;
    int trunc_ = 0;
    int comps_ = 0;
    std::size_t mode_count_ = 0;
    std::vector<std::complex<double>> coef_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double a, SpectralField f);

/// Real samples on the uniform grid of [0,2pi)^d, `points` per axis
/// (row-major, x_1 slowest), one block per component.
struct PhysicalGrid {
    int dim = 0;
    int points = 0;
    int comps = 0;
    std::vector<double> values;

    PhysicalGrid() = default;
    PhysicalGrid(int d, int pts, int c)
        : dim(d), points(pts), comps(c), values(static_cast<std::size_t>(c) * point_count(d, pts)) {}

    static std::size_t point_count(int d, int pts);
    std::size_t point_count() const { return point_count(dim, points); }
    double& value(int c, std::size_t i) { return values[c * point_count() + i]; }
    double value(int c, std::size_t i) const { return values[c * point_count() + i]; }
};

/// Grid size used to evaluate quadratic products without aliasing error.
int dealias_grid_size(int n_left, int n_right, int n_out);

/// Spectral -> physical samples on `points` grid points per axis
/// (points must be a power of two with points >= 2N+2).
PhysicalGrid transform(const SpectralField& f, int points = 0);

/// Physical -> spectral, truncated to |k_i| <= trunc.
SpectralField inverse_transform(const PhysicalGrid& grid, int trunc);

// ---- differential operators (exact in coefficient space) -----------------

SpectralField derivative(const SpectralField& f, int axis);
SpectralField laplacian(const SpectralField& f);
/// (-Laplace)^{-1} on mean-free fields; the k=0 mode must vanish.
SpectralField inverse_neg_laplacian(const SpectralField& f);

/// Leray projection of a vector field onto divergence-free fields. k=0 mode
/// is left unchanged.
SpectralField leray_project(const SpectralField& u);
/// Q = I - P, projection onto gradient fields.
SpectralField q_project(const SpectralField& u);

/// Divergence of a vector field (scalar output).
SpectralField divergence(const SpectralField& u);

/// curl: d=2 vector -> scalar, d=3 vector -> vector.
SpectralField curl(const SpectralField& u);

/// Biot-Savart operator: inverse of the curl on mean-free fields.
/// d=2: scalar xi -> perp-gradient of the streamfunction; d=3: vector.
/// Output is divergence- and mean-free.
SpectralField biot_savart(const SpectralField& xi);

/// Gradient of a scalar field (vector output).
SpectralField gradient(const SpectralField& f);

// ---- norms and inner products ---------------------------------------------

/// Sobolev norm |f|_m = ((2pi)^d sum_k (1+|k|^2)^m sum_c |c_k|^2)^{1/2}
/// on the stored band.
double sobolev_norm(const SpectralField& f, int m);

/// L2 inner product (f,g) = int f.g dx over the common band.
double l2_inner(const SpectralField& f, const SpectralField& g);

double grid_l2_norm(const PhysicalGrid& g);

// ---- products --------------------------------------------------------------

/// Pointwise product of two fields evaluated on a zero-padded grid large
/// enough that no aliasing reaches the output band, truncated to
/// max(trunc_f, trunc_g). Componentwise if shapes allow: scalar*scalar,
/// scalar*vector, vector.vector (dot, scalar output).
SpectralField dealiased_product(const SpectralField& f, const SpectralField& g);

/// Advection (u . grad) f for vector u; f scalar or vector.
/// `dealias=false` evaluates on the unpadded 2N+2 grid instead.
SpectralField advect(const SpectralField& u, const SpectralField& f, bool dealias = true);

// ---- misc -------------------------------------------------------------------

/// Frequency cutoff smoothing: zero all modes with |k|^2 > floor(1/eta^2).
SpectralField smoothing_cutoff(const SpectralField& f, double eta);

/// Copy into a new truncation (embedding or sharp truncation).
SpectralField retruncate(const SpectralField& f, int trunc);

/// Coefficients of f(. + a): c_k -> c_k e^{i k.a}.
SpectralField phase_shift(const SpectralField& f, const std::array<double, 3>& a);

bool is_hermitian(const SpectralField& f, double tol = 1e-12);
/// Relative divergence-free defect max_k |k.c_k| / max_k |k||c_k|.
double divergence_defect(const SpectralField& u);
bool is_mean_free(const SpectralField& f, double tol = 1e-12);

/// Random real band-limited fields for tests and presets (deterministic in
/// the seed).
SpectralField random_scalar(int dim, int trunc, int band, std::uint64_t seed);
SpectralField random_vector(int dim, int trunc, int band, std::uint64_t seed);
SpectralField random_divfree_vector(int dim, int trunc, int band, std::uint64_t seed);

// ---- serialization ----------------------------------------------------------

/// Binary container: magic, header (d, N, c), then little-endian complex
/// doubles in lexicographic k order, component-major.
void write_field(const SpectralField& f, std::ostream& os);
SpectralField read_field(std::istream& is);
void write_field_file(const SpectralField& f, const std::string& path);
SpectralField read_field_file(const std::string& path);

/// CSV debug dump: header k1,...,kd,component,re,im.
void write_field_csv(const SpectralField& f, std::ostream& os);

} // namespace roughns
