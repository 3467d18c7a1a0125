#include "roughns/spectral.hpp"

#include "roughns/fft.hpp"
#include "roughns/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace roughns {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double measure_factor(int dim) {
    double m = 1.0;
    for (int i = 0; i < dim; ++i) m *= kTwoPi;
    return m; // (2pi)^d, total mass of the unnormalized Lebesgue measure
}

void check_same_shape(const SpectralField& a, const SpectralField& b, const char* what) {
    if (a.dim() != b.dim() || a.trunc() != b.trunc() || a.comps() != b.comps())
        throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

std::size_t ipow(std::size_t base, int e) {
    std::size_t r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

} // namespace

SpectralField::SpectralField(int dim, int trunc, int comps)
    : dim_(dim), trunc_(trunc), comps_(comps) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("SpectralField: dim must be 2 or 3");
    if (trunc < 0) throw std::invalid_argument("SpectralField: negative truncation");
    if (comps != 1 && comps != dim)
        throw std::invalid_argument("SpectralField: comps must be 1 or dim");
    mode_count_ = ipow(static_cast<std::size_t>(2 * trunc + 1), dim);
    coef_.assign(static_cast<std::size_t>(comps) * mode_count_, {0.0, 0.0});
}

std::size_t SpectralField::index(const int* k) const {
    const int n = modes_per_axis();
    std::size_t idx = 0;
    for (int a = 0; a < dim_; ++a) idx = idx * n + static_cast<std::size_t>(k[a] + trunc_);
    return idx;
}

void SpectralField::wavevector(std::size_t idx, int* k) const {
    const int n = modes_per_axis();
    for (int a = dim_ - 1; a >= 0; --a) {
        k[a] = static_cast<int>(idx % n) - trunc_;
        idx /= n;
    }
}

std::complex<double>& SpectralField::at(int c, int k1, int k2, int k3) {
    int k[3] = {k1, k2, k3};
    return coef(c, index(k));
}

const std::complex<double>& SpectralField::at(int c, int k1, int k2, int k3) const {
    int k[3] = {k1, k2, k3};
    return coef(c, index(k));
}

double SpectralField::mean_value(int c) const {
    int k[3] = {0, 0, 0};
    return coef(c, index(k)).real();
}

void SpectralField::set_mean_value(int c, double v) {
    int k[3] = {0, 0, 0};
    coef(c, index(k)) = {v, 0.0};
}

void SpectralField::enforce_hermitian() {
    int k[3], nk[3];
    for (int c = 0; c < comps_; ++c) {
        for (std::size_t m = 0; m < mode_count_; ++m) {
            wavevector(m, k);
            for (int a = 0; a < dim_; ++a) nk[a] = -k[a];
            const std::size_t mm = index(nk);
            if (mm < m) continue;
            const std::complex<double> avg =
                0.5 * (coef(c, m) + std::conj(coef(c, mm)));
            coef(c, m) = avg;
            coef(c, mm) = std::conj(avg);
        }
    }
}

void SpectralField::remove_mean() {
    for (int c = 0; c < comps_; ++c) set_mean_value(c, 0.0);
}

double SpectralField::max_abs_coef() const {
    double m = 0.0;
    for (const auto& z : coef_) m = std::max(m, std::abs(z));
    return m;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
    check_same_shape(*this, other, "operator+=");
    for (std::size_t i = 0; i < coef_.size(); ++i) coef_[i] += other.coef_[i];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
    check_same_shape(*this, other, "operator-=");
    for (std::size_t i = 0; i < coef_.size(); ++i) coef_[i] -= other.coef_[i];
    return *this;
}

SpectralField& SpectralField::operator*=(double a) {
    for (auto& z : coef_) z *= a;
    return *this;
}

void SpectralField::axpy(double a, const SpectralField& x) {
    check_same_shape(*this, x, "axpy");
    for (std::size_t i = 0; i < coef_.size(); ++i) coef_[i] += a * x.coef_[i];
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double a, SpectralField f) { return f *= a; }

std::size_t PhysicalGrid::point_count(int d, int pts) {
    return ipow(static_cast<std::size_t>(pts), d);
}

int dealias_grid_size(int n_left, int n_right, int n_out) {
    return static_cast<int>(next_pow2(static_cast<std::size_t>(n_left + n_right + n_out + 1)));
}

// ---- transforms -------------------------------------------------------------

PhysicalGrid transform(const SpectralField& f, int points) {
    const int n = f.trunc();
    int g = points;
    if (g == 0) g = static_cast<int>(next_pow2(static_cast<std::size_t>(2 * n + 2)));
    if (!is_pow2(static_cast<std::size_t>(g)))
        throw std::invalid_argument("transform: grid size must be a power of two");
    if (g < 2 * n + 2) throw std::invalid_argument("transform: grid too small for truncation");

    PhysicalGrid out(f.dim(), g, f.comps());
    const std::size_t gcount = out.point_count();
    std::vector<std::size_t> shape(static_cast<std::size_t>(f.dim()), static_cast<std::size_t>(g));
    std::vector<std::complex<double>> buf(gcount);

    int k[3];
    for (int c = 0; c < f.comps(); ++c) {
        std::fill(buf.begin(), buf.end(), std::complex<double>{0.0, 0.0});
        for (std::size_t m = 0; m < f.mode_count(); ++m) {
            f.wavevector(m, k);
            std::size_t bin = 0;
            for (int a = 0; a < f.dim(); ++a) {
                const int b = k[a] >= 0 ? k[a] : k[a] + g;
                bin = bin * static_cast<std::size_t>(g) + static_cast<std::size_t>(b);
            }
            buf[bin] = f.coef(c, m);
        }
        fft_nd_inplace(buf.data(), shape, /*inverse=*/true);
        const double scale = static_cast<double>(gcount);
        for (std::size_t i = 0; i < gcount; ++i) out.value(c, i) = buf[i].real() * scale;
    }
    return out;
}

SpectralField inverse_transform(const PhysicalGrid& grid, int trunc) {
    const int g = grid.points;
    if (!is_pow2(static_cast<std::size_t>(g)))
        throw std::invalid_argument("inverse_transform: grid size must be a power of two");
    if (g < 2 * trunc + 2)
        throw std::invalid_argument("inverse_transform: truncation too large for grid");

    SpectralField out(grid.dim, trunc, grid.comps);
    const std::size_t gcount = grid.point_count();
    std::vector<std::size_t> shape(static_cast<std::size_t>(grid.dim),
                                   static_cast<std::size_t>(g));
    std::vector<std::complex<double>> buf(gcount);

    int k[3];
    for (int c = 0; c < grid.comps; ++c) {
        for (std::size_t i = 0; i < gcount; ++i) buf[i] = {grid.value(c, i), 0.0};
        fft_nd_inplace(buf.data(), shape, /*inverse=*/false);
        const double scale = 1.0 / static_cast<double>(gcount);
        for (std::size_t m = 0; m < out.mode_count(); ++m) {
            out.wavevector(m, k);
            std::size_t bin = 0;
            for (int a = 0; a < grid.dim; ++a) {
                const int b = k[a] >= 0 ? k[a] : k[a] + g;
                bin = bin * static_cast<std::size_t>(g) + static_cast<std::size_t>(b);
            }
            out.coef(c, m) = buf[bin] * scale;
        }
    }
    return out;
}

// ---- differential operators -------------------------------------------------

SpectralField derivative(const SpectralField& f, int axis) {
    if (axis < 0 || axis >= f.dim()) throw std::invalid_argument("derivative: bad axis");
    SpectralField out = f;
    int k[3];
    for (std::size_t m = 0; m < f.mode_count(); ++m) {
        f.wavevector(m, k);
        const std::complex<double> ik{0.0, static_cast<double>(k[axis])};
        for (int c = 0; c < f.comps(); ++c) out.coef(c, m) = ik * f.coef(c, m);
    }
    return out;
}

SpectralField laplacian(const SpectralField& f) {
    SpectralField out = f;
    int k[3];
    for (std::size_t m = 0; m < f.mode_count(); ++m) {
        f.wavevector(m, k);
        double k2 = 0.0;
        for (int a = 0; a < f.dim(); ++a) k2 += static_cast<double>(k[a]) * k[a];
        for (int c = 0; c < f.comps(); ++c) out.coef(c, m) = -k2 * f.coef(c, m);
    }
    return out;
}

SpectralField inverse_neg_laplacian(const SpectralField& f) {
    if (!is_mean_free(f, 1e-10 * (1.0 + f.max_abs_coef())))
        throw std::invalid_argument("inverse_neg_laplacian: field must be mean-free");
    SpectralField out = f;
    int k[3];
    for (std::size_t m = 0; m < f.mode_count(); ++m) {
        f.wavevector(m, k);
        double k2 = 0.0;
        for (int a = 0; a < f.dim(); ++a) k2 += static_cast<double>(k[a]) * k[a];
        for (int c = 0; c < f.comps(); ++c)
            out.coef(c, m) = k2 > 0.0 ? f.coef(c, m) / k2 : std::complex<double>{0.0, 0.0};
    }
    return out;
}

SpectralField leray_project(const SpectralField& u) {
    if (!u.is_vector()) throw std::invalid_argument("leray_project: vector field required");
    SpectralField out = u;
    int k[3];
    for (std::size_t m = 0; m < u.mode_count(); ++m) {
        u.wavevector(m, k);
        double k2 = 0.0;
        for (int a = 0; a < u.dim(); ++a) k2 += static_cast<double>(k[a]) * k[a];
        if (k2 == 0.0) continue;
        std::complex<double> kdot{0.0, 0.0};
        for (int a = 0; a < u.dim(); ++a) kdot += static_cast<double>(k[a]) * u.coef(a, m);
        for (int a = 0; a < u.dim(); ++a)
            out.coef(a, m) = u.coef(a, m) - static_cast<double>(k[a]) * kdot / k2;
    }
    return out;
}

SpectralField q_project(const SpectralField& u) {
    SpectralField p = leray_project(u);
    SpectralField out = u;
    out -= p;
    // k=0 belongs to the Leray sector (constants are divergence-free)
    for (int c = 0; c < out.comps(); ++c) out.set_mean_value(c, 0.0);
    return out;
}

SpectralField divergence(const SpectralField& u) {
    if (!u.is_vector()) throw std::invalid_argument("divergence: vector field required");
    SpectralField out = SpectralField::scalar(u.dim(), u.trunc());
    int k[3];
    for (std::size_t m = 0; m < u.mode_count(); ++m) {
        u.wavevector(m, k);
        std::complex<double> s{0.0, 0.0};
        for (int a = 0; a < u.dim(); ++a)
            s += std::complex<double>{0.0, static_cast<double>(k[a])} * u.coef(a, m);
        out.coef(0, m) = s;
    }
    return out;
}

SpectralField curl(const SpectralField& u) {
    if (!u.is_vector()) throw std::invalid_argument("curl: vector field required");
    int k[3];
    if (u.dim() == 2) {
        SpectralField out = SpectralField::scalar(2, u.trunc());
        for (std::size_t m = 0; m < u.mode_count(); ++m) {
            u.wavevector(m, k);
            const std::complex<double> ik1{0.0, static_cast<double>(k[0])};
            const std::complex<double> ik2{0.0, static_cast<double>(k[1])};
            out.coef(0, m) = ik1 * u.coef(1, m) - ik2 * u.coef(0, m);
        }
        return out;
    }
    SpectralField out = SpectralField::vector(3, u.trunc());
    for (std::size_t m = 0; m < u.mode_count(); ++m) {
        u.wavevector(m, k);
        const std::complex<double> i1{0.0, static_cast<double>(k[0])};
        const std::complex<double> i2{0.0, static_cast<double>(k[1])};
        const std::complex<double> i3{0.0, static_cast<double>(k[2])};
        out.coef(0, m) = i2 * u.coef(2, m) - i3 * u.coef(1, m);
        out.coef(1, m) = i3 * u.coef(0, m) - i1 * u.coef(2, m);
        out.coef(2, m) = i1 * u.coef(1, m) - i2 * u.coef(0, m);
    }
    return out;
}

SpectralField biot_savart(const SpectralField& xi) {
    const double scale = 1.0 + xi.max_abs_coef();
    if (!is_mean_free(xi, 1e-10 * scale))
        throw std::invalid_argument("biot_savart: input must be mean-free");
    int k[3];
    if (xi.dim() == 2) {
        if (!xi.is_scalar()) throw std::invalid_argument("biot_savart: scalar required in d=2");
        SpectralField out = SpectralField::vector(2, xi.trunc());
        for (std::size_t m = 0; m < xi.mode_count(); ++m) {
            xi.wavevector(m, k);
            const double k2 = static_cast<double>(k[0]) * k[0] + static_cast<double>(k[1]) * k[1];
            if (k2 == 0.0) continue;
            const std::complex<double> w = xi.coef(0, m) / k2;
            out.coef(0, m) = std::complex<double>{0.0, static_cast<double>(k[1])} * w;
            out.coef(1, m) = std::complex<double>{0.0, -static_cast<double>(k[0])} * w;
        }
        return out;
    }
    if (!xi.is_vector()) throw std::invalid_argument("biot_savart: vector required in d=3");
    SpectralField out = SpectralField::vector(3, xi.trunc());
    for (std::size_t m = 0; m < xi.mode_count(); ++m) {
        xi.wavevector(m, k);
        const double k2 = static_cast<double>(k[0]) * k[0] +
                          static_cast<double>(k[1]) * k[1] +
                          static_cast<double>(k[2]) * k[2];
        if (k2 == 0.0) continue;
        // i k x xi_k / |k|^2
        const std::complex<double> x0 = xi.coef(0, m), x1 = xi.coef(1, m), x2 = xi.coef(2, m);
        const double a = k[0], b = k[1], c = k[2];
        out.coef(0, m) = std::complex<double>{0.0, 1.0} * (b * x2 - c * x1) / k2;
        out.coef(1, m) = std::complex<double>{0.0, 1.0} * (c * x0 - a * x2) / k2;
        out.coef(2, m) = std::complex<double>{0.0, 1.0} * (a * x1 - b * x0) / k2;
    }
    return out;
}

SpectralField gradient(const SpectralField& f) {
    if (!f.is_scalar()) throw std::invalid_argument("gradient: scalar field required");
    SpectralField out = SpectralField::vector(f.dim(), f.trunc());
    int k[3];
    for (std::size_t m = 0; m < f.mode_count(); ++m) {
        f.wavevector(m, k);
        for (int a = 0; a < f.dim(); ++a)
            out.coef(a, m) =
                std::complex<double>{0.0, static_cast<double>(k[a])} * f.coef(0, m);
    }
    return out;
}

// ---- norms -------------------------------------------------------------------

double sobolev_norm(const SpectralField& f, int m) {
    double acc = 0.0;
    int k[3];
    for (std::size_t i = 0; i < f.mode_count(); ++i) {
        f.wavevector(i, k);
        double k2 = 0.0;
        for (int a = 0; a < f.dim(); ++a) k2 += static_cast<double>(k[a]) * k[a];
        const double w = std::pow(1.0 + k2, m);
        for (int c = 0; c < f.comps(); ++c) acc += w * std::norm(f.coef(c, i));
    }
    return std::sqrt(measure_factor(f.dim()) * acc);
}

double l2_inner(const SpectralField& f, const SpectralField& g) {
    if (f.dim() != g.dim() || f.comps() != g.comps())
        throw std::invalid_argument("l2_inner: incompatible fields");
    // off-band products are orthogonal, so both sides can be cut to the
    // common band first
    const int n = std::min(f.trunc(), g.trunc());
    SpectralField fa = f.trunc() == n ? f : retruncate(f, n);
    SpectralField gb = g.trunc() == n ? g : retruncate(g, n);
    double acc = 0.0;
    for (int c = 0; c < fa.comps(); ++c)
        for (std::size_t m = 0; m < fa.mode_count(); ++m)
            acc += (fa.coef(c, m) * std::conj(gb.coef(c, m))).real();
    return measure_factor(f.dim()) * acc;
}

double grid_l2_norm(const PhysicalGrid& g) {
    double acc = 0.0;
    for (double v : g.values) acc += v * v;
    return std::sqrt(measure_factor(g.dim) * acc / static_cast<double>(g.point_count()));
}

// ---- products ----------------------------------------------------------------

SpectralField dealiased_product(const SpectralField& f, const SpectralField& g) {
    if (f.dim() != g.dim()) throw std::invalid_argument("dealiased_product: dim mismatch");
    const int nout = std::max(f.trunc(), g.trunc());
    const int gpts = dealias_grid_size(f.trunc(), g.trunc(), nout);
    PhysicalGrid fg = transform(f, gpts);
    PhysicalGrid gg = transform(g, gpts);
    const std::size_t npts = fg.point_count();

    if (f.is_scalar() && g.is_scalar()) {
        PhysicalGrid prod(f.dim(), gpts, 1);
        for (std::size_t i = 0; i < npts; ++i)
            prod.value(0, i) = fg.value(0, i) * gg.value(0, i);
        return inverse_transform(prod, nout);
    }
    if (f.is_scalar() != g.is_scalar()) {
        const PhysicalGrid& s = f.is_scalar() ? fg : gg;
        const PhysicalGrid& v = f.is_scalar() ? gg : fg;
        PhysicalGrid prod(f.dim(), gpts, v.comps);
        for (int c = 0; c < v.comps; ++c)
            for (std::size_t i = 0; i < npts; ++i)
                prod.value(c, i) = s.value(0, i) * v.value(c, i);
        return inverse_transform(prod, nout);
    }
    // vector . vector
    PhysicalGrid prod(f.dim(), gpts, 1);
    for (std::size_t i = 0; i < npts; ++i) {
        double s = 0.0;
        for (int c = 0; c < f.comps(); ++c) s += fg.value(c, i) * gg.value(c, i);
        prod.value(0, i) = s;
    }
    return inverse_transform(prod, nout);
}

SpectralField advect(const SpectralField& u, const SpectralField& f, bool dealias) {
    if (!u.is_vector()) throw std::invalid_argument("advect: u must be a vector field");
    if (u.dim() != f.dim()) throw std::invalid_argument("advect: dim mismatch");
    const int nout = std::max(u.trunc(), f.trunc());
    const int gpts = dealias
                         ? dealias_grid_size(u.trunc(), f.trunc(), nout)
                         : static_cast<int>(next_pow2(static_cast<std::size_t>(2 * nout + 2)));
    PhysicalGrid ug = transform(u, gpts);
    const std::size_t npts = ug.point_count();
    PhysicalGrid prod(f.dim(), gpts, f.comps());
    for (int c = 0; c < f.comps(); ++c) {
        SpectralField fc = SpectralField::scalar(f.dim(), f.trunc());
        for (std::size_t m = 0; m < f.mode_count(); ++m) fc.coef(0, m) = f.coef(c, m);
        for (int a = 0; a < f.dim(); ++a) {
            PhysicalGrid dg = transform(derivative(fc, a), gpts);
            for (std::size_t i = 0; i < npts; ++i)
                prod.value(c, i) += ug.value(a, i) * dg.value(0, i);
        }
    }
    return inverse_transform(prod, nout);
}

// ---- misc ----------------------------------------------------------------------

SpectralField smoothing_cutoff(const SpectralField& f, double eta) {
    if (!(eta > 0.0) || eta > 1.0)
        throw std::invalid_argument("smoothing_cutoff: eta must lie in (0,1]");
    // closed ball: modes with |k|^2 <= floor(1/eta^2) survive
    const double thr = std::floor(1.0 / (eta * eta) + 1e-9);
    SpectralField out = f;
    int k[3];
    for (std::size_t m = 0; m < f.mode_count(); ++m) {
        f.wavevector(m, k);
        double k2 = 0.0;
        for (int a = 0; a < f.dim(); ++a) k2 += static_cast<double>(k[a]) * k[a];
        if (k2 > thr)
            for (int c = 0; c < f.comps(); ++c) out.coef(c, m) = {0.0, 0.0};
    }
    return out;
}

SpectralField retruncate(const SpectralField& f, int trunc) {
    SpectralField out(f.dim(), trunc, f.comps());
    const int n = std::min(trunc, f.trunc());
    int k[3] = {0, 0, 0};
    // iterate over the common band
    const int span = 2 * n + 1;
    const std::size_t count = ipow(static_cast<std::size_t>(span), f.dim());
    for (std::size_t m = 0; m < count; ++m) {
        std::size_t rem = m;
        for (int a = f.dim() - 1; a >= 0; --a) {
            k[a] = static_cast<int>(rem % span) - n;
            rem /= span;
        }
        const std::size_t si = f.index(k);
        const std::size_t di = out.index(k);
        for (int c = 0; c < f.comps(); ++c) out.coef(c, di) = f.coef(c, si);
    }
    return out;
}

SpectralField phase_shift(const SpectralField& f, const std::array<double, 3>& a) {
    SpectralField out = f;
    int k[3];
    for (std::size_t m = 0; m < f.mode_count(); ++m) {
        f.wavevector(m, k);
        double phase = 0.0;
        for (int ax = 0; ax < f.dim(); ++ax) phase += static_cast<double>(k[ax]) * a[ax];
        const std::complex<double> rot{std::cos(phase), std::sin(phase)};
        for (int c = 0; c < f.comps(); ++c) out.coef(c, m) = rot * f.coef(c, m);
    }
    return out;
}

bool is_hermitian(const SpectralField& f, double tol) {
    int k[3], nk[3];
    for (int c = 0; c < f.comps(); ++c)
        for (std::size_t m = 0; m < f.mode_count(); ++m) {
            f.wavevector(m, k);
            for (int a = 0; a < f.dim(); ++a) nk[a] = -k[a];
            if (std::abs(f.coef(c, m) - std::conj(f.coef(c, f.index(nk)))) > tol) return false;
        }
    return true;
}

double divergence_defect(const SpectralField& u) {
    if (!u.is_vector()) throw std::invalid_argument("divergence_defect: vector field required");
    double worst = 0.0;
    double scale = 0.0;
    int k[3];
    for (std::size_t m = 0; m < u.mode_count(); ++m) {
        u.wavevector(m, k);
        std::complex<double> s{0.0, 0.0};
        double knorm = 0.0, unorm = 0.0;
        for (int a = 0; a < u.dim(); ++a) {
            s += static_cast<double>(k[a]) * u.coef(a, m);
            knorm += static_cast<double>(k[a]) * k[a];
            unorm += std::norm(u.coef(a, m));
        }
        worst = std::max(worst, std::abs(s));
        scale = std::max(scale, std::sqrt(knorm * unorm));
    }
    return scale > 0.0 ? worst / scale : 0.0;
}

bool is_mean_free(const SpectralField& f, double tol) {
    for (int c = 0; c < f.comps(); ++c) {
        int k0[3] = {0, 0, 0};
        if (std::abs(f.coef(c, f.index(k0))) > tol) return false;
    }
    return true;
}

SpectralField random_scalar(int dim, int trunc, int band, std::uint64_t seed) {
    SpectralField f = SpectralField::scalar(dim, trunc);
    GaussianRng rng(seed);
    int k[3];
    const int b = std::min(band, trunc);
    for (std::size_t m = 0; m < f.mode_count(); ++m) {
        f.wavevector(m, k);
        bool in_band = true;
        for (int a = 0; a < dim; ++a) in_band = in_band && std::abs(k[a]) <= b;
        if (!in_band) continue;
        f.coef(0, m) = {rng.normal(), rng.normal()};
    }
    f.enforce_hermitian();
    f.remove_mean();
    return f;
}

SpectralField random_vector(int dim, int trunc, int band, std::uint64_t seed) {
    SpectralField f = SpectralField::vector(dim, trunc);
    GaussianRng rng(seed);
    int k[3];
    const int b = std::min(band, trunc);
    for (int c = 0; c < dim; ++c)
        for (std::size_t m = 0; m < f.mode_count(); ++m) {
            f.wavevector(m, k);
            bool in_band = true;
            for (int a = 0; a < dim; ++a) in_band = in_band && std::abs(k[a]) <= b;
            if (!in_band) continue;
            f.coef(c, m) = {rng.normal(), rng.normal()};
        }
    f.enforce_hermitian();
    f.remove_mean();
    return f;
}

SpectralField random_divfree_vector(int dim, int trunc, int band, std::uint64_t seed) {
    SpectralField f = leray_project(random_vector(dim, trunc, band, seed));
    f.remove_mean();
    return f;
}

// ---- serialization ----------------------------------------------------------

namespace {
constexpr std::uint32_t kFieldMagic = 0x524e5346; // "RNSF"
constexpr std::uint32_t kFieldVersion = 1;

template <typename T>
void write_pod(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("read_field: truncated stream");
    return v;
}
} // namespace

void write_field(const SpectralField& f, std::ostream& os) {
    write_pod(os, kFieldMagic);
    write_pod(os, kFieldVersion);
    write_pod<std::int32_t>(os, f.dim());
    write_pod<std::int32_t>(os, f.trunc());
    write_pod<std::int32_t>(os, f.comps());
    for (int c = 0; c < f.comps(); ++c)
        for (std::size_t m = 0; m < f.mode_count(); ++m) {
            write_pod(os, f.coef(c, m).real());
            write_pod(os, f.coef(c, m).imag());
        }
}

SpectralField read_field(std::istream& is) {
    if (read_pod<std::uint32_t>(is) != kFieldMagic)
        throw std::runtime_error("read_field: bad magic");
    if (read_pod<std::uint32_t>(is) != kFieldVersion)
        throw std::runtime_error("read_field: unsupported version");
    const int d = read_pod<std::int32_t>(is);
    const int n = read_pod<std::int32_t>(is);
    const int c = read_pod<std::int32_t>(is);
    SpectralField f(d, n, c);
    for (int cc = 0; cc < c; ++cc)
        for (std::size_t m = 0; m < f.mode_count(); ++m) {
            const double re = read_pod<double>(is);
            const double im = read_pod<double>(is);
            f.coef(cc, m) = {re, im};
        }
    return f;
}

void write_field_file(const SpectralField& f, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_field_file: cannot open " + path);
    write_field(f, os);
}

SpectralField read_field_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_field_file: cannot open " + path);
    return read_field(is);
}

void write_field_csv(const SpectralField& f, std::ostream& os) {
    for (int a = 0; a < f.dim(); ++a) os << "k" << (a + 1) << ",";
    os << "component,re,im\n";
    os.precision(17);
    int k[3];
    for (int c = 0; c < f.comps(); ++c)
        for (std::size_t m = 0; m < f.mode_count(); ++m) {
            f.wavevector(m, k);
            for (int a = 0; a < f.dim(); ++a) os << k[a] << ",";
            os << c << "," << f.coef(c, m).real() << "," << f.coef(c, m).imag() << "\n";
        }
}

} // namespace roughns
