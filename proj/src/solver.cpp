#include "roughns/solver.hpp"

#include "roughns/fft.hpp"

#include <algorithm>
#include <cmath>
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
    return m;
}

// Reusable spectral <-> grid workspace bound to one grid size.
struct FftWork {
    int dim = 0;
    int g = 0;
    std::vector<std::size_t> shape;
    std::vector<std::complex<double>> buf;

    FftWork(int d, int gpts) : dim(d), g(gpts), shape(static_cast<std::size_t>(d), static_cast<std::size_t>(gpts)) {
        std::size_t total = 1;
        for (auto s : shape) total *= s;
        buf.resize(total);
    }

    std::size_t points() const { return buf.size(); }

    std::size_t bin_of(const int* k) const {
        std::size_t bin = 0;
        for (int a = 0; a < dim; ++a) {
            const int b = k[a] >= 0 ? k[a] : k[a] + g;
            bin = bin * static_cast<std::size_t>(g) + static_cast<std::size_t>(b);
        }
        return bin;
    }

    // component comp of f (optionally differentiated along axis) to grid values
    void to_grid(const SpectralField& f, int comp, int deriv_axis, std::vector<double>& out) {
        std::fill(buf.begin(), buf.end(), std::complex<double>{0.0, 0.0});
        int k[3];
        for (std::size_t m = 0; m < f.mode_count(); ++m) {
            std::complex<double> c = f.coef(comp, m);
            if (c.real() == 0.0 && c.imag() == 0.0) continue;
            f.wavevector(m, k);
            if (deriv_axis >= 0) c *= std::complex<double>{0.0, static_cast<double>(k[deriv_axis])};
            buf[bin_of(k)] = c;
        }
        fft_nd_inplace(buf.data(), shape, /*inverse=*/true);
        out.resize(points());
        const double scale = static_cast<double>(points());
        for (std::size_t i = 0; i < points(); ++i) out[i] = buf[i].real() * scale;
    }

    // grid values into component comp of f (band f.trunc())
    void from_grid(const std::vector<double>& vals, SpectralField& f, int comp) {
        for (std::size_t i = 0; i < points(); ++i) buf[i] = {vals[i], 0.0};
        fft_nd_inplace(buf.data(), shape, /*inverse=*/false);
        const double scale = 1.0 / static_cast<double>(points());
        int k[3];
        for (std::size_t m = 0; m < f.mode_count(); ++m) {
            f.wavevector(m, k);
            f.coef(comp, m) = buf[bin_of(k)] * scale;
        }
    }
};

// sparse evaluator of (v^l, d_m sigma_k^l) over the sigma band
struct MeanTable {
    struct Entry {
        std::size_t v_index; // index into the band-N field
        int l;
        std::complex<double> w; // conj(i k_m sigma^l_k)
    };
    // entries[k][m]
    std::vector<std::array<std::vector<Entry>, 3>> entries;

    MeanTable() = default;
    MeanTable(const VectorFieldFamily& fam, int trunc, int dim) {
        entries.resize(static_cast<std::size_t>(fam.size()));
        int k[3];
        for (int s = 0; s < fam.size(); ++s) {
            const SpectralField& sig = fam.sigma(s);
            for (int m = 0; m < dim; ++m) {
                auto& list = entries[static_cast<std::size_t>(s)][static_cast<std::size_t>(m)];
                for (int l = 0; l < dim; ++l)
                    for (std::size_t mm = 0; mm < sig.mode_count(); ++mm) {
                        const auto c = sig.coef(l, mm);
                        if (c.real() == 0.0 && c.imag() == 0.0) continue;
                        sig.wavevector(mm, k);
                        bool in_band = true;
                        for (int a = 0; a < dim; ++a) in_band = in_band && std::abs(k[a]) <= trunc;
                        if (!in_band) continue;
                        const std::complex<double> dm =
                            std::complex<double>{0.0, static_cast<double>(k[m])} * c;
                        if (dm.real() == 0.0 && dm.imag() == 0.0) continue;
                        const int span = 2 * trunc + 1;
                        std::size_t idx = 0;
                        for (int a = 0; a < dim; ++a)
                            idx = idx * static_cast<std::size_t>(span) +
                                  static_cast<std::size_t>(k[a] + trunc);
                        list.push_back({idx, l, std::conj(dm)});
                    }
            }
        }
    }

    // density_k^m = (2pi)^d Re sum v^l_kappa conj((d_m sigma_k)^l_kappa)
    void eval(const SpectralField& v, double factor, const std::vector<double>& zdot,
              std::array<double, 3>& out) const {
        out = {0.0, 0.0, 0.0};
        for (std::size_t s = 0; s < entries.size(); ++s) {
            if (zdot[s] == 0.0) continue;
            for (int m = 0; m < v.dim(); ++m) {
                double acc = 0.0;
                for (const auto& e : entries[s][static_cast<std::size_t>(m)])
                    acc += (v.coef(e.l, e.v_index) * e.w).real();
                out[static_cast<std::size_t>(m)] += factor * acc * zdot[s];
            }
        }
    }
};

// fills v with the Biot-Savart velocity of xi (both band N)
void biot_savart_into(const SpectralField& xi, SpectralField& v) {
    int k[3];
    if (xi.dim() == 2) {
        for (std::size_t m = 0; m < xi.mode_count(); ++m) {
            xi.wavevector(m, k);
            const double k2 = static_cast<double>(k[0]) * k[0] + static_cast<double>(k[1]) * k[1];
            if (k2 == 0.0) {
                v.coef(0, m) = v.coef(1, m) = {0.0, 0.0};
                continue;
            }
            const std::complex<double> w = xi.coef(0, m) / k2;
            v.coef(0, m) = std::complex<double>{0.0, static_cast<double>(k[1])} * w;
            v.coef(1, m) = std::complex<double>{0.0, -static_cast<double>(k[0])} * w;
        }
        return;
    }
    for (std::size_t m = 0; m < xi.mode_count(); ++m) {
        xi.wavevector(m, k);
        const double k2 = static_cast<double>(k[0]) * k[0] + static_cast<double>(k[1]) * k[1] +
                          static_cast<double>(k[2]) * k[2];
        if (k2 == 0.0) {
            v.coef(0, m) = v.coef(1, m) = v.coef(2, m) = {0.0, 0.0};
            continue;
        }
        const std::complex<double> i_over{0.0, 1.0 / k2};
        const auto x0 = xi.coef(0, m), x1 = xi.coef(1, m), x2 = xi.coef(2, m);
        v.coef(0, m) = i_over * (static_cast<double>(k[1]) * x2 - static_cast<double>(k[2]) * x1);
        v.coef(1, m) = i_over * (static_cast<double>(k[2]) * x0 - static_cast<double>(k[0]) * x2);
        v.coef(2, m) = i_over * (static_cast<double>(k[0]) * x1 - static_cast<double>(k[1]) * x0);
    }
}

double weighted_norm_sq(const SpectralField& f, int weight_power) {
    double acc = 0.0;
    int k[3];
    for (std::size_t m = 0; m < f.mode_count(); ++m) {
        f.wavevector(m, k);
        double k2 = 0.0;
        for (int a = 0; a < f.dim(); ++a) k2 += static_cast<double>(k[a]) * k[a];
        const double w = weight_power == 0 ? 1.0 : std::pow(k2, weight_power);
        for (int c = 0; c < f.comps(); ++c) acc += w * std::norm(f.coef(c, m));
    }
    return measure_factor(f.dim()) * acc;
}

class VorticityStepper {
public:
    VorticityStepper(const SolverConfig& cfg, const VectorFieldFamily& fam)
        : cfg_(cfg),
          fam_(&fam),
          dim_(cfg.dim),
          n_(cfg.trunc),
          work_(cfg.dim, grid_size(cfg, fam)),
          mean_table_(fam, cfg.trunc, cfg.dim) {
        const int kn = fam.size();
        sigma_grid_.resize(static_cast<std::size_t>(kn));
        for (int k = 0; k < kn; ++k) {
            sigma_grid_[static_cast<std::size_t>(k)].resize(static_cast<std::size_t>(dim_));
            for (int c = 0; c < dim_; ++c)
                work_.to_grid(fam.sigma(k), c, -1, sigma_grid_[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)]);
        }
        if (dim_ == 3) {
            dsigma_grid_.resize(static_cast<std::size_t>(kn));
            for (int k = 0; k < kn; ++k) {
                auto& per_k = dsigma_grid_[static_cast<std::size_t>(k)];
                per_k.resize(9);
                for (int j = 0; j < 3; ++j)
                    for (int c = 0; c < 3; ++c)
                        work_.to_grid(fam.sigma(k), c, j, per_k[static_cast<std::size_t>(3 * j + c)]);
            }
        }
        const std::size_t npts = work_.points();
        for (auto& b : grids_) b.resize(npts);
        xi_like_ = dim_ == 2 ? SpectralField::scalar(2, n_) : SpectralField::vector(3, n_);
        v_ = SpectralField::vector(dim_, n_);
        // mode |k|^2 table for the viscous factor
        k2_.resize(xi_like_.mode_count());
        int k[3];
        for (std::size_t m = 0; m < xi_like_.mode_count(); ++m) {
            xi_like_.wavevector(m, k);
            double k2 = 0.0;
            for (int a = 0; a < dim_; ++a) k2 += static_cast<double>(k[a]) * k[a];
            k2_[m] = k2;
        }
    }

    static int grid_size(const SolverConfig& cfg, const VectorFieldFamily& fam) {
        const int n = cfg.trunc;
        const int f = fam.max_frequency();
        if (!cfg.dealias) return static_cast<int>(next_pow2(static_cast<std::size_t>(2 * n + 2)));
        return static_cast<int>(next_pow2(static_cast<std::size_t>(std::max(n, f) + 2 * n + 1)));
    }

    // nonlinear right-hand side (everything except the viscous term)
    void rhs(const SpectralField& xi, const std::array<double, 3>& mean,
             const std::vector<double>& zdot, SpectralField& dxi,
             std::array<double, 3>& dmean) {
        biot_savart_into(xi, v_);
        // (v^l, d_m sigma^l)/(2pi)^d: the measure factor of the inner product
        // cancels against the mean-value normalization
        mean_table_.eval(v_, 1.0, zdot, dmean);

        const std::size_t npts = work_.points();
        // effective velocity grid: u - sum_k zdot^k sigma_k
        for (int c = 0; c < dim_; ++c) {
            work_.to_grid(v_, c, -1, grids_[static_cast<std::size_t>(c)]);
            auto& ueff = grids_[static_cast<std::size_t>(c)];
            const double mc = mean[static_cast<std::size_t>(c)];
            for (std::size_t i = 0; i < npts; ++i) ueff[i] += mc;
            for (int k = 0; k < fam_->size(); ++k) {
                const double w = zdot[static_cast<std::size_t>(k)];
                if (w == 0.0) continue;
                const auto& sg = sigma_grid_[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)];
                for (std::size_t i = 0; i < npts; ++i) ueff[i] -= w * sg[i];
            }
        }

        if (dim_ == 2) {
            // conv = u_eff . grad xi
            auto& conv = grids_[2];
            auto& dxi_grid = grids_[3];
            work_.to_grid(xi, 0, 0, dxi_grid);
            for (std::size_t i = 0; i < npts; ++i) conv[i] = grids_[0][i] * dxi_grid[i];
            work_.to_grid(xi, 0, 1, dxi_grid);
            for (std::size_t i = 0; i < npts; ++i) conv[i] += grids_[1][i] * dxi_grid[i];
            work_.from_grid(conv, dxi, 0);
            for (auto& c : dxi.data()) c = -c;
            dxi.set_mean_value(0, 0.0);
            return;
        }

        // d=3: conv^i = sum_j ueff^j d_j xi^i - xi^j d_j ueff^i
        //      with d_j ueff^i = d_j u^i - sum zdot d_j sigma^i
        auto& xi_grid_j = grids_[3];
        auto& scratch = grids_[4];
        for (int i = 0; i < 3; ++i) {
            auto& conv = grids_[5];
            std::fill(conv.begin(), conv.end(), 0.0);
            for (int j = 0; j < 3; ++j) {
                // ueff^j d_j xi^i
                work_.to_grid(xi, i, j, scratch);
                for (std::size_t p = 0; p < npts; ++p)
                    conv[p] += grids_[static_cast<std::size_t>(j)][p] * scratch[p];
                // - xi^j d_j ueff^i
                work_.to_grid(v_, i, j, scratch);
                for (int k = 0; k < fam_->size(); ++k) {
                    const double w = zdot[static_cast<std::size_t>(k)];
                    if (w == 0.0) continue;
                    const auto& ds = dsigma_grid_[static_cast<std::size_t>(k)][static_cast<std::size_t>(3 * j + i)];
                    for (std::size_t p = 0; p < npts; ++p) scratch[p] -= w * ds[p];
                }
                work_.to_grid(xi, j, -1, xi_grid_j);
                for (std::size_t p = 0; p < npts; ++p) conv[p] -= xi_grid_j[p] * scratch[p];
            }
            work_.from_grid(conv, xi_like_, i);
        }
        dxi = xi_like_;
        for (auto& c : dxi.data()) c = -c;
        dxi.remove_mean();
        dxi = leray_project(dxi);
    }

    // integrating-factor four-stage step over [s.t, s.t + h] at fixed zdot
    void step(GalerkinState& s, double h, const std::vector<double>& zdot) {
        prepare_factors(h);
        SpectralField k1 = s.xi, k2 = s.xi, k3 = s.xi, k4 = s.xi;
        std::array<double, 3> m1{}, m2{}, m3{}, m4{};

        rhs(s.xi, s.mean, zdot, k1, m1);

        SpectralField stage = s.xi;
        stage.axpy(0.5 * h, k1);
        apply_factor(stage, ehalf_);
        std::array<double, 3> mean_stage = advance_mean(s.mean, m1, 0.5 * h);
        rhs(stage, mean_stage, zdot, k2, m2);

        stage = s.xi;
        apply_factor(stage, ehalf_);
        stage.axpy(0.5 * h, k2);
        mean_stage = advance_mean(s.mean, m2, 0.5 * h);
        rhs(stage, mean_stage, zdot, k3, m3);

        stage = s.xi;
        apply_factor(stage, efull_);
        SpectralField k3f = k3;
        apply_factor(k3f, ehalf_);
        stage.axpy(h, k3f);
        mean_stage = advance_mean(s.mean, m3, h);
        rhs(stage, mean_stage, zdot, k4, m4);

        apply_factor(s.xi, efull_);
        apply_factor(k1, efull_);
        apply_factor(k2, ehalf_);
        apply_factor(k3, ehalf_);
        s.xi.axpy(h / 6.0, k1);
        s.xi.axpy(h / 3.0, k2);
        s.xi.axpy(h / 3.0, k3);
        s.xi.axpy(h / 6.0, k4);
        for (int c = 0; c < dim_; ++c)
            s.mean[static_cast<std::size_t>(c)] +=
                h / 6.0 * (m1[static_cast<std::size_t>(c)] + 2.0 * m2[static_cast<std::size_t>(c)] +
                           2.0 * m3[static_cast<std::size_t>(c)] + m4[static_cast<std::size_t>(c)]);
        s.t += h;

        // keep the state in the constraint set
        s.xi.remove_mean();
        if (dim_ == 3) s.xi = leray_project(s.xi);
    }

private:
    void prepare_factors(double h) {
        if (h == factor_h_) return;
        factor_h_ = h;
        efull_.resize(k2_.size());
        ehalf_.resize(k2_.size());
        for (std::size_t m = 0; m < k2_.size(); ++m) {
            efull_[m] = std::exp(-cfg_.viscosity * k2_[m] * h);
            ehalf_[m] = std::exp(-cfg_.viscosity * k2_[m] * 0.5 * h);
        }
    }

    void apply_factor(SpectralField& f, const std::vector<double>& factor) const {
        for (int c = 0; c < f.comps(); ++c)
            for (std::size_t m = 0; m < f.mode_count(); ++m) f.coef(c, m) *= factor[m];
    }

    static std::array<double, 3> advance_mean(const std::array<double, 3>& m,
                                              const std::array<double, 3>& dm, double h) {
        return {m[0] + h * dm[0], m[1] + h * dm[1], m[2] + h * dm[2]};
    }

    SolverConfig cfg_;
    const VectorFieldFamily* fam_;
    int dim_;
    int n_;
    FftWork work_;
    MeanTable mean_table_;
    std::vector<std::vector<std::vector<double>>> sigma_grid_;  // [k][comp]
    std::vector<std::vector<std::vector<double>>> dsigma_grid_; // [k][3*j+i] = d_j sigma^i
    std::array<std::vector<double>, 6> grids_;
    SpectralField xi_like_;
    SpectralField v_;
    std::vector<double> k2_;
    std::vector<double> efull_, ehalf_;
    double factor_h_ = -1.0;
};

// Composite Simpson over equally spaced nodes; odd interval counts finish
// with the three-eighths rule, a single interval falls back to trapezoid.
double simpson_nodes(const std::vector<double>& f, double h) {
    const std::size_t n = f.size() > 0 ? f.size() - 1 : 0;
    if (n == 0) return 0.0;
    if (n == 1) return 0.5 * h * (f[0] + f[1]);
    double acc = 0.0;
    std::size_t even_end = n;
    if (n % 2 != 0) {
        if (n < 3) return 0.5 * h * (f[0] + 2.0 * f[1] + f[2]); // unreachable, n>=3 here
        even_end = n - 3;
        acc += 3.0 * h / 8.0 *
               (f[even_end] + 3.0 * f[even_end + 1] + 3.0 * f[even_end + 2] + f[n]);
    }
    for (std::size_t i = 0; i + 2 <= even_end; i += 2)
        acc += h / 3.0 * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
    return acc;
}

void check_solver_inputs(const SpectralField& xi0, const SolverConfig& cfg,
                         const VectorFieldFamily& fam, const SamplePath& noise) {
    if (cfg.dim != 2 && cfg.dim != 3) throw std::invalid_argument("solver: dim must be 2 or 3");
    if (cfg.trunc < 1) throw std::invalid_argument("solver: truncation must be positive");
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("solver: dt must be positive");
    if (cfg.horizon < 0.0) throw std::invalid_argument("solver: negative horizon");
    if (xi0.dim() != cfg.dim) throw std::invalid_argument("solver: initial data dimension mismatch");
    if (fam.dim() != cfg.dim) throw std::invalid_argument("solver: family dimension mismatch");
    if (noise.k_dim != fam.size())
        throw std::invalid_argument("solver: noise dimension must match the family size");
    noise.validate();
    if (std::abs(noise.times.front()) > 1e-12)
        throw std::invalid_argument("solver: noise path must start at time zero");
    if (noise.horizon() + 1e-12 < cfg.horizon)
        throw std::invalid_argument("solver: noise path does not cover the horizon");
}

} // namespace

GalerkinState Trajectory::state_at(std::size_t i) const {
    if (i >= times.size()) throw std::out_of_range("Trajectory::state_at");
    if (states.empty()) throw std::runtime_error("Trajectory::state_at: states were not stored");
    GalerkinState s;
    s.t = times[i];
    s.xi = states[i];
    s.mean = means[i];
    return s;
}

std::size_t Trajectory::index_of(double t) const {
    for (std::size_t i = 0; i < times.size(); ++i)
        if (std::abs(times[i] - t) < 1e-9) return i;
    throw std::invalid_argument("Trajectory::index_of: time not stored");
}

void Trajectory::write_csv(std::ostream& os) const {
    const int d = config.dim;
    os << "t,enstrophy,palinstrophy,h1_velocity";
    for (int c = 0; c < d; ++c) os << ",mean_" << (c + 1);
    os << ",blowup_flag\n";
    os.precision(17);
    for (std::size_t i = 0; i < times.size(); ++i) {
        os << times[i] << "," << enstrophy[i] << "," << palinstrophy[i] << ","
           << h1_velocity[i];
        for (int c = 0; c < d; ++c) os << "," << means[i][static_cast<std::size_t>(c)];
        const bool last = i + 1 == times.size();
        os << "," << ((blew_up && last) ? 1 : 0) << "\n";
    }
}

void Trajectory::write_csv_file(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("Trajectory::write_csv_file: cannot open " + path);
    write_csv(os);
}

SpectralField reconstruct_velocity(const GalerkinState& s) {
    SpectralField u = SpectralField::vector(s.xi.dim(), s.xi.trunc());
    biot_savart_into(s.xi, u);
    for (int c = 0; c < u.dim(); ++c) u.set_mean_value(c, s.mean[static_cast<std::size_t>(c)]);
    return u;
}

SpectralField taylor_green_vorticity(int trunc) {
    SpectralField xi = SpectralField::scalar(2, trunc);
    for (int s1 : {-1, 1})
        for (int s2 : {-1, 1}) {
            int k[3] = {s1, s2, 0};
            xi.coef(0, xi.index(k)) = {0.5, 0.0};
        }
    return xi;
}

SpectralField random_band_vorticity(int dim, int trunc, int band, double l2_norm,
                                    std::uint64_t seed) {
    SpectralField xi = dim == 2 ? random_scalar(2, trunc, band, seed)
                                : random_divfree_vector(3, trunc, band, seed);
    const double n = sobolev_norm(xi, 0);
    if (n > 0.0) xi *= l2_norm / n;
    return xi;
}

SpectralField vorticity_rhs(const GalerkinState& s, const SolverConfig& cfg,
                            const VectorFieldFamily& fam, const std::vector<double>& zdot) {
    VorticityStepper stepper(cfg, fam);
    SpectralField dxi = s.xi;
    std::array<double, 3> dmean{};
    stepper.rhs(s.xi, s.mean, zdot, dxi, dmean);
    // stepper handles the transport and noise parts; add the viscous term
    SpectralField visc = laplacian(s.xi);
    dxi.axpy(1.0, visc *= cfg.viscosity);
    return dxi;
}

std::array<double, 3> mean_rhs(const GalerkinState& s, const VectorFieldFamily& fam,
                               const std::vector<double>& zdot) {
    SpectralField v = SpectralField::vector(s.xi.dim(), s.xi.trunc());
    biot_savart_into(s.xi, v);
    const auto density = mean_density(fam, v);
    std::array<double, 3> out{0.0, 0.0, 0.0};
    for (int k = 0; k < fam.size(); ++k)
        for (int m = 0; m < s.xi.dim(); ++m)
            out[static_cast<std::size_t>(m)] += density[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)] *
                                                zdot[static_cast<std::size_t>(k)] /
                                                measure_factor(s.xi.dim());
    return out;
}

Trajectory solve_vorticity(const SpectralField& xi0, const std::array<double, 3>& mean0,
                           const SolverConfig& cfg, const VectorFieldFamily& fam,
                           const SamplePath& noise) {
    check_solver_inputs(xi0, cfg, fam, noise);
    Trajectory traj;
    traj.config = cfg;

    GalerkinState s;
    s.t = 0.0;
    s.xi = xi0.trunc() == cfg.trunc ? xi0 : retruncate(xi0, cfg.trunc);
    if (!is_mean_free(s.xi, 1e-12 * (1.0 + s.xi.max_abs_coef()))) {
        traj.initial_mean_projected = true;
        s.xi.remove_mean();
    }
    if (cfg.dim == 3) s.xi = leray_project(s.xi);
    s.mean = mean0;

    VorticityStepper stepper(cfg, fam);
    const double xi0_norm = sobolev_norm(s.xi, 0);
    const double blowup_threshold = cfg.blowup_factor * std::max(1.0, xi0_norm);

    // dissipation integral 2 nu int |grad xi|^2: segment-aligned composite
    // Simpson on the per-substep palinstrophy samples, so the stored balance
    // residual carries the scheme's nominal fourth order
    double diss_base = 0.0;
    std::vector<double> seg_pal;
    double seg_h = 0.0;
    auto store = [&](const GalerkinState& state) {
        traj.times.push_back(state.t);
        if (cfg.store_states) traj.states.push_back(state.xi);
        traj.means.push_back(state.mean);
        const double e = sobolev_norm(state.xi, 0);
        traj.enstrophy.push_back(e * e);
        const double pal2 = weighted_norm_sq(state.xi, 1);
        traj.palinstrophy.push_back(pal2);
        const double v1 = sobolev_norm(reconstruct_velocity(state), 1);
        traj.h1_velocity.push_back(v1);
        traj.dissipation.push_back(
            diss_base + 2.0 * cfg.viscosity * simpson_nodes(seg_pal, seg_h));
    };
    store(s);

    if (cfg.horizon == 0.0) return traj;

    std::vector<double> zdot(static_cast<std::size_t>(fam.size()), 0.0);
    long step_counter = 0;
    for (std::size_t seg = 0; seg + 1 < noise.times.size(); ++seg) {
        const double a = noise.times[seg];
        if (a >= cfg.horizon - 1e-12) break;
        const double b = std::min(noise.times[seg + 1], cfg.horizon);
        const double seg_len = noise.times[seg + 1] - noise.times[seg];
        for (int j = 0; j < noise.k_dim; ++j)
            zdot[static_cast<std::size_t>(j)] =
                (noise.value(seg + 1, j) - noise.value(seg, j)) / seg_len;
        const double span = b - a;
        const int nsub = std::max(1, static_cast<int>(std::ceil(span / cfg.dt - 1e-9)));
        const double h = span / nsub;
        seg_pal.assign(1, weighted_norm_sq(s.xi, 1));
        seg_h = h;
        for (int i = 0; i < nsub; ++i) {
            stepper.step(s, h, zdot);
            seg_pal.push_back(weighted_norm_sq(s.xi, 1));
            ++step_counter;
            const double norm = sobolev_norm(s.xi, 0);
            if (!std::isfinite(norm) || norm > blowup_threshold) {
                traj.blew_up = true;
                traj.blowup_time = s.t;
                store(s);
                return traj;
            }
            if (step_counter % cfg.store_every == 0 ||
                (seg + 2 == noise.times.size() && i + 1 == nsub) ||
                std::abs(s.t - cfg.horizon) < 1e-12)
                store(s);
        }
        diss_base += 2.0 * cfg.viscosity * simpson_nodes(seg_pal, seg_h);
        seg_pal.clear();
        if (b >= cfg.horizon - 1e-12) break;
    }
    if (std::abs(traj.times.back() - s.t) > 1e-12) store(s);
    return traj;
}

VelocityTrajectory solve_velocity(const SpectralField& u0, const SolverConfig& cfg,
                                  const VectorFieldFamily& fam, const SamplePath& noise) {
    if (!u0.is_vector()) throw std::invalid_argument("solve_velocity: vector initial data");
    check_solver_inputs(u0, cfg, fam, noise);
    VelocityTrajectory traj;
    traj.config = cfg;

    const int n = cfg.trunc;
    SpectralField u = leray_project(u0.trunc() == n ? u0 : retruncate(u0, n));

    // viscous factor per mode
    SpectralField probe = SpectralField::vector(cfg.dim, n);
    std::vector<double> k2(probe.mode_count());
    {
        int k[3];
        for (std::size_t m = 0; m < probe.mode_count(); ++m) {
            probe.wavevector(m, k);
            double acc = 0.0;
            for (int a = 0; a < cfg.dim; ++a) acc += static_cast<double>(k[a]) * k[a];
            k2[m] = acc;
        }
    }
    auto apply_factor = [&](SpectralField& f, double h, double half) {
        for (int c = 0; c < f.comps(); ++c)
            for (std::size_t m = 0; m < f.mode_count(); ++m)
                f.coef(c, m) *= std::exp(-cfg.viscosity * k2[m] * h * half);
    };
    auto nonlinear = [&](const SpectralField& w, const std::vector<double>& zdot) {
        SpectralField r = leray_project(retruncate(advect(w, w, cfg.dealias), n));
        for (auto& c : r.data()) c = -c;
        for (int k = 0; k < fam.size(); ++k) {
            const double zd = zdot[static_cast<std::size_t>(k)];
            if (zd == 0.0) continue;
            SpectralField term = leray_project(retruncate(lie_oneform(fam.sigma(k), w), n));
            r.axpy(zd, term);
        }
        return r;
    };

    const double blowup_threshold =
        cfg.blowup_factor * std::max(1.0, sobolev_norm(curl(u), 0));
    double t = 0.0;
    long counter = 0;
    traj.times.push_back(0.0);
    traj.states.push_back(u);
    if (cfg.horizon == 0.0) return traj;

    std::vector<double> zdot(static_cast<std::size_t>(fam.size()), 0.0);
    for (std::size_t seg = 0; seg + 1 < noise.times.size(); ++seg) {
        const double a = noise.times[seg];
        if (a >= cfg.horizon - 1e-12) break;
        const double b = std::min(noise.times[seg + 1], cfg.horizon);
        const double seg_len = noise.times[seg + 1] - noise.times[seg];
        for (int j = 0; j < noise.k_dim; ++j)
            zdot[static_cast<std::size_t>(j)] =
                (noise.value(seg + 1, j) - noise.value(seg, j)) / seg_len;
        const int nsub = std::max(1, static_cast<int>(std::ceil((b - a) / cfg.dt - 1e-9)));
        const double h = (b - a) / nsub;
        for (int i = 0; i < nsub; ++i) {
            const SpectralField k1 = nonlinear(u, zdot);
            SpectralField stage = u;
            stage.axpy(0.5 * h, k1);
            apply_factor(stage, h, 0.5);
            const SpectralField k2f = nonlinear(stage, zdot);
            stage = u;
            apply_factor(stage, h, 0.5);
            stage.axpy(0.5 * h, k2f);
            const SpectralField k3f = nonlinear(stage, zdot);
            stage = u;
            apply_factor(stage, h, 1.0);
            SpectralField k3e = k3f;
            apply_factor(k3e, h, 0.5);
            stage.axpy(h, k3e);
            const SpectralField k4f = nonlinear(stage, zdot);

            apply_factor(u, h, 1.0);
            SpectralField k1e = k1;
            apply_factor(k1e, h, 1.0);
            SpectralField k2e = k2f;
            apply_factor(k2e, h, 0.5);
            SpectralField k3h = k3f;
            apply_factor(k3h, h, 0.5);
            u.axpy(h / 6.0, k1e);
            u.axpy(h / 3.0, k2e);
            u.axpy(h / 3.0, k3h);
            u.axpy(h / 6.0, k4f);
            u = leray_project(u);
            t += h;
            ++counter;
            const double norm = sobolev_norm(curl(u), 0);
            if (!std::isfinite(norm) || norm > blowup_threshold) {
                traj.blew_up = true;
                traj.blowup_time = t;
                traj.times.push_back(t);
                traj.states.push_back(u);
                return traj;
            }
            if (counter % cfg.store_every == 0 || std::abs(t - cfg.horizon) < 1e-12) {
                traj.times.push_back(t);
                traj.states.push_back(u);
            }
        }
        if (b >= cfg.horizon - 1e-12) break;
    }
    if (std::abs(traj.times.back() - t) > 1e-12) {
        traj.times.push_back(t);
        traj.states.push_back(u);
    }
    return traj;
}

} // namespace roughns
