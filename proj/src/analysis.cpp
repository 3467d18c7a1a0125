#include "roughns/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace roughns {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double measure_factor(int dim) {
    double m = 1.0;
    for (int i = 0; i < dim; ++i) m *= kTwoPi;
    return m;
}

// composite Simpson combination of equally spaced field samples f[i..j];
// odd interval counts finish with the three-eighths rule
SpectralField simpson_fields(const std::vector<SpectralField>& f, std::size_t i,
                             std::size_t j, double h) {
    SpectralField acc = f[i];
    acc *= 0.0;
    const std::size_t n = j - i;
    if (n == 0) return acc;
    if (n == 1) {
        acc.axpy(0.5 * h, f[i]);
        acc.axpy(0.5 * h, f[j]);
        return acc;
    }
    std::size_t even_end = j;
    if (n % 2 != 0) {
        even_end = j - 3;
        acc.axpy(3.0 * h / 8.0, f[even_end]);
        acc.axpy(9.0 * h / 8.0, f[even_end + 1]);
        acc.axpy(9.0 * h / 8.0, f[even_end + 2]);
        acc.axpy(3.0 * h / 8.0, f[j]);
    }
    for (std::size_t m = i; m + 2 <= even_end; m += 2) {
        acc.axpy(h / 3.0, f[m]);
        acc.axpy(4.0 * h / 3.0, f[m + 1]);
        acc.axpy(h / 3.0, f[m + 2]);
    }
    return acc;
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& f,
                 std::size_t upto) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 <= upto && i + 1 < t.size(); ++i)
        acc += 0.5 * (t[i + 1] - t[i]) * (f[i] + f[i + 1]);
    return acc;
}

} // namespace

// ---- RemainderStudy -----------------------------------------------------------

RemainderStudy::RemainderStudy(const Trajectory& traj, const VectorFieldFamily& fam,
                               const RoughPathLift& lift, int sobolev_order)
    : fam_(&fam), lift_(&lift), order_(sobolev_order), trunc_(traj.config.trunc) {
    if (traj.states.empty())
        throw std::invalid_argument("RemainderStudy: trajectory has no stored states");
    times_ = traj.times;
    if (times_.size() < 3) throw std::invalid_argument("RemainderStudy: too few samples");
    dt_ = times_[1] - times_[0];
    for (std::size_t i = 0; i + 1 < times_.size(); ++i)
        if (std::abs(times_[i + 1] - times_[i] - dt_) > 1e-9)
            throw std::invalid_argument("RemainderStudy: samples are not uniformly spaced");

    const double nu = traj.config.viscosity;
    const bool dealias = traj.config.dealias;
    u_.reserve(times_.size());
    drift_.reserve(times_.size());
    xi_.reserve(times_.size());
    xi_drift_.reserve(times_.size());
    for (std::size_t i = 0; i < times_.size(); ++i) {
        GalerkinState s = traj.state_at(i);
        SpectralField u = reconstruct_velocity(s);
        SpectralField du = laplacian(u);
        du *= nu;
        SpectralField conv = leray_project(retruncate(advect(u, u, dealias), trunc_));
        du -= conv;
        SpectralField dxi = laplacian(s.xi);
        dxi *= nu;
        if (s.xi.dim() == 2) {
            SpectralField trans = retruncate(advect(u, s.xi, dealias), trunc_);
            trans.remove_mean();
            dxi -= trans;
        } else {
            SpectralField trans = advect(u, s.xi, dealias);
            trans -= advect(s.xi, u, dealias);
            trans = retruncate(trans, trunc_);
            trans.remove_mean();
            dxi -= leray_project(trans);
        }
        u_.push_back(std::move(u));
        drift_.push_back(std::move(du));
        xi_.push_back(s.xi);
        xi_drift_.push_back(std::move(dxi));
    }
}

SpectralField RemainderStudy::drift_integral(std::size_t i, std::size_t j) const {
    return simpson_fields(drift_, i, j, dt_);
}

SpectralField RemainderStudy::vorticity_drift_integral(std::size_t i, std::size_t j) const {
    return simpson_fields(xi_drift_, i, j, dt_);
}

SpectralField RemainderStudy::velocity_remainder_field(std::size_t i, std::size_t j) const {
    if (j <= i || j >= times_.size())
        throw std::invalid_argument("RemainderStudy: bad interval");
    const auto inc = DriverIncrement::from_lift(*lift_, times_[i], times_[j]);
    SpectralField r = u_[j];
    r -= u_[i];
    r -= drift_integral(i, j);
    r -= apply_first_level(*fam_, inc, u_[i], DriverForm::VelocityLeray, trunc_);
    r -= apply_second_level(*fam_, inc, u_[i], DriverForm::VelocityLeray, trunc_);
    return r;
}

SpectralField RemainderStudy::vorticity_remainder_field(std::size_t i, std::size_t j) const {
    if (j <= i || j >= times_.size())
        throw std::invalid_argument("RemainderStudy: bad interval");
    const auto inc = DriverIncrement::from_lift(*lift_, times_[i], times_[j]);
    SpectralField r = xi_[j];
    r -= xi_[i];
    r -= vorticity_drift_integral(i, j);
    r -= apply_first_level(*fam_, inc, xi_[i], DriverForm::Vorticity, trunc_);
    r -= apply_second_level(*fam_, inc, xi_[i], DriverForm::Vorticity, trunc_);
    return r;
}

RemainderRecord RemainderStudy::record(std::size_t i, std::size_t j) const {
    RemainderRecord rec;
    rec.s = times_[i];
    rec.t = times_[j];
    rec.interval = rec.t - rec.s;
    const SpectralField r = velocity_remainder_field(i, j);
    rec.remainder_norm = sobolev_norm(r, order_);
    const auto z = lift_->increment(rec.s, rec.t);
    double zn = 0.0;
    for (double v : z) zn += v * v;
    rec.control = zn; // |Z_{st}|^2, a cheap control proxy recorded alongside
    return rec;
}

std::vector<RemainderStudy::LevelPoint> RemainderStudy::level_means(
    const std::vector<std::size_t>& strides) const {
    std::vector<LevelPoint> out;
    for (std::size_t stride : strides) {
        if (stride == 0 || stride >= times_.size()) continue;
        LevelPoint p;
        p.interval = static_cast<double>(stride) * dt_;
        double acc = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i + stride < times_.size(); i += stride) {
            acc += record(i, i + stride).remainder_norm;
            ++count;
        }
        if (count == 0) continue;
        p.mean_norm = acc / static_cast<double>(count);
        p.count = count;
        out.push_back(p);
    }
    return out;
}

double RemainderStudy::fit_slope(const std::vector<LevelPoint>& levels) {
    std::vector<double> x, y;
    for (const auto& l : levels) {
        x.push_back(l.interval);
        y.push_back(l.mean_norm);
    }
    return fit_loglog_slope(x, y);
}

// ---- pressure recovery ----------------------------------------------------------

PressureRecovery pressure_recovery(const Trajectory& traj, const VectorFieldFamily& fam,
                                   const RoughPathLift& lift, std::size_t stride,
                                   double tol) {
    if (traj.states.empty())
        throw std::invalid_argument("pressure_recovery: trajectory has no stored states");
    const std::size_t n = traj.times.size() - 1;
    if (stride == 0 || n % stride != 0 || (stride & (stride - 1)) != 0)
        throw std::invalid_argument(
            "pressure_recovery: stride must be a power of two dividing the sample count");
    const int trunc = traj.config.trunc;
    const double dt = traj.times[1] - traj.times[0];

    // velocities and gradient-sector nonlinearity at every sample
    std::vector<SpectralField> u, bq;
    u.reserve(n + 1);
    bq.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        GalerkinState s = traj.state_at(i);
        u.push_back(reconstruct_velocity(s));
        bq.push_back(q_project(retruncate(advect(u.back(), u.back(), traj.config.dealias),
                                          trunc)));
    }

    auto germ = [&](double s, double t) {
        const std::size_t i =
            static_cast<std::size_t>(std::llround((s - traj.times.front()) / dt));
        const auto inc = DriverIncrement::from_lift(lift, s, t);
        SpectralField h = apply_first_level(fam, inc, u[i], DriverForm::VelocityGradient,
                                            trunc);
        h += apply_second_level(fam, inc, u[i], DriverForm::VelocityGradient, trunc);
        return h;
    };

    PressureRecovery out;
    const int seg_levels = static_cast<int>(std::llround(std::log2(stride)));

    SpectralField rough_acc = SpectralField::vector(traj.config.dim, trunc);
    std::vector<SpectralField> rough_at; // sewing integral at output times
    rough_at.push_back(rough_acc);
    for (std::size_t m = 0; m + stride <= n; m += stride) {
        const auto report = sewing_integrate<FieldOps>(
            germ, traj.times[m], traj.times[m + stride], seg_levels, tol);
        if (!report.cauchy_differences.empty())
            out.max_cauchy_difference =
                std::max(out.max_cauchy_difference, report.cauchy_differences.back());
        if (!report.converged && seg_levels > 0) out.sewing_converged = false;
        rough_acc += report.value;
        rough_at.push_back(rough_acc);
    }

    for (std::size_t m = 0, idx = 0; m <= n; m += stride, ++idx) {
        SpectralField pi = simpson_fields(bq, 0, m, dt);
        pi *= -1.0;
        pi += rough_at[idx];
        out.times.push_back(traj.times[m]);
        const double pn = sobolev_norm(pi, 0);
        if (pn > 1e-14) {
            const double leray = sobolev_norm(leray_project(pi), 0) / pn;
            out.max_leray_residual = std::max(out.max_leray_residual, leray);
        }
        out.pressure.push_back(std::move(pi));
    }

    // additivity of the sewing limit over a split that the incremental
    // construction never used
    if (n >= 2 * stride) {
        const auto whole = sewing_integrate<FieldOps>(germ, traj.times.front(),
                                                      traj.times[2 * stride],
                                                      seg_levels + 1, tol);
        SpectralField split = rough_at[2];
        split -= whole.value;
        out.additivity_defect = sobolev_norm(split, 0);
    }
    return out;
}

// ---- balance diagnostics ---------------------------------------------------------

namespace {

double balance_residual(const Trajectory& traj, double viscosity) {
    const double e0 = traj.enstrophy.front();
    if (!(e0 > 0.0)) throw std::invalid_argument("balance residual: zero initial enstrophy");
    double worst = 0.0;
    const bool have_diss = traj.dissipation.size() == traj.times.size();
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        double d;
        if (have_diss) {
            d = traj.dissipation[i];
        } else {
            d = 2.0 * viscosity * trapezoid(traj.times, traj.palinstrophy, i);
        }
        worst = std::max(worst, std::abs(traj.enstrophy[i] + d - e0) / e0);
    }
    return worst;
}

} // namespace

double enstrophy_balance_residual(const Trajectory& traj, double viscosity) {
    if (traj.config.dim != 2)
        throw std::invalid_argument(
            "enstrophy_balance_residual: d=2 only (use stretching_budget_3d in d=3)");
    return balance_residual(traj, viscosity);
}

StretchingBudget stretching_budget_3d(const Trajectory& traj) {
    if (traj.config.dim != 3)
        throw std::invalid_argument("stretching_budget_3d: d=3 trajectory required");
    StretchingBudget out;
    out.residual = balance_residual(traj, traj.config.viscosity);
    out.enstrophy_initial = traj.enstrophy.front();
    out.enstrophy_final = traj.enstrophy.back();
    out.dissipation_total = traj.dissipation.empty() ? 0.0 : traj.dissipation.back();
    return out;
}

// ---- Wong-Zakai -------------------------------------------------------------------

WongZakaiStudy wong_zakai_study(const SamplePath& reference_path,
                                const std::vector<std::size_t>& strides,
                                const SpectralField& xi0, const std::array<double, 3>& mean0,
                                const SolverConfig& cfg, const VectorFieldFamily& fam) {
    if (strides.size() < 3)
        throw std::invalid_argument("wong_zakai_study: at least 3 meshes required");
    for (std::size_t s : strides)
        if (s < 2 || (s & (s - 1)) != 0)
            throw std::invalid_argument("wong_zakai_study: strides must be powers of two >= 2");

    SolverConfig run_cfg = cfg;
    run_cfg.store_states = true;
    const Trajectory ref = solve_vorticity(xi0, mean0, run_cfg, fam, reference_path);
    if (ref.blew_up) throw std::runtime_error("wong_zakai_study: reference run blew up");

    std::vector<SpectralField> ref_u;
    ref_u.reserve(ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i)
        ref_u.push_back(reconstruct_velocity(ref.state_at(i)));

    WongZakaiStudy out;
    out.reference_mesh = reference_path.times[1] - reference_path.times[0];

    for (std::size_t s : strides) {
        const SamplePath coarse = reference_path.subsample(s);
        const Trajectory traj = solve_vorticity(xi0, mean0, run_cfg, fam, coarse);
        if (traj.blew_up) throw std::runtime_error("wong_zakai_study: coarse run blew up");
        if (traj.size() != ref.size())
            throw std::runtime_error("wong_zakai_study: sample grids do not align");
        WongZakaiRow row;
        row.mesh = out.reference_mesh * static_cast<double>(s);
        std::vector<double> h1sq(traj.size(), 0.0);
        for (std::size_t i = 0; i < traj.size(); ++i) {
            if (std::abs(traj.times[i] - ref.times[i]) > 1e-9)
                throw std::runtime_error("wong_zakai_study: sample times do not align");
            SpectralField du = reconstruct_velocity(traj.state_at(i));
            du -= ref_u[i];
            row.c0_h0_distance = std::max(row.c0_h0_distance, sobolev_norm(du, 0));
            const double h1 = sobolev_norm(du, 1);
            h1sq[i] = h1 * h1;
        }
        row.l2_h1_distance = std::sqrt(trapezoid(traj.times, h1sq, traj.size() - 1));
        out.rows.push_back(row);
    }

    std::sort(out.rows.begin(), out.rows.end(),
              [](const WongZakaiRow& a, const WongZakaiRow& b) { return a.mesh > b.mesh; });
    out.monotone = true;
    for (std::size_t i = 0; i + 1 < out.rows.size(); ++i)
        if (out.rows[i + 1].c0_h0_distance > 1.10 * out.rows[i].c0_h0_distance)
            out.monotone = false;
    out.final_over_initial =
        out.rows.back().c0_h0_distance / std::max(out.rows.front().c0_h0_distance, 1e-300);
    return out;
}

// ---- stability ---------------------------------------------------------------------

namespace {

double sup_xi_distance(const Trajectory& a, const Trajectory& b) {
    if (a.size() != b.size()) throw std::runtime_error("stability: sample grids differ");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        SpectralField d = a.states[i];
        d -= b.states[i];
        worst = std::max(worst, sobolev_norm(d, 0));
    }
    return worst;
}

} // namespace

StabilityStudy driver_stability_study(const SamplePath& base_path,
                                      const std::vector<double>& epsilons,
                                      const SpectralField& xi0,
                                      const std::array<double, 3>& mean0,
                                      const SolverConfig& cfg, const VectorFieldFamily& fam) {
    SolverConfig run_cfg = cfg;
    run_cfg.store_states = true;
    const Trajectory base = solve_vorticity(xi0, mean0, run_cfg, fam, base_path);
    const RoughPathLift base_lift(base_path);

    StabilityStudy out;
    for (double eps : epsilons) {
        SamplePath scaled = base_path;
        for (auto& v : scaled.values) v *= 1.0 + eps;
        const Trajectory traj = solve_vorticity(xi0, mean0, run_cfg, fam, scaled);
        StabilityRow row;
        row.perturbation = eps;
        row.driver_distance = rough_path_distance(base_lift, RoughPathLift(scaled), 2.5);
        row.solution_distance = sup_xi_distance(traj, base);
        out.rows.push_back(row);
    }
    std::sort(out.rows.begin(), out.rows.end(),
              [](const StabilityRow& a, const StabilityRow& b) {
                  return a.perturbation > b.perturbation;
              });
    out.distances_decreasing = true;
    for (std::size_t i = 0; i + 1 < out.rows.size(); ++i) {
        if (out.rows[i + 1].solution_distance > out.rows[i].solution_distance)
            out.distances_decreasing = false;
        if (out.rows[i + 1].driver_distance > out.rows[i].driver_distance)
            out.distances_decreasing = false;
    }
    return out;
}

StabilityStudy initial_condition_stability_study(
    const SamplePath& path, const std::vector<double>& epsilons, const SpectralField& xi0,
    const std::array<double, 3>& mean0, const SolverConfig& cfg, const VectorFieldFamily& fam,
    std::uint64_t perturbation_seed) {
    SolverConfig run_cfg = cfg;
    run_cfg.store_states = true;
    const Trajectory base = solve_vorticity(xi0, mean0, run_cfg, fam, path);
    const double e0 = std::sqrt(base.enstrophy.front());

    SpectralField eta = random_band_vorticity(cfg.dim, cfg.trunc, cfg.trunc, 1.0,
                                              perturbation_seed);

    StabilityStudy out;
    for (double eps : epsilons) {
        SpectralField xi_pert = xi0;
        SpectralField scaled = eta;
        scaled *= eps;
        xi_pert += retruncate(scaled, xi0.trunc());
        const Trajectory traj = solve_vorticity(xi_pert, mean0, run_cfg, fam, path);
        StabilityRow row;
        row.perturbation = eps;
        row.solution_distance = sup_xi_distance(traj, base);
        out.rows.push_back(row);
    }

    // contraction-constant fit: smallest C with
    //   sup^2 <= C eps^2 exp(C e0^2) for every epsilon
    auto bound_holds = [&](double c) {
        for (const auto& row : out.rows) {
            const double rhs = c * row.perturbation * row.perturbation * std::exp(c * e0 * e0);
            if (row.solution_distance * row.solution_distance > rhs) return false;
        }
        return true;
    };
    double hi = 1.0;
    while (!bound_holds(hi) && hi < 1e12) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (bound_holds(mid))
            hi = mid;
        else
            lo = mid;
    }
    out.gronwall_constant = hi;

    double rmin = 1e300, rmax = 0.0;
    for (const auto& row : out.rows) {
        const double ratio = row.solution_distance / row.perturbation;
        rmin = std::min(rmin, ratio);
        rmax = std::max(rmax, ratio);
    }
    out.linearity_spread = rmin > 0.0 ? rmax / rmin : 1e300;
    out.distances_decreasing = true;
    return out;
}

double fit_mean_bound_constant(const Trajectory& traj, double p) {
    const int d = traj.config.dim;
    double sup_mean = 0.0, sup_v1 = 0.0;
    const double vol = measure_factor(d);
    for (std::size_t i = 0; i < traj.size(); ++i) {
        double m2 = 0.0;
        for (int c = 0; c < d; ++c)
            m2 += traj.means[i][static_cast<std::size_t>(c)] *
                  traj.means[i][static_cast<std::size_t>(c)];
        sup_mean = std::max(sup_mean, std::sqrt(m2));
        const double v1sq = traj.h1_velocity[i] * traj.h1_velocity[i] - vol * m2;
        sup_v1 = std::max(sup_v1, std::sqrt(std::max(0.0, v1sq)));
    }
    double m0 = 0.0;
    for (int c = 0; c < d; ++c)
        m0 += traj.means[0][static_cast<std::size_t>(c)] *
              traj.means[0][static_cast<std::size_t>(c)];
    m0 = std::sqrt(m0);

    auto bound = [&](double c) {
        return c * std::exp(c * std::pow(1.0 + sup_v1, p)) * (1.0 + m0);
    };
    double hi = 1.0;
    while (bound(hi) < sup_mean && hi < 1e12) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (bound(mid) >= sup_mean)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_loglog_slope: need at least two points");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw std::invalid_argument("fit_loglog_slope: nonpositive data");
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace roughns
