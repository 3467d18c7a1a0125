#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "roughns/solver.hpp"

#include <cmath>
#include <numbers>

using namespace roughns;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

SpectralField mode_field(int dim, int trunc, int comp, int comps, int k1, int k2, int k3,
                         std::complex<double> amp) {
    SpectralField f(dim, trunc, comps);
    int k[3] = {k1, k2, k3};
    int nk[3] = {-k1, -k2, -k3};
    f.coef(comp, f.index(k)) = amp;
    f.coef(comp, f.index(nk)) += std::conj(amp);
    return f;
}

VectorFieldFamily zero_family(int dim) {
    return VectorFieldFamily({SpectralField::vector(dim, 1)});
}

VectorFieldFamily constant_family_2d(double c1, double c2) {
    SpectralField s = SpectralField::vector(2, 1);
    s.set_mean_value(0, c1);
    s.set_mean_value(1, c2);
    return VectorFieldFamily({s});
}

VectorFieldFamily shear_family_2d() {
    SpectralField s1 = mode_field(2, 2, 0, 2, 0, 1, 0, {0.0, -0.5}); // (sin x2, 0)
    SpectralField s2 = mode_field(2, 2, 1, 2, 1, 0, 0, {0.5, 0.0});  // (0, cos x1)
    return VectorFieldFamily({s1, s2});
}

VectorFieldFamily shear_family_3d() {
    // (sin x2, 0, cos x1): divergence-free
    SpectralField s = mode_field(3, 2, 0, 3, 0, 1, 0, {0.0, -0.5});
    SpectralField c = mode_field(3, 2, 2, 3, 1, 0, 0, {0.5, 0.0});
    s += c;
    return VectorFieldFamily({s});
}

double rel_l2(const SpectralField& a, const SpectralField& b) {
    SpectralField d = a;
    d -= retruncate(b, a.trunc());
    const double den = std::max(sobolev_norm(a, 0), sobolev_norm(b, 0));
    return den > 0 ? sobolev_norm(d, 0) / den : 0.0;
}

} // namespace

TEST_CASE("vorticity rhs vanishes on the zero state") {
    SolverConfig cfg;
    cfg.dim = 2;
    cfg.trunc = 8;
    cfg.viscosity = 0.3;
    GalerkinState s;
    s.xi = SpectralField::scalar(2, 8);
    auto fam = zero_family(2);
    const auto r = vorticity_rhs(s, cfg, fam, {0.0});
    CHECK(sobolev_norm(r, 0) == 0.0);
}

TEST_CASE("Taylor-Green: the nonlinearity cancels exactly") {
    SolverConfig cfg;
    cfg.dim = 2;
    cfg.trunc = 8;
    cfg.viscosity = 0.01;
    GalerkinState s;
    s.xi = taylor_green_vorticity(8);
    auto fam = zero_family(2);
    const auto r = vorticity_rhs(s, cfg, fam, {0.0});
    SpectralField expected = s.xi;
    expected *= -2.0 * cfg.viscosity;
    CHECK(rel_l2(r, expected) < 1e-13);
}

TEST_CASE("noise transport enters with the printed sign") {
    // sigma = (1,0), zdot = 1, nu = 0, xi = sin x1: advection vanishes and
    // the right-hand side is (sigma . grad) xi = cos x1
    SolverConfig cfg;
    cfg.dim = 2;
    cfg.trunc = 8;
    cfg.viscosity = 0.0;
    GalerkinState s;
    s.xi = mode_field(2, 8, 0, 1, 1, 0, 0, {0.0, -0.5});
    auto fam = constant_family_2d(1.0, 0.0);
    const auto r = vorticity_rhs(s, cfg, fam, {1.0});
    const auto expected = mode_field(2, 8, 0, 1, 1, 0, 0, {0.5, 0.0});
    CHECK(rel_l2(r, expected) < 1e-13);
}

TEST_CASE("mean equation right-hand side") {
    auto cfam = constant_family_2d(1.0, 2.0);
    GalerkinState s;
    s.xi = random_band_vorticity(2, 6, 3, 1.0, 5);
    auto r = mean_rhs(s, cfam, {1.0});
    CHECK(std::abs(r[0]) < 1e-14);
    CHECK(std::abs(r[1]) < 1e-14);

    s.xi = SpectralField::scalar(2, 6);
    auto fam = shear_family_2d();
    r = mean_rhs(s, fam, {1.0, -0.5});
    CHECK(std::abs(r[0]) == 0.0);
    CHECK(std::abs(r[1]) == 0.0);

    // single-mode oracle: xi = sin x2 has stream function sin x2, so
    // v = (d_2 psi, -d_1 psi) = (cos x2, 0); with sigma_1 = (sin x2, 0):
    //   m=1: (v^1, d_1 sigma_1^1) = int cos x2 d_1 sin x2 dx = 0
    //   m=2: (v^1, d_2 sigma_1^1) = int cos^2 x2 dx = (2pi)^2/2,
    // and the mean value moves at that rate divided by (2pi)^2.
    s.xi = mode_field(2, 6, 0, 1, 0, 1, 0, {0.0, -0.5}); // sin x2
    r = mean_rhs(s, fam, {1.0, 0.0});
    CHECK(std::abs(r[0]) < 1e-14);
    CHECK(r[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("zero data stays zero and trivial horizon returns a single state") {
    SolverConfig cfg;
    cfg.dim = 2;
    cfg.trunc = 4;
    cfg.viscosity = 0.0;
    cfg.horizon = 0.5;
    cfg.dt = 1.0 / 64;
    auto fam = zero_family(2);
    const auto noise = sample_zero(0.125, 1, 0.5);
    const auto traj =
        solve_vorticity(SpectralField::scalar(2, 4), {0.0, 0.0, 0.0}, cfg, fam, noise);
    CHECK(traj.enstrophy.back() == 0.0);
    CHECK_FALSE(traj.blew_up);

    SolverConfig cfg0 = cfg;
    cfg0.horizon = 0.0;
    const auto single = solve_vorticity(SpectralField::scalar(2, 4), {0.0, 0.0, 0.0}, cfg0,
                                        fam, sample_zero(0.125, 1, 0.5));
    CHECK(single.size() == 1);
}

TEST_CASE("Taylor-Green decays at the exact viscous rate") {
    SolverConfig cfg;
    cfg.dim = 2;
    cfg.trunc = 16;
    cfg.viscosity = 0.01;
    cfg.horizon = 0.25;
    cfg.dt = 1e-3;
    cfg.store_every = 50;
    cfg.store_states = false;
    auto fam = zero_family(2);
    const auto noise = sample_zero(0.25, 1, 0.25);
    const auto xi0 = taylor_green_vorticity(16);
    const double e0 = sobolev_norm(xi0, 0);
    const auto traj = solve_vorticity(xi0, {0.0, 0.0, 0.0}, cfg, fam, noise);
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double expected = e0 * e0 * std::exp(-4.0 * cfg.viscosity * traj.times[i]);
        worst = std::max(worst, std::abs(traj.enstrophy[i] - expected) / expected);
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("solver is deterministic") {
    SolverConfig cfg;
    cfg.dim = 2;
    cfg.trunc = 8;
    cfg.viscosity = 0.01;
    cfg.horizon = 0.25;
    cfg.dt = 1.0 / 128;
    auto fam = shear_family_2d();
    const auto noise = sample_brownian(11, 1.0 / 64, 2, 0.25);
    const auto xi0 = random_band_vorticity(2, 8, 4, 1.0, 3);
    const auto a = solve_vorticity(xi0, {0.1, -0.2, 0.0}, cfg, fam, noise);
    const auto b = solve_vorticity(xi0, {0.1, -0.2, 0.0}, cfg, fam, noise);
    REQUIRE(a.size() == b.size());
    CHECK(a.states.back().data() == b.states.back().data());
    CHECK(a.means.back() == b.means.back());
}

TEST_CASE("discrete enstrophy balance with transport noise in 2d") {
    SolverConfig cfg;
    cfg.dim = 2;
    cfg.trunc = 8;
    cfg.viscosity = 0.01;
    cfg.horizon = 0.5;
    cfg.dt = 1.0 / 1024;
    cfg.store_every = 64;
    cfg.store_states = false;
    auto fam = shear_family_2d();
    const auto noise = sample_brownian(21, 1.0 / 64, 2, 0.5);
    const auto xi0 = random_band_vorticity(2, 8, 4, 1.0, 9);
    const auto traj = solve_vorticity(xi0, {0.0, 0.0, 0.0}, cfg, fam, noise);
    const double e0 = traj.enstrophy.front();
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i)
        worst = std::max(worst,
                         std::abs(traj.enstrophy[i] + traj.dissipation[i] - e0) / e0);
    CHECK(worst <= 1e-7);

    // mean-free throughout
    CHECK(std::abs(traj.enstrophy.back()) > 0.0);
}

TEST_CASE("restart composition reproduces the full trajectory") {
    SolverConfig cfg;
    cfg.dim = 2;
    cfg.trunc = 8;
    cfg.viscosity = 0.02;
    cfg.horizon = 0.5;
    cfg.dt = 1.0 / 64;
    auto fam = shear_family_2d();
    const auto noise = sample_brownian(31, 1.0 / 32, 2, 0.5);
    const auto xi0 = random_band_vorticity(2, 8, 4, 1.0, 17);
    const auto whole = solve_vorticity(xi0, {0.05, 0.0, 0.0}, cfg, fam, noise);

    SolverConfig half = cfg;
    half.horizon = 0.25;
    const auto first = solve_vorticity(xi0, {0.05, 0.0, 0.0}, half, fam, noise);
    const auto s_mid = first.state_at(first.index_of(0.25));
    const auto tail_noise = noise.restart_at(0.25);
    const auto second = solve_vorticity(s_mid.xi, s_mid.mean, half, fam, tail_noise);

    const auto end_whole = whole.state_at(whole.index_of(0.5));
    const auto end_comp = second.state_at(second.index_of(0.25));
    CHECK(rel_l2(end_comp.xi, end_whole.xi) <= 1e-10);
    CHECK(std::abs(end_comp.mean[0] - end_whole.mean[0]) <= 1e-10);
    CHECK(std::abs(end_comp.mean[1] - end_whole.mean[1]) <= 1e-10);
}

TEST_CASE("moving frame: constant sigma shifts the deterministic flow") {
    SolverConfig cfg;
    cfg.dim = 2;
    cfg.trunc = 8;
    cfg.viscosity = 0.02;
    cfg.horizon = 0.25;
    cfg.dt = 1.0 / 256;
    cfg.store_every = 16;
    const double c1 = 1.0, c2 = 0.5;
    auto fam = constant_family_2d(c1, c2);
    const auto noise = sample_brownian(41, 1.0 / 64, 1, 0.25);
    const auto xi0 = taylor_green_vorticity(8);

    const auto rough = solve_vorticity(xi0, {0.0, 0.0, 0.0}, cfg, fam, noise);
    auto zfam = zero_family(2);
    const auto det =
        solve_vorticity(xi0, {0.0, 0.0, 0.0}, cfg, zfam, sample_zero(0.25, 1, 0.25));

    double worst = 0.0;
    for (std::size_t i = 0; i < rough.size(); ++i) {
        const double t = rough.times[i];
        const double z = noise.eval(t)[0];
        const auto expected =
            phase_shift(det.states[det.index_of(t)], {c1 * z, c2 * z, 0.0});
        worst = std::max(worst, rel_l2(rough.states[i], expected));
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("velocity and vorticity forms produce the same flow") {
    SolverConfig cfg;
    cfg.dim = 2;
    cfg.trunc = 8;
    cfg.viscosity = 0.015;
    cfg.horizon = 0.25;
    cfg.dt = 1.0 / 128;
    cfg.store_every = 8;
    auto fam = shear_family_2d();
    const auto noise = sample_smooth(3, 1.0 / 64, 2, 0.25);
    const auto xi0 = random_band_vorticity(2, 8, 4, 1.0, 23);
    const std::array<double, 3> mean0{0.08, -0.03, 0.0};

    const auto vort = solve_vorticity(xi0, mean0, cfg, fam, noise);
    GalerkinState init;
    init.xi = xi0;
    init.mean = mean0;
    const auto u0 = reconstruct_velocity(init);
    const auto vel = solve_velocity(u0, cfg, fam, noise);

    REQUIRE(vort.size() == vel.times.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < vort.size(); ++i) {
        const auto u_from_vort = reconstruct_velocity(vort.state_at(i));
        worst = std::max(worst, rel_l2(u_from_vort, vel.states[i]));
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("3d local solve: completes, stays divergence-free, stretches enstrophy") {
    SolverConfig cfg;
    cfg.dim = 3;
    cfg.trunc = 6;
    cfg.viscosity = 0.1;
    cfg.horizon = 0.25;
    cfg.dt = 1.0 / 128;
    cfg.store_every = 8;
    auto fam = shear_family_3d();
    const auto noise = sample_brownian(51, 1.0 / 64, 1, 0.25);
    const auto xi0 = random_band_vorticity(3, 6, 2, 1.0, 29);
    const auto traj = solve_vorticity(xi0, {0.0, 0.0, 0.0}, cfg, fam, noise);
    CHECK_FALSE(traj.blew_up);
    CHECK(divergence_defect(traj.states.back()) < 1e-11);
    for (int c = 0; c < 3; ++c) CHECK(std::abs(traj.states.back().mean_value(c)) < 1e-13);

    // enstrophy is not balanced: the stretching term is active
    const double e0 = traj.enstrophy.front();
    const double residual =
        std::abs(traj.enstrophy.back() + traj.dissipation.back() - e0) / e0;
    CHECK(residual > 1e-3);
}

TEST_CASE("blow-up guard raises the flag and keeps the last state") {
    SolverConfig cfg;
    cfg.dim = 2;
    cfg.trunc = 8;
    cfg.viscosity = 0.0;
    cfg.horizon = 0.5;
    cfg.dt = 1.0 / 64;
    cfg.blowup_factor = 1e-9; // force the guard immediately
    auto fam = shear_family_2d();
    const auto noise = sample_brownian(61, 1.0 / 32, 2, 0.5);
    const auto xi0 = random_band_vorticity(2, 8, 4, 1.0, 31);
    const auto traj = solve_vorticity(xi0, {0.0, 0.0, 0.0}, cfg, fam, noise);
    CHECK(traj.blew_up);
    CHECK(traj.blowup_time > 0.0);
    CHECK(traj.size() >= 2);
    CHECK(std::isfinite(traj.enstrophy.back()));
}

TEST_CASE("velocity reconstruction round trip") {
    GalerkinState s;
    s.xi = SpectralField::scalar(2, 6);
    s.mean = {0.7, -0.4, 0.0};
    const auto u_const = reconstruct_velocity(s);
    CHECK(u_const.mean_value(0) == doctest::Approx(0.7));
    CHECK(u_const.mean_value(1) == doctest::Approx(-0.4));
    CHECK(sobolev_norm(curl(u_const), 0) < 1e-14);

    s.xi = random_band_vorticity(2, 6, 4, 2.0, 37);
    const auto u = reconstruct_velocity(s);
    CHECK(rel_l2(curl(u), s.xi) < 1e-13);
    CHECK(divergence_defect(u) < 1e-12);

    // initial data that is not mean-free is projected with a warning
    SolverConfig cfg;
    cfg.dim = 2;
    cfg.trunc = 6;
    cfg.horizon = 0.0;
    auto fam = zero_family(2);
    SpectralField bad = s.xi;
    bad.set_mean_value(0, 1.0);
    const auto traj =
        solve_vorticity(bad, {0.0, 0.0, 0.0}, cfg, fam, sample_zero(1.0, 1, 1.0));
    CHECK(traj.initial_mean_projected);
}

TEST_CASE("trajectory csv has the documented header") {
    SolverConfig cfg;
    cfg.dim = 2;
    cfg.trunc = 4;
    cfg.horizon = 0.125;
    cfg.dt = 1.0 / 32;
    auto fam = zero_family(2);
    const auto traj = solve_vorticity(taylor_green_vorticity(4), {0.0, 0.0, 0.0}, cfg, fam,
                                      sample_zero(0.125, 1, 0.125));
    std::stringstream ss;
    traj.write_csv(ss);
    std::string head;
    std::getline(ss, head);
    CHECK(head == "t,enstrophy,palinstrophy,h1_velocity,mean_1,mean_2,blowup_flag");
}
