#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "roughns/spectral.hpp"

#include <cmath>
#include <numbers>

using namespace roughns;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

SpectralField make_cos(int dim, int trunc, int axis, double amp = 1.0) {
    SpectralField f = SpectralField::scalar(dim, trunc);
    int kp[3] = {0, 0, 0}, km[3] = {0, 0, 0};
    kp[axis] = 1;
    km[axis] = -1;
    f.coef(0, f.index(kp)) = {0.5 * amp, 0.0};
    f.coef(0, f.index(km)) = {0.5 * amp, 0.0};
    return f;
}

SpectralField make_sin(int dim, int trunc, int axis, double amp = 1.0) {
    SpectralField f = SpectralField::scalar(dim, trunc);
    int kp[3] = {0, 0, 0}, km[3] = {0, 0, 0};
    kp[axis] = 1;
    km[axis] = -1;
    f.coef(0, f.index(kp)) = {0.0, -0.5 * amp};
    f.coef(0, f.index(km)) = {0.0, 0.5 * amp};
    return f;
}

SpectralField assemble_vector(const SpectralField& c0, const SpectralField& c1) {
    SpectralField u = SpectralField::vector(c0.dim(), c0.trunc());
    for (std::size_t m = 0; m < u.mode_count(); ++m) {
        u.coef(0, m) = c0.coef(0, m);
        u.coef(1, m) = c1.coef(0, m);
    }
    return u;
}

double b_form(const SpectralField& u, const SpectralField& v, const SpectralField& w) {
    return l2_inner(advect(u, v), w);
}

double rel_diff(const SpectralField& a, const SpectralField& b) {
    SpectralField d = a;
    d -= b;
    const double den = sobolev_norm(a, 0) + sobolev_norm(b, 0);
    return den > 0 ? sobolev_norm(d, 0) / den : 0.0;
}

} // namespace

TEST_CASE("constant mode transforms to a constant grid") {
    SpectralField f = SpectralField::scalar(2, 4);
    f.set_mean_value(0, 2.5);
    const auto g = transform(f);
    for (double v : g.values) CHECK(v == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("cos(x1) has coefficients one half at k = +-e1") {
    PhysicalGrid g(2, 16, 1);
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j)
            g.value(0, static_cast<std::size_t>(i) * 16 + j) = std::cos(kTwoPi * i / 16.0);
    const auto f = inverse_transform(g, 4);
    CHECK(f.at(0, 1, 0).real() == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(f.at(0, -1, 0).real() == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(std::abs(f.at(0, 1, 0).imag()) < 1e-13);
    CHECK(std::abs(f.at(0, 0, 0)) < 1e-13);
    CHECK(std::abs(f.at(0, 2, 0)) < 1e-13);
}

TEST_CASE("transform round-trip is the identity") {
    for (int dim : {2, 3}) {
        const auto f = random_scalar(dim, 5, 5, 99);
        const auto back = inverse_transform(transform(f), 5);
        CHECK(rel_diff(f, back) < 1e-13);

        const auto v = random_vector(dim, 4, 4, 7);
        const auto vb = inverse_transform(transform(v), 4);
        SpectralField d = v;
        d -= vb;
        CHECK(sobolev_norm(d, 0) < 1e-12 * (1.0 + sobolev_norm(v, 0)));
    }
}

TEST_CASE("Parseval: grid L2 norm equals coefficient norm") {
    const auto f = random_scalar(2, 6, 6, 123);
    const auto g = transform(f);
    CHECK(grid_l2_norm(g) == doctest::Approx(sobolev_norm(f, 0)).epsilon(1e-12));
}

TEST_CASE("Leray projection annihilates gradients and fixes divergence-free fields") {
    // grad(sin x1 sin x2)
    const auto s1 = make_sin(2, 4, 0);
    const auto s2 = make_sin(2, 4, 1);
    const auto phi = dealiased_product(s1, s2);
    const auto grad_phi = gradient(phi);
    const auto p = leray_project(grad_phi);
    CHECK(p.max_abs_coef() < 1e-14);

    const auto w = random_divfree_vector(2, 6, 6, 5);
    CHECK(rel_diff(leray_project(w), w) < 1e-14);

    // u = (sin x2, sin x1) is divergence-free
    const auto u = assemble_vector(make_sin(2, 4, 1), make_sin(2, 4, 0));
    CHECK(rel_diff(leray_project(u), u) < 1e-14);
    CHECK(q_project(u).max_abs_coef() < 1e-14);
    CHECK(divergence_defect(u) < 1e-14);

    CHECK_THROWS_AS(leray_project(make_sin(2, 4, 0)), std::invalid_argument);
}

TEST_CASE("projector algebra: P^2 = P, Q^2 = Q, PQ = 0, P + Q = I") {
    for (int dim : {2, 3}) {
        const auto u = random_vector(dim, 4, 4, 17);
        const auto pu = leray_project(u);
        const auto qu = q_project(u);
        CHECK(rel_diff(leray_project(pu), pu) < 1e-13);
        CHECK(rel_diff(q_project(qu), qu) < 1e-13);
        CHECK(q_project(pu).max_abs_coef() < 1e-13 * (1.0 + u.max_abs_coef()));
        SpectralField sum = pu;
        sum += qu;
        // mean mode sits in the Leray sector
        CHECK(rel_diff(sum, u) < 1e-13);
    }
}

TEST_CASE("Biot-Savart in 2d: cos x1 -> (0, sin x1)") {
    const auto xi = make_cos(2, 4, 0);
    const auto v = biot_savart(xi);
    const auto expected = assemble_vector(SpectralField::scalar(2, 4), make_sin(2, 4, 0));
    CHECK(rel_diff(v, expected) < 1e-14);
    CHECK(divergence_defect(v) < 1e-14);

    SpectralField bad = xi;
    bad.set_mean_value(0, 1.0);
    CHECK_THROWS_AS(biot_savart(bad), std::invalid_argument);
}

TEST_CASE("curl inverts Biot-Savart on mean-free fields") {
    for (int rep = 0; rep < 100; ++rep) {
        const auto xi = random_scalar(2, 5, 5, 1000 + rep);
        const auto back = curl(biot_savart(xi));
        CHECK(rel_diff(back, xi) < 1e-13);
    }
    for (int rep = 0; rep < 20; ++rep) {
        const auto xi = random_divfree_vector(3, 3, 3, 2000 + rep);
        const auto back = curl(biot_savart(xi));
        CHECK(rel_diff(back, xi) < 1e-13);
        const auto u = random_divfree_vector(3, 3, 3, 3000 + rep);
        CHECK(rel_diff(biot_savart(curl(u)), u) < 1e-13);
    }
    // K o curl restricted to the identity in 2d as well
    for (int rep = 0; rep < 20; ++rep) {
        auto u = random_divfree_vector(2, 5, 5, 4000 + rep);
        CHECK(rel_diff(biot_savart(curl(u)), u) < 1e-13);
    }
}

TEST_CASE("gradient-of-inverse-curl is an isometry") {
    for (int m : {0, 1}) {
        const auto xi = random_scalar(2, 6, 6, 55);
        const auto v = biot_savart(xi);
        // |grad K f|_m via componentwise derivatives
        double acc = 0.0;
        for (int axis = 0; axis < 2; ++axis) {
            const auto dv = derivative(v, axis);
            const double n = sobolev_norm(dv, m);
            acc += n * n;
        }
        CHECK(std::sqrt(acc) == doctest::Approx(sobolev_norm(xi, m)).epsilon(1e-12));
    }
}

TEST_CASE("curl formulas and kernel") {
    const auto u = assemble_vector(SpectralField::scalar(2, 4), make_sin(2, 4, 0));
    CHECK(rel_diff(curl(u), make_cos(2, 4, 0)) < 1e-14);

    const auto phi = dealiased_product(make_sin(2, 5, 0), make_cos(2, 5, 1));
    CHECK(curl(gradient(phi)).max_abs_coef() < 1e-13);

    const auto w = random_vector(2, 5, 5, 31);
    CHECK(rel_diff(curl(leray_project(w)), curl(w)) < 1e-13);
    const auto w3 = random_vector(3, 3, 3, 32);
    CHECK(rel_diff(curl(leray_project(w3)), curl(w3)) < 1e-13);
}

TEST_CASE("Sobolev norms") {
    for (int dim : {2, 3}) {
        SpectralField c = SpectralField::scalar(dim, 3);
        c.set_mean_value(0, -1.5);
        const double expect = 1.5 * std::pow(kTwoPi, dim / 2.0);
        for (int m : {-2, 0, 2}) CHECK(sobolev_norm(c, m) == doctest::Approx(expect).epsilon(1e-13));

        CHECK(sobolev_norm(make_cos(dim, 3, 0), 1) ==
              doctest::Approx(std::pow(kTwoPi, dim / 2.0)).epsilon(1e-13));
    }
}

TEST_CASE("dealiased products are exact for band-limited inputs") {
    // cos^2 x1 = 1/2 + 1/2 cos 2x1
    const auto c = make_cos(2, 4, 0);
    const auto prod = dealiased_product(c, c);
    CHECK(prod.mean_value(0) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(prod.at(0, 2, 0).real() == doctest::Approx(0.25).epsilon(1e-13));
    CHECK(prod.at(0, -2, 0).real() == doctest::Approx(0.25).epsilon(1e-13));
    CHECK(std::abs(prod.at(0, 1, 0)) < 1e-14);

    // product of fields with max frequency N/2 stays exact in the band
    const auto f = random_scalar(2, 8, 4, 71);
    const auto g = random_scalar(2, 8, 4, 72);
    const auto fg = dealiased_product(f, g);
    // brute-force convolution oracle
    SpectralField oracle = SpectralField::scalar(2, 8);
    int ka[3], kb[3], ks[3];
    for (std::size_t ma = 0; ma < f.mode_count(); ++ma) {
        f.wavevector(ma, ka);
        if (std::abs(f.coef(0, ma)) == 0.0) continue;
        for (std::size_t mb = 0; mb < g.mode_count(); ++mb) {
            g.wavevector(mb, kb);
            ks[0] = ka[0] + kb[0];
            ks[1] = ka[1] + kb[1];
            if (std::abs(ks[0]) > 8 || std::abs(ks[1]) > 8) continue;
            oracle.coef(0, oracle.index(ks)) += f.coef(0, ma) * g.coef(0, mb);
        }
    }
    CHECK(rel_diff(fg, oracle) < 1e-13);
}

TEST_CASE("trilinear form: skew symmetry for divergence-free advecting fields") {
    for (int rep = 0; rep < 100; ++rep) {
        const auto u = random_divfree_vector(2, 5, 5, 7000 + rep);
        const auto v = random_vector(2, 5, 5, 8000 + rep);
        const auto w = random_vector(2, 5, 5, 9000 + rep);
        const double scale =
            (1.0 + sobolev_norm(u, 0)) * (1.0 + sobolev_norm(v, 1)) * (1.0 + sobolev_norm(w, 0));
        CHECK(std::abs(b_form(u, v, v)) < 1e-12 * scale);
        CHECK(std::abs(b_form(u, v, w) + b_form(u, w, v)) < 1e-12 * scale);
    }
    // 3d spot check
    const auto u3 = random_divfree_vector(3, 3, 3, 11);
    const auto v3 = random_vector(3, 3, 3, 12);
    const double s3 = (1.0 + sobolev_norm(u3, 0)) * (1.0 + sobolev_norm(v3, 1));
    CHECK(std::abs(b_form(u3, v3, v3)) < 1e-12 * s3 * s3);
}

TEST_CASE("frequency cutoff smoothing") {
    const auto f = random_scalar(2, 6, 6, 2024);

    // eta = 1 keeps only |k| <= 1
    const auto j1 = smoothing_cutoff(f, 1.0);
    int k[3];
    for (std::size_t m = 0; m < j1.mode_count(); ++m) {
        j1.wavevector(m, k);
        if (k[0] * k[0] + k[1] * k[1] > 1) CHECK(std::abs(j1.coef(0, m)) == 0.0);
    }

    for (double eta : {1.0, 0.5, 0.25}) {
        const auto jf = smoothing_cutoff(f, eta);
        SpectralField rest = f;
        rest -= jf;
        CHECK(sobolev_norm(rest, 0) <= eta * sobolev_norm(f, 1) + 1e-13);
        // idempotence
        CHECK(rel_diff(smoothing_cutoff(jf, eta), jf) < 1e-15);
        // self-adjointness
        const auto g = random_scalar(2, 6, 6, 4048);
        CHECK(l2_inner(jf, g) == doctest::Approx(l2_inner(f, smoothing_cutoff(g, eta)))
                                     .epsilon(1e-12));
        // upper bound |J f|_{n+k} <= eta^{-k} |f|_n
        CHECK(sobolev_norm(jf, 2) <= (1.0 / (eta * eta)) * sobolev_norm(f, 0) * (1.0 + 1e-12));
    }
    CHECK_THROWS_AS(smoothing_cutoff(f, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(smoothing_cutoff(f, 1.5), std::invalid_argument);
}

TEST_CASE("field binary and csv serialization") {
    const auto f = random_vector(3, 3, 3, 31337);
    write_field_file(f, "test_field.bin");
    const auto g = read_field_file("test_field.bin");
    CHECK(g.dim() == 3);
    CHECK(g.trunc() == 3);
    CHECK(g.comps() == 3);
    CHECK(rel_diff(f, g) == 0.0);

    std::stringstream ss;
    write_field_csv(f, ss);
    const std::string head = ss.str().substr(0, ss.str().find('\n'));
    CHECK(head == "k1,k2,k3,component,re,im");
}

TEST_CASE("phase shift matches shifted evaluation") {
    const auto f = random_scalar(2, 4, 4, 888);
    const std::array<double, 3> a{0.7, -1.3, 0.0};
    const auto shifted = phase_shift(f, a);
    // compare on the grid: shifted(x) == f(x + a)
    const auto gf = transform(f, 64);
    const auto gs = transform(shifted, 64);
    // evaluate f at x+a by direct Fourier summation at a few points
    int k[3];
    for (int probe = 0; probe < 5; ++probe) {
        const std::size_t i = static_cast<std::size_t>(probe * 13 % 64);
        const std::size_t j = static_cast<std::size_t>(probe * 29 % 64);
        const double x1 = kTwoPi * static_cast<double>(i) / 64.0 + a[0];
        const double x2 = kTwoPi * static_cast<double>(j) / 64.0 + a[1];
        std::complex<double> val{0.0, 0.0};
        for (std::size_t m = 0; m < f.mode_count(); ++m) {
            f.wavevector(m, k);
            val += f.coef(0, m) *
                   std::exp(std::complex<double>{0.0, k[0] * x1 + k[1] * x2});
        }
        CHECK(gs.value(0, i * 64 + j) == doctest::Approx(val.real()).epsilon(1e-11));
    }
}
