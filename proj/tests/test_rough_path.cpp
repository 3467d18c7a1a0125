#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "roughns/rough_path.hpp"
#include "roughns/sample_path.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace roughns;

namespace {

SamplePath make_path(std::vector<double> times, std::vector<double> values, int k) {
    SamplePath p;
    p.times = std::move(times);
    p.values = std::move(values);
    p.k_dim = k;
    return p;
}

// All-partitions p-variation by exhaustive enumeration; oracle for the DP.
double p_variation_bruteforce(const std::vector<double>& z, double p) {
    const std::size_t n = z.size();
    double best = 0.0;
    const std::size_t interior = n - 2;
    for (std::size_t mask = 0; mask < (1u << interior); ++mask) {
        std::vector<double> pts{z.front()};
        for (std::size_t i = 0; i < interior; ++i)
            if (mask & (1u << i)) pts.push_back(z[i + 1]);
        pts.push_back(z.back());
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i)
            acc += std::pow(std::abs(pts[i + 1] - pts[i]), p);
        best = std::max(best, acc);
    }
    return std::pow(best, 1.0 / p);
}

} // namespace

TEST_CASE("linear segment lift has Z = dz and ZZ = half dz (x) dz") {
    auto p = make_path({0.0, 1.0}, {0.0, 0.0, 1.0, 2.0}, 2);
    RoughPathLift lift(p);
    auto z = lift.increment(0.0, 1.0);
    CHECK(z[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(z[1] == doctest::Approx(2.0).epsilon(1e-14));
    auto zz = lift.level_two(0.0, 1.0);
    CHECK(zz(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(zz(0, 1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(zz(1, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(zz(1, 1) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("constant path lifts to zero") {
    auto p = make_path({0.0, 0.5, 1.0}, {3.0, 3.0, 3.0}, 1);
    RoughPathLift lift(p);
    CHECK(std::abs(lift.increment(0.0, 1.0)[0]) < 1e-15);
    CHECK(lift.level_two(0.1, 0.9).frobenius() < 1e-15);
}

TEST_CASE("two-segment L-shaped path: cross integrals via Chen") {
    auto p = make_path({0.0, 1.0, 2.0}, {0, 0, 1, 0, 1, 1}, 2);
    RoughPathLift lift(p);
    auto zz = lift.level_two(0.0, 2.0);
    CHECK(zz(0, 1) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(zz(1, 0)) < 1e-13);

    // midpoint-rule quadrature of int dz1_{0,r} dz2_r at mesh 1e-4
    const double h = 1e-4;
    double quad01 = 0.0, quad10 = 0.0;
    const double z0a = p.eval(0.0)[0], z0b = p.eval(0.0)[1];
    for (double r = 0.0; r < 2.0 - h / 2; r += h) {
        const auto mid = p.eval(r + h / 2);
        const auto right = p.eval(r + h);
        const auto left = p.eval(r);
        quad01 += (mid[0] - z0a) * (right[1] - left[1]);
        quad10 += (mid[1] - z0b) * (right[0] - left[0]);
    }
    CHECK(zz(0, 1) == doctest::Approx(quad01).epsilon(1e-6));
    CHECK(std::abs(zz(1, 0) - quad10) < 1e-6);
}

TEST_CASE("invalid paths are rejected") {
    auto p = make_path({0.0, 1.0, 1.0}, {0, 0, 0}, 1);
    CHECK_THROWS_AS(RoughPathLift{p}, std::invalid_argument);
    auto q = make_path({0.0, 1.0}, {0.0, std::nan("")}, 1);
    CHECK_THROWS_AS(RoughPathLift{q}, std::invalid_argument);
}

TEST_CASE("Chen defect vanishes on piecewise-linear lifts") {
    const auto bm = sample_brownian(7, std::pow(2.0, -10), 3, 1.0);
    RoughPathLift lift(bm);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double scale = 0.0;
    for (std::size_t i = 0; i < bm.size(); ++i)
        for (int j = 0; j < 3; ++j) scale = std::max(scale, std::abs(bm.value(i, j)));
    for (int rep = 0; rep < 100; ++rep) {
        double a = u(rng), b = u(rng), c = u(rng);
        if (a > b) std::swap(a, b);
        if (b > c) std::swap(b, c);
        if (a > b) std::swap(a, b);
        CHECK(lift.chen_defect(a, b, c).frobenius() <= 1e-12 * std::max(1.0, scale * scale));
    }
    CHECK_THROWS_AS(lift.chen_defect(0.5, 0.2, 0.8), std::invalid_argument);
}

TEST_CASE("a corrupted level-2 entry shows up one-to-one in the defect") {
    const auto bm = sample_brownian(3, 1.0 / 64, 2, 1.0);
    RoughPathLift lift(bm);
    const double s = 0.125, mid = 0.5, t = 0.875;
    LevelTwo zz_st = lift.level_two(s, t);
    zz_st(0, 1) += 1.0; // corrupt one entry
    LevelTwo defect = zz_st;
    defect -= lift.level_two(s, mid);
    defect -= lift.level_two(mid, t);
    defect -= outer(lift.increment(s, mid), lift.increment(mid, t));
    CHECK(defect(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(defect(0, 0)) < 1e-12);
    CHECK(std::abs(defect(1, 0)) < 1e-12);
    CHECK(std::abs(defect(1, 1)) < 1e-12);
}

TEST_CASE("shuffle identity: Sym(ZZ) = half Z (x) Z") {
    const auto bm = sample_brownian(19, 1.0 / 256, 2, 1.0);
    RoughPathLift lift(bm);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 200; ++rep) {
        double s = u(rng), t = u(rng);
        if (s > t) std::swap(s, t);
        const auto z = lift.increment(s, t);
        const auto zz = lift.level_two(s, t);
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                CHECK(std::abs(0.5 * (zz(j, k) + zz(k, j)) - 0.5 * z[j] * z[k]) < 1e-12);
    }
}

TEST_CASE("level-1 additivity across a split point") {
    const auto bm = sample_brownian(2, 1.0 / 128, 2, 1.0);
    RoughPathLift lift(bm);
    const auto whole = lift.increment(0.1, 0.9);
    const auto l = lift.increment(0.1, 0.33);
    const auto r = lift.increment(0.33, 0.9);
    for (int j = 0; j < 2; ++j) CHECK(whole[j] == doctest::Approx(l[j] + r[j]).epsilon(1e-13));
}

TEST_CASE("p-variation: monotone increments collapse to the total increment") {
    std::vector<double> z{0.0, 0.1, 0.35, 0.41, 0.8, 1.3};
    for (double p : {1.0, 1.5, 2.0, 2.7}) {
        auto norm = [&](std::size_t i, std::size_t j) { return std::abs(z[j] - z[i]); };
        CHECK(p_variation(norm, z.size(), p) == doctest::Approx(1.3).epsilon(1e-12));
    }
}

TEST_CASE("p-variation of the zig-zag path") {
    std::vector<double> z{0.0, 1.0, 0.0, 1.0};
    auto norm = [&](std::size_t i, std::size_t j) { return std::abs(z[j] - z[i]); };
    CHECK(p_variation(norm, z.size(), 1.0) == doctest::Approx(3.0).epsilon(1e-13));
    const double direct = p_variation(norm, z.size(), 2.0);
    CHECK(direct == doctest::Approx(p_variation_bruteforce(z, 2.0)).epsilon(1e-13));
    CHECK(direct == doctest::Approx(std::sqrt(3.0)).epsilon(1e-13));
    CHECK_THROWS_AS(p_variation(norm, z.size(), 0.5), std::invalid_argument);
}

TEST_CASE("p-variation agrees with brute force on random data") {
    std::mt19937_64 rng(23);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> z(9);
        for (auto& v : z) v = g(rng);
        for (double p : {1.3, 2.0, 2.5}) {
            auto norm = [&](std::size_t i, std::size_t j) { return std::abs(z[j] - z[i]); };
            CHECK(p_variation(norm, z.size(), p) ==
                  doctest::Approx(p_variation_bruteforce(z, p)).epsilon(1e-12));
        }
    }
}

TEST_CASE("p-variation is nonincreasing in p and monotone in the interval") {
    const auto bm = sample_brownian(31, 1.0 / 128, 1, 1.0);
    RoughPathLift lift(bm);
    const double v22 = p_variation_level_one(lift, 2.2, 0.0, 1.0);
    const double v28 = p_variation_level_one(lift, 2.8, 0.0, 1.0);
    CHECK(v28 <= v22 + 1e-12);
    const double inner = p_variation_level_one(lift, 2.2, 0.25, 0.75);
    CHECK(inner <= v22 + 1e-12);
}

TEST_CASE("control of the zero lift vanishes") {
    auto p = sample_zero(0.125, 2, 1.0);
    RoughPathLift lift(p);
    auto omega = control_omega_z(lift, 2.5);
    CHECK(omega(0.0, 1.0) == doctest::Approx(0.0));
    CHECK(omega(0.2, 0.7) == doctest::Approx(0.0));
}

TEST_CASE("control dominates both levels for a linear path") {
    // z_t = t v
    const int n = 64;
    std::vector<double> times(n + 1), values;
    const double v1 = 1.0, v2 = -2.0;
    for (int i = 0; i <= n; ++i) {
        times[i] = static_cast<double>(i) / n;
        values.push_back(v1 * times[i]);
        values.push_back(v2 * times[i]);
    }
    auto p = make_path(times, values, 2);
    RoughPathLift lift(p);
    const double p_exp = 2.0;
    auto omega = control_omega_z(lift, p_exp);
    const double vnorm2 = v1 * v1 + v2 * v2;
    for (int level = 1; level <= 5; ++level) {
        const int segs = 1 << level;
        for (int i = 0; i < segs; ++i) {
            const double s = static_cast<double>(i) / segs;
            const double t = static_cast<double>(i + 1) / segs;
            const double w = omega(s, t);
            CHECK(w >= vnorm2 * (t - s) * (t - s) - 1e-12);
            const auto zz = lift.level_two(s, t);
            CHECK(w >= std::pow(zz.frobenius(), p_exp / 2.0) - 1e-12);
        }
    }
    CHECK_THROWS_AS(control_omega_z(lift, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(control_omega_z(lift, 3.0), std::invalid_argument);
}

TEST_CASE("control superadditivity on random triples") {
    const auto bm = sample_brownian(41, 1.0 / 256, 2, 1.0);
    RoughPathLift lift(bm);
    auto omega = control_omega_z(lift, 2.5);
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 1000; ++rep) {
        double a = u(rng), b = u(rng), c = u(rng);
        if (a > b) std::swap(a, b);
        if (b > c) std::swap(b, c);
        if (a > b) std::swap(a, b);
        CHECK(omega(a, b) + omega(b, c) <= omega(a, c) + 1e-12);
    }
    CHECK(omega(0.37, 0.37) == doctest::Approx(0.0));
}

TEST_CASE("Brownian sampling is deterministic in the seed") {
    const auto a = sample_brownian(123, 1.0 / 512, 2, 1.0);
    const auto b = sample_brownian(123, 1.0 / 512, 2, 1.0);
    CHECK(a.values == b.values);
    const auto c = sample_brownian(124, 1.0 / 512, 2, 1.0);
    CHECK(a.values != c.values);
}

TEST_CASE("Brownian increments have the right variance") {
    const double mesh = std::pow(2.0, -14);
    const auto p = sample_brownian(2024, mesh, 1, 1.0);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        const double dz = p.value(i + 1, 0) - p.value(i, 0);
        acc += dz * dz;
    }
    const double var = acc / static_cast<double>(p.size() - 1);
    CHECK(std::abs(var - mesh) / mesh < 0.05);
}

TEST_CASE("zero-horizon path is a single point with zero lift") {
    const auto p = sample_brownian(5, 0.25, 2, 0.0);
    CHECK(p.size() == 1);
    RoughPathLift lift(p);
    CHECK(std::abs(lift.increment(0.0, 0.0)[0]) == 0.0);
    CHECK(lift.level_two(0.0, 0.0).frobenius() == 0.0);
}

TEST_CASE("fBm covariance approaches the Brownian covariance as H -> 1/2") {
    const double h = 0.5 + 1e-9;
    double worst = 0.0;
    for (int i = 1; i <= 16; ++i)
        for (int j = 1; j <= 16; ++j) {
            const double s = i / 16.0, t = j / 16.0;
            worst = std::max(worst, std::abs(fbm_covariance(s, t, h) - std::min(s, t)));
        }
    CHECK(worst <= 1e-6);
}

TEST_CASE("fBm sampling: determinism, variance, parameter guards") {
    const auto a = sample_fbm(9, 1.0 / 32, 1, 1.0, 0.75);
    const auto b = sample_fbm(9, 1.0 / 32, 1, 1.0, 0.75);
    CHECK(a.values == b.values);
    CHECK_THROWS_AS(sample_fbm(1, 0.25, 1, 1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(sample_fbm(1, 0.25, 1, 1.0, 1.0), std::invalid_argument);

    // Var(z_1) = 1 for every Hurst index
    const int reps = 10000;
    double acc = 0.0;
    for (int r = 0; r < reps; ++r) {
        const auto s = sample_fbm(1000 + r, 1.0 / 8, 1, 1.0, 0.8);
        const double z1 = s.value(s.size() - 1, 0);
        acc += z1 * z1;
    }
    const double var = acc / reps;
    CHECK(std::abs(var - 1.0) < 0.05);

    // empirical covariance structure sanity: positive correlation of
    // consecutive increments for H > 1/2
    double cov = 0.0;
    for (int r = 0; r < 2000; ++r) {
        const auto s = sample_fbm(5000 + r, 0.5, 1, 1.0, 0.9);
        const double d1 = s.value(1, 0) - s.value(0, 0);
        const double d2 = s.value(2, 0) - s.value(1, 0);
        cov += d1 * d2;
    }
    CHECK(cov / 2000 > 0.0);
}

TEST_CASE("path CSV round-trip") {
    const auto p = sample_brownian(3, 0.125, 3, 1.0);
    std::stringstream ss;
    write_path_csv(p, ss);
    const auto q = read_path_csv(ss);
    REQUIRE(q.size() == p.size());
    REQUIRE(q.k_dim == p.k_dim);
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(q.times[i] == doctest::Approx(p.times[i]).epsilon(1e-16));
        for (int j = 0; j < p.k_dim; ++j)
            CHECK(q.value(i, j) == doctest::Approx(p.value(i, j)).epsilon(1e-16));
    }
}

TEST_CASE("restart produces the time-shifted tail") {
    const auto p = sample_brownian(8, 0.125, 2, 1.0);
    const auto q = p.restart_at(0.5);
    CHECK(q.times.front() == doctest::Approx(0.0));
    CHECK(q.horizon() == doctest::Approx(0.5));
    CHECK(q.value(0, 0) == doctest::Approx(p.eval(0.5)[0]));
}
