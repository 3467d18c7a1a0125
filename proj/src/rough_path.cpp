#include "roughns/rough_path.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace roughns {

double LevelTwo::frobenius() const {
    double acc = 0.0;
    for (double v : m) acc += v * v;
    return std::sqrt(acc);
}

LevelTwo& LevelTwo::operator+=(const LevelTwo& o) {
    for (std::size_t i = 0; i < m.size(); ++i) m[i] += o.m[i];
    return *this;
}

LevelTwo& LevelTwo::operator-=(const LevelTwo& o) {
    for (std::size_t i = 0; i < m.size(); ++i) m[i] -= o.m[i];
    return *this;
}

LevelTwo outer(const std::vector<double>& a, const std::vector<double>& b) {
    LevelTwo out(static_cast<int>(a.size()));
    for (std::size_t j = 0; j < a.size(); ++j)
        for (std::size_t k = 0; k < b.size(); ++k) out(static_cast<int>(j), static_cast<int>(k)) = a[j] * b[k];
    return out;
}

namespace {

// half dz (x) dz of a single linear segment restricted to [s,t]
LevelTwo segment_level_two(const std::vector<double>& dz) {
    LevelTwo out(static_cast<int>(dz.size()));
    for (std::size_t j = 0; j < dz.size(); ++j)
        for (std::size_t k = 0; k < dz.size(); ++k)
            out(static_cast<int>(j), static_cast<int>(k)) = 0.5 * dz[j] * dz[k];
    return out;
}

std::vector<double> diff(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = b[i] - a[i];
    return out;
}

// Chen composition: zz([s,t]) from zz([s,u]), zz([u,t]) and the level-1
// increments.
void chen_append(LevelTwo& acc, std::vector<double>& z_acc, const LevelTwo& right,
                 const std::vector<double>& dz_right) {
    acc += right;
    acc += outer(z_acc, dz_right);
    for (std::size_t i = 0; i < z_acc.size(); ++i) z_acc[i] += dz_right[i];
}

} // namespace

RoughPathLift::RoughPathLift(SamplePath path) : path_(std::move(path)) {
    path_.validate();
    const std::size_t n = path_.size();
    prefix_.resize(n);
    prefix_[0] = LevelTwo(path_.k_dim);
    std::vector<double> z_acc(static_cast<std::size_t>(path_.k_dim), 0.0);
    LevelTwo acc(path_.k_dim);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        std::vector<double> dz(static_cast<std::size_t>(path_.k_dim));
        for (int j = 0; j < path_.k_dim; ++j) dz[j] = path_.value(i + 1, j) - path_.value(i, j);
        chen_append(acc, z_acc, segment_level_two(dz), dz);
        prefix_[i + 1] = acc;
    }
}

std::vector<double> RoughPathLift::increment(double s, double t) const {
    if (s > t) throw std::invalid_argument("RoughPathLift::increment: s > t");
    return diff(path_.eval(s), path_.eval(t));
}

LevelTwo RoughPathLift::prefix_level_two(double t) const {
    const double t0 = start_time();
    if (t <= t0) return LevelTwo(path_.k_dim);
    const std::size_t i = path_.segment_of(std::min(t, horizon()));
    LevelTwo acc = prefix_[i];
    std::vector<double> z_acc = diff(path_.eval(t0), path_.eval(path_.times[i]));
    const std::vector<double> dz = diff(path_.eval(path_.times[i]), path_.eval(t));
    chen_append(acc, z_acc, segment_level_two(dz), dz);
    return acc;
}

LevelTwo RoughPathLift::level_two(double s, double t) const {
    if (s > t) throw std::invalid_argument("RoughPathLift::level_two: s > t");
    // ZZ_{st} = ZZ_{0t} - ZZ_{0s} - Z_{0s} (x) Z_{st}
    LevelTwo out = prefix_level_two(t);
    out -= prefix_level_two(s);
    const std::vector<double> z0s = diff(path_.eval(start_time()), path_.eval(s));
    LevelTwo cross = outer(z0s, increment(s, t));
    out -= cross;
    return out;
}

LevelTwo RoughPathLift::chen_defect(double s, double mid, double t) const {
    if (!(s <= mid && mid <= t))
        throw std::invalid_argument("chen_defect: require s <= mid <= t");
    LevelTwo d = level_two(s, t);
    d -= level_two(s, mid);
    d -= level_two(mid, t);
    d -= outer(increment(s, mid), increment(mid, t));
    return d;
}

double p_variation(const std::function<double(std::size_t, std::size_t)>& increment_norm,
                   std::size_t grid_size, double p) {
    if (p < 1.0) throw std::invalid_argument("p_variation: p must be >= 1");
    if (grid_size < 2) return 0.0;
    std::vector<double> best(grid_size, 0.0);
    for (std::size_t j = 1; j < grid_size; ++j) {
        double v = 0.0;
        for (std::size_t i = 0; i < j; ++i)
            v = std::max(v, best[i] + std::pow(increment_norm(i, j), p));
        best[j] = v;
    }
    return std::pow(best.back(), 1.0 / p);
}

namespace {

// grid of backbone times restricted to [s,t], coarsened to <= max_grid points
std::vector<double> restricted_grid(const SamplePath& path, double s, double t,
                                    std::size_t max_grid) {
    std::vector<double> g;
    g.push_back(s);
    for (double tt : path.times)
        if (tt > s + 1e-15 && tt < t - 1e-15) g.push_back(tt);
    g.push_back(t);
    if (max_grid >= 2 && g.size() > max_grid) {
        std::vector<double> coarse;
        const std::size_t inner = g.size() - 2;
        const std::size_t keep = max_grid - 2;
        coarse.push_back(g.front());
        for (std::size_t i = 0; i < keep; ++i) {
            const std::size_t idx = 1 + (i * inner) / keep;
            if (coarse.back() < g[idx]) coarse.push_back(g[idx]);
        }
        if (coarse.back() < g.back()) coarse.push_back(g.back());
        g = std::move(coarse);
    }
    return g;
}

} // namespace

double p_variation_level_one(const RoughPathLift& lift, double p, double s, double t) {
    const auto grid = restricted_grid(lift.backbone(), s, t, 0);
    auto norm = [&](std::size_t i, std::size_t j) {
        const auto z = lift.increment(grid[i], grid[j]);
        double acc = 0.0;
        for (double v : z) acc += v * v;
        return std::sqrt(acc);
    };
    return p_variation(norm, grid.size(), p);
}

double p_variation_level_two(const RoughPathLift& lift, double p, double s, double t) {
    const auto grid = restricted_grid(lift.backbone(), s, t, 0);
    auto norm = [&](std::size_t i, std::size_t j) {
        return lift.level_two(grid[i], grid[j]).frobenius();
    };
    return p_variation(norm, grid.size(), p / 2.0);
}

Control::Control(std::vector<double> grid, std::vector<double> table)
    : grid_(std::move(grid)), table_(std::move(table)) {
    if (grid_.size() * grid_.size() != table_.size())
        throw std::invalid_argument("Control: table size mismatch");
}

std::size_t Control::snap_up(double s) const {
    auto it = std::lower_bound(grid_.begin(), grid_.end(), s - 1e-12);
    if (it == grid_.end()) return grid_.size() - 1;
    return static_cast<std::size_t>(it - grid_.begin());
}

std::size_t Control::snap_down(double t) const {
    auto it = std::upper_bound(grid_.begin(), grid_.end(), t + 1e-12);
    if (it == grid_.begin()) return 0;
    return static_cast<std::size_t>(it - grid_.begin()) - 1;
}

double Control::operator()(double s, double t) const {
    if (grid_.empty()) return 0.0;
    if (s > t) throw std::invalid_argument("Control: s > t");
    const std::size_t i = snap_up(s);
    const std::size_t j = snap_down(t);
    if (i >= j) return 0.0;
    return table_[i * grid_.size() + j];
}

Control Control::from_increments(
    const std::vector<double>& grid,
    const std::function<double(std::size_t, std::size_t)>& weight) {
    const std::size_t n = grid.size();
    std::vector<double> table(n * n, 0.0);
    // For each start i the DP over j gives the partition supremum; the
    // resulting table is superadditive and monotone on grid pairs.
    std::vector<double> best(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(best.begin(), best.end(), 0.0);
        for (std::size_t j = i + 1; j < n; ++j) {
            double v = weight(i, j);
            for (std::size_t m = i + 1; m < j; ++m)
                v = std::max(v, best[m] + weight(m, j));
            best[j] = v;
            table[i * n + j] = v;
        }
    }
    return Control(grid, std::move(table));
}

Control control_omega_z(const RoughPathLift& lift, double p, std::size_t max_grid) {
    if (p < 2.0 || p >= 3.0)
        throw std::invalid_argument("control_omega_z: p must lie in [2,3)");
    const auto grid =
        restricted_grid(lift.backbone(), lift.start_time(), lift.horizon(), max_grid);
    auto weight = [&](std::size_t i, std::size_t j) {
        const auto z = lift.increment(grid[i], grid[j]);
        double zn = 0.0;
        for (double v : z) zn += v * v;
        zn = std::sqrt(zn);
        const double zz = lift.level_two(grid[i], grid[j]).frobenius();
        return std::pow(zn, p) + std::pow(zz, p / 2.0);
    };
    return Control::from_increments(grid, weight);
}

double rough_path_distance(const RoughPathLift& a, const RoughPathLift& b, double p,
                           std::size_t max_grid) {
    if (a.k_dim() != b.k_dim())
        throw std::invalid_argument("rough_path_distance: dimension mismatch");
    // common grid: union of backbones, coarsened
    std::vector<double> grid = a.backbone().times;
    grid.insert(grid.end(), b.backbone().times.begin(), b.backbone().times.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [](double x, double y) { return std::abs(x - y) < 1e-15; }),
               grid.end());
    if (grid.size() > max_grid) {
        std::vector<double> coarse;
        coarse.reserve(max_grid);
        for (std::size_t i = 0; i < max_grid; ++i)
            coarse.push_back(grid[(i * (grid.size() - 1)) / (max_grid - 1)]);
        coarse.back() = grid.back();
        grid = std::move(coarse);
    }
    auto znorm = [&](std::size_t i, std::size_t j) {
        const auto za = a.increment(grid[i], grid[j]);
        const auto zb = b.increment(grid[i], grid[j]);
        double acc = 0.0;
        for (std::size_t m = 0; m < za.size(); ++m) acc += (za[m] - zb[m]) * (za[m] - zb[m]);
        return std::sqrt(acc);
    };
    auto zznorm = [&](std::size_t i, std::size_t j) {
        LevelTwo d = a.level_two(grid[i], grid[j]);
        d -= b.level_two(grid[i], grid[j]);
        return d.frobenius();
    };
    return p_variation(znorm, grid.size(), p) + p_variation(zznorm, grid.size(), p / 2.0);
}

} // namespace roughns
