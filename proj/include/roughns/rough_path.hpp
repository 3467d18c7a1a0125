#pragma once

#include "roughns/sample_path.hpp"

#include <functional>
#include <vector>

namespace roughns {

/// K x K matrix of level-2 increments, row-major. Entry (j,k) carries
/// int_s^t dz^j_{sr} dz^k_r.
struct LevelTwo {
    int k_dim = 0;
    std::vector<double> m;

    LevelTwo() = default;
    explicit LevelTwo(int k) : k_dim(k), m(static_cast<std::size_t>(k) * k, 0.0) {}
    double& operator()(int j, int k) { return m[static_cast<std::size_t>(j) * k_dim + k]; }
    double operator()(int j, int k) const { return m[static_cast<std::size_t>(j) * k_dim + k]; }
    double frobenius() const;

    LevelTwo& operator+=(const LevelTwo& o);
    LevelTwo& operator-=(const LevelTwo& o);
};

/// Outer product a (x) b.
LevelTwo outer(const std::vector<double>& a, const std::vector<double>& b);

/// Canonical two-level lift of a piecewise-linear path: Z_{st} = z_t - z_s
/// exactly, and the level-2 integrals are exact (0.5 dz (x) dz within a
/// segment, composed across breakpoints through Chen's relation).
class RoughPathLift {
public:
    RoughPathLift() = default;
    explicit RoughPathLift(SamplePath path);

    int k_dim() const { return path_.k_dim; }
    double horizon() const { return path_.horizon(); }
    double start_time() const { return path_.times.empty() ? 0.0 : path_.times.front(); }
    const SamplePath& backbone() const { return path_; }

    std::vector<double> value(double t) const { return path_.eval(t); }
    std::vector<double> increment(double s, double t) const;
    LevelTwo level_two(double s, double t) const;

    /// delta ZZ_{s,mid,t} - Z_{s,mid} (x) Z_{mid,t}; zero for a consistent lift.
    LevelTwo chen_defect(double s, double mid, double t) const;

private:
    /// Level-2 integral from the path start up to t (t clamped to the span).
    LevelTwo prefix_level_two(double t) const;

    SamplePath path_;
    std::vector<LevelTwo> prefix_; // level-2 over [t_0, t_i]
};

/// p-variation of a grid-supported two-index map: sup over partitions of the
/// grid of (sum |g|^p)^{1/p}, by dynamic programming.
/// `increment_norm(i,j)` returns |g_{t_i t_j}| for grid indices i < j.
double p_variation(const std::function<double(std::size_t, std::size_t)>& increment_norm,
                   std::size_t grid_size, double p);

/// p-variation of the first level of a lift over [s,t], restricted to the
/// backbone grid (plus the interval endpoints).
double p_variation_level_one(const RoughPathLift& lift, double p, double s, double t);
/// (p/2)-variation of the level-2 part in Frobenius norm.
double p_variation_level_two(const RoughPathLift& lift, double p, double s, double t);

/// Superadditive two-parameter functional vanishing on the diagonal,
/// represented by a table of grid-restricted variation sums. Arbitrary (s,t)
/// evaluate on the largest table interval inside [s,t], which keeps
/// superadditivity exact.
class Control {
public:
    Control() = default;
    Control(std::vector<double> grid, std::vector<double> table);

    double operator()(double s, double t) const;
    const std::vector<double>& grid() const { return grid_; }
    double total() const { return operator()(grid_.front(), grid_.back()); }

    /// Builds the table V(i,j) = sup over grid partitions of sum w(i,j)
    /// for a superadditive-by-construction variation functional.
    static Control from_increments(
        const std::vector<double>& grid,
        const std::function<double(std::size_t, std::size_t)>& weight);

private:
    std::size_t snap_up(double s) const;
    std::size_t snap_down(double t) const;

    std::vector<double> grid_;
    std::vector<double> table_; // row-major (grid_size x grid_size), 0 below diagonal
};

/// The control of a rough path for 2 <= p < 3: dominates |Z_{st}|^p and
/// |ZZ_{st}|^{p/2} on the control grid. The backbone grid is coarsened to at
/// most `max_grid` points to bound the table size.
Control control_omega_z(const RoughPathLift& lift, double p, std::size_t max_grid = 257);

/// Inhomogeneous rough-path distance on the common grid:
/// |Z-Z'|_{p-var} + |ZZ-ZZ'|_{p/2-var}.
double rough_path_distance(const RoughPathLift& a, const RoughPathLift& b, double p,
                           std::size_t max_grid = 257);

} // namespace roughns
