#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace roughns {

/// A sampled K-dimensional driver path: strictly increasing times with one
/// value vector per sample time. Interpreted piecewise-linearly everywhere.
struct SamplePath {
    std::vector<double> times;
    std::vector<double> values; // row-major, values[i*K + j]
    int k_dim = 0;

    std::size_t size() const { return times.size(); }
    double horizon() const { return times.empty() ? 0.0 : times.back(); }
    double value(std::size_t i, int j) const { return values[i * k_dim + j]; }

    /// Validates strict monotonicity and finiteness; throws on violation.
    void validate() const;

    /// Piecewise-linear evaluation at any t inside [times.front(), horizon].
    std::vector<double> eval(double t) const;

    /// Largest sample index i with times[i] <= t.
    std::size_t segment_of(double t) const;

    /// Keep every `stride`-th sample (plus the final one). Stride must divide
    /// the sample count minus one for exact nesting.
    SamplePath subsample(std::size_t stride) const;

    /// Shift the time axis by -t0 and drop samples before t0 (t0 must be a
    /// sample time).
    SamplePath restart_at(double t0) const;
};

/// Brownian sample with i.i.d. N(0, mesh) increments per component;
/// deterministic in the seed. mesh must divide the horizon (up to roundoff).
SamplePath sample_brownian(std::uint64_t seed, double mesh, int k_dim, double horizon);

/// Fractional Brownian motion with Hurst parameter H in (1/2,1), sampled with
/// the exact covariance (Cholesky factorization of the fBm covariance).
SamplePath sample_fbm(std::uint64_t seed, double mesh, int k_dim, double horizon, double hurst);

/// Deterministic smooth multi-sine path sampled at `mesh`; used where a
/// smooth driver of bounded derivatives is needed.
SamplePath sample_smooth(std::uint64_t seed, double mesh, int k_dim, double horizon);

/// Constant path (zero driver).
SamplePath sample_zero(double mesh, int k_dim, double horizon);

/// fBm covariance 0.5 (s^{2H} + t^{2H} - |t-s|^{2H}).
double fbm_covariance(double s, double t, double hurst);

/// CSV with header t,z1,...,zK; 17 significant digits.
void write_path_csv(const SamplePath& p, std::ostream& os);
void write_path_csv_file(const SamplePath& p, const std::string& path);
SamplePath read_path_csv(std::istream& is);
SamplePath read_path_csv_file(const std::string& path);

} // namespace roughns
