#include "roughns/sample_path.hpp"

#include "roughns/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace roughns {

void SamplePath::validate() const {
    if (k_dim <= 0) throw std::invalid_argument("SamplePath: dimension must be positive");
    if (times.empty()) throw std::invalid_argument("SamplePath: empty path");
    if (values.size() != times.size() * static_cast<std::size_t>(k_dim))
        throw std::invalid_argument("SamplePath: value/time size mismatch");
    for (std::size_t i = 0; i + 1 < times.size(); ++i)
        if (!(times[i] < times[i + 1]))
            throw std::invalid_argument("SamplePath: times must be strictly increasing");
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("SamplePath: non-finite value");
    for (double t : times)
        if (!std::isfinite(t)) throw std::invalid_argument("SamplePath: non-finite time");
}

std::size_t SamplePath::segment_of(double t) const {
    auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return 0;
    std::size_t i = static_cast<std::size_t>(it - times.begin()) - 1;
    if (i + 1 >= times.size()) i = times.size() >= 2 ? times.size() - 2 : 0;
    return i;
}

std::vector<double> SamplePath::eval(double t) const {
    std::vector<double> out(static_cast<std::size_t>(k_dim), 0.0);
    if (times.empty()) return out;
    if (t <= times.front()) {
        for (int j = 0; j < k_dim; ++j) out[j] = value(0, j);
        return out;
    }
    if (t >= times.back()) {
        for (int j = 0; j < k_dim; ++j) out[j] = value(times.size() - 1, j);
        return out;
    }
    const std::size_t i = segment_of(t);
    const double w = (t - times[i]) / (times[i + 1] - times[i]);
    for (int j = 0; j < k_dim; ++j)
        out[j] = (1.0 - w) * value(i, j) + w * value(i + 1, j);
    return out;
}

SamplePath SamplePath::subsample(std::size_t stride) const {
    if (stride == 0) throw std::invalid_argument("subsample: zero stride");
    SamplePath out;
    out.k_dim = k_dim;
    for (std::size_t i = 0; i < times.size(); i += stride) {
        out.times.push_back(times[i]);
        for (int j = 0; j < k_dim; ++j) out.values.push_back(value(i, j));
    }
    if ((times.size() - 1) % stride != 0) {
        out.times.push_back(times.back());
        for (int j = 0; j < k_dim; ++j) out.values.push_back(value(times.size() - 1, j));
    }
    return out;
}

SamplePath SamplePath::restart_at(double t0) const {
    auto it = std::lower_bound(times.begin(), times.end(), t0 - 1e-12);
    if (it == times.end() || std::abs(*it - t0) > 1e-9)
        throw std::invalid_argument("restart_at: t0 must be a sample time");
    const std::size_t i0 = static_cast<std::size_t>(it - times.begin());
    SamplePath out;
    out.k_dim = k_dim;
    for (std::size_t i = i0; i < times.size(); ++i) {
        out.times.push_back(times[i] - times[i0]);
        for (int j = 0; j < k_dim; ++j) out.values.push_back(value(i, j));
    }
    return out;
}

namespace {

std::size_t step_count(double mesh, double horizon) {
    if (!(mesh > 0.0)) throw std::invalid_argument("sample path: mesh must be positive");
    if (horizon < 0.0) throw std::invalid_argument("sample path: negative horizon");
    if (horizon == 0.0) return 0;
    const double steps = horizon / mesh;
    const double rounded = std::round(steps);
    if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, steps))
        throw std::invalid_argument("sample path: mesh must divide the horizon");
    return static_cast<std::size_t>(rounded);
}

} // namespace

SamplePath sample_brownian(std::uint64_t seed, double mesh, int k_dim, double horizon) {
    const std::size_t n = step_count(mesh, horizon);
    if (k_dim <= 0) throw std::invalid_argument("sample_brownian: dimension must be positive");
    GaussianRng rng(seed);
    SamplePath p;
    p.k_dim = k_dim;
    p.times.resize(n + 1);
    p.values.assign((n + 1) * static_cast<std::size_t>(k_dim), 0.0);
    const double sd = std::sqrt(mesh);
    for (std::size_t i = 1; i <= n; ++i) {
        p.times[i] = static_cast<double>(i) * mesh;
        for (int j = 0; j < k_dim; ++j)
            p.values[i * k_dim + j] = p.values[(i - 1) * k_dim + j] + sd * rng.normal();
    }
    p.times[n] = horizon; // guard against accumulated roundoff
    return p;
}

double fbm_covariance(double s, double t, double hurst) {
    const double h2 = 2.0 * hurst;
    return 0.5 * (std::pow(s, h2) + std::pow(t, h2) - std::pow(std::abs(t - s), h2));
}

SamplePath sample_fbm(std::uint64_t seed, double mesh, int k_dim, double horizon, double hurst) {
    if (!(hurst > 0.5) || !(hurst < 1.0))
        throw std::invalid_argument("sample_fbm: Hurst parameter must lie in (1/2,1)");
    const std::size_t n = step_count(mesh, horizon);
    if (k_dim <= 0) throw std::invalid_argument("sample_fbm: dimension must be positive");
    if (n > 4096)
        throw std::invalid_argument(
            "sample_fbm: grid too fine for the dense Cholesky sampler (max 4096 steps)");

    SamplePath p;
    p.k_dim = k_dim;
    p.times.resize(n + 1);
    p.values.assign((n + 1) * static_cast<std::size_t>(k_dim), 0.0);
    for (std::size_t i = 0; i <= n; ++i) p.times[i] = static_cast<double>(i) * mesh;
    if (n == 0) return p;
    p.times[n] = horizon;

    // Cholesky factor of the covariance of (z_{t_1},...,z_{t_n})
    std::vector<double> chol(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = fbm_covariance(p.times[i + 1], p.times[j + 1], hurst);
            for (std::size_t m = 0; m < j; ++m) s -= chol[i * n + m] * chol[j * n + m];
            if (i == j) {
                if (s <= 0.0) throw std::runtime_error("sample_fbm: covariance not SPD");
                chol[i * n + i] = std::sqrt(s);
            } else {
                chol[i * n + j] = s / chol[j * n + j];
            }
        }
    }

    GaussianRng rng(seed);
    std::vector<double> g(n);
    for (int j = 0; j < k_dim; ++j) {
        for (std::size_t i = 0; i < n; ++i) g[i] = rng.normal();
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t m = 0; m <= i; ++m) acc += chol[i * n + m] * g[m];
            p.values[(i + 1) * k_dim + j] = acc;
        }
    }
    return p;
}

SamplePath sample_smooth(std::uint64_t seed, double mesh, int k_dim, double horizon) {
    const std::size_t n = step_count(mesh, horizon);
    if (k_dim <= 0) throw std::invalid_argument("sample_smooth: dimension must be positive");
    GaussianRng rng(seed);
    std::vector<double> amp(k_dim), freq(k_dim), phase(k_dim);
    for (int j = 0; j < k_dim; ++j) {
        amp[j] = 0.5 + 0.5 * rng.uniform();
        freq[j] = 2.0 + 3.0 * rng.uniform() + static_cast<double>(j);
        phase[j] = 2.0 * std::numbers::pi * rng.uniform();
    }
    SamplePath p;
    p.k_dim = k_dim;
    p.times.resize(n + 1);
    p.values.resize((n + 1) * static_cast<std::size_t>(k_dim));
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = std::min(static_cast<double>(i) * mesh, horizon);
        p.times[i] = t;
        for (int j = 0; j < k_dim; ++j)
            p.values[i * k_dim + j] = amp[j] * (std::sin(freq[j] * t + phase[j]) - std::sin(phase[j]));
    }
    p.times[n] = horizon;
    return p;
}

SamplePath sample_zero(double mesh, int k_dim, double horizon) {
    const std::size_t n = step_count(mesh, horizon);
    SamplePath p;
    p.k_dim = k_dim;
    p.times.resize(n + 1);
    p.values.assign((n + 1) * static_cast<std::size_t>(k_dim), 0.0);
    for (std::size_t i = 0; i <= n; ++i) p.times[i] = static_cast<double>(i) * mesh;
    p.times[n] = horizon;
    return p;
}

void write_path_csv(const SamplePath& p, std::ostream& os) {
    os << "t";
    for (int j = 0; j < p.k_dim; ++j) os << ",z" << (j + 1);
    os << "\n";
    os.precision(17);
    for (std::size_t i = 0; i < p.size(); ++i) {
        os << p.times[i];
        for (int j = 0; j < p.k_dim; ++j) os << "," << p.value(i, j);
        os << "\n";
    }
}

void write_path_csv_file(const SamplePath& p, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_path_csv_file: cannot open " + path);
    write_path_csv(p, os);
}

SamplePath read_path_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("read_path_csv: empty stream");
    int k = 0;
    {
        std::stringstream hs(line);
        std::string cell;
        bool first = true;
        while (std::getline(hs, cell, ',')) {
            if (first) {
                if (cell != "t") throw std::runtime_error("read_path_csv: bad header");
                first = false;
            } else {
                ++k;
            }
        }
    }
    SamplePath p;
    p.k_dim = k;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::string cell;
        if (!std::getline(ls, cell, ',')) break;
        p.times.push_back(std::stod(cell));
        for (int j = 0; j < k; ++j) {
            if (!std::getline(ls, cell, ','))
                throw std::runtime_error("read_path_csv: short row");
            p.values.push_back(std::stod(cell));
        }
    }
    p.validate();
    return p;
}

SamplePath read_path_csv_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("read_path_csv_file: cannot open " + path);
    return read_path_csv(is);
}

} // namespace roughns
