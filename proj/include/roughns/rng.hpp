#pragma once

#include <cstdint>
#include <random>

namespace roughns {

/// Seeded Gaussian generator. Box-Muller on top of mt19937_64 so that
/// streams are identical across standard library implementations.
class GaussianRng {
public:
    explicit GaussianRng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform on (0,1), never returning 0.
    double uniform() {
        const std::uint64_t v = eng_();
        return (static_cast<double>(v >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace roughns
