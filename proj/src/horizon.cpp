#include "roughns/horizon.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace roughns {

double bihari_w(double y, const HorizonConstants& c) {
    if (c.riccati_only) return y * y;
    const double y2 = y * y;
    const double y6 = y2 * y2 * y2;
    const double y8 = y6 * y2;
    const double y10 = y8 * y2;
    const double expo = c.growth * std::pow(1.0 + y, c.p);
    const double head = expo > 700.0 ? std::numeric_limits<double>::infinity() : std::exp(expo);
    return (1.0 + c.mean0_abs) * head * y8 + y10 + (1.0 + c.interp * c.young) * y6 + y2;
}

namespace {

double recip_w(double y, const HorizonConstants& c) {
    const double w = bihari_w(y, c);
    return std::isfinite(w) && w > 0.0 ? 1.0 / w : 0.0;
}

double adaptive_simpson(double a, double b, double fa, double fm, double fb, double whole,
                        double tol, int depth, const HorizonConstants& c) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = recip_w(lm, c);
    const double frm = recip_w(rm, c);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, c) +
           adaptive_simpson(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, c);
}

double integrate_recip_w(double a, double b, double tol, const HorizonConstants& c) {
    const double fa = recip_w(a, c);
    const double fb = recip_w(b, c);
    const double m = 0.5 * (a + b);
    const double fm = recip_w(m, c);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(a, b, fa, fm, fb, whole, tol, 48, c);
}

} // namespace

double tstar_estimate(double g0, const HorizonConstants& c) {
    if (!(g0 > 0.0)) throw std::invalid_argument("tstar_estimate: initial value must be positive");
    if (!(c.q > 0.0)) throw std::invalid_argument("tstar_estimate: q must be positive");
    if (c.growth < 0.0) throw std::invalid_argument("tstar_estimate: negative growth constant");
    if (c.growth == 0.0 && !c.riccati_only)
        return std::numeric_limits<double>::infinity();

    const double y0 = c.q * g0;
    // integrate 1/w from y0 to infinity in geometric panels; w >= y^2 bounds
    // the tail by 1/Y
    double acc = 0.0;
    double lo = y0;
    const double tol = 1e-12;
    for (int panel = 0; panel < 200; ++panel) {
        const double hi = lo * 4.0;
        acc += integrate_recip_w(lo, hi, tol * std::max(1.0, acc), c);
        lo = hi;
        if (1.0 / lo < 1e-11 * std::max(acc, 1e-30) || lo > 1e18) break;
    }
    acc += 1.0 / lo; // tail bound remainder estimate using w ~ y^2 at worst
    if (!std::isfinite(acc) || acc <= 0.0)
        throw std::runtime_error("tstar_estimate: quadrature failed (no finite horizon)");
    const double rate = c.growth == 0.0 ? 1.0 : c.growth;
    return acc / (rate * c.q);
}

double tstar_ode_oracle(double g0, const HorizonConstants& c) {
    if (!(g0 > 0.0)) throw std::invalid_argument("tstar_ode_oracle: initial value must be positive");
    const double rate = (c.growth == 0.0 ? 1.0 : c.growth) * c.q;
    double y = c.q * g0;
    double t = 0.0;
    auto f = [&](double yy) {
        const double w = bihari_w(yy, c);
        return std::isfinite(w) ? rate * w : std::numeric_limits<double>::infinity();
    };
    for (long it = 0; it < 20000000; ++it) {
        const double slope = f(y);
        if (!std::isfinite(slope) || y > 1e15) break;
        // relative-growth-limited step
        double h = 2e-4 * y / slope;
        const double k1 = slope;
        const double k2 = f(y + 0.5 * h * k1);
        const double k3 = f(y + 0.5 * h * k2);
        const double k4 = f(y + h * k3);
        if (!std::isfinite(k2) || !std::isfinite(k3) || !std::isfinite(k4)) {
            // shrink into the finite region
            h *= 0.25;
            y += h * k1;
            t += h;
            continue;
        }
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += h;
    }
    // remaining time to blow up from y, bounding w below by y^2
    t += 1.0 / (rate * y);
    return t;
}

GronwallBound rough_gronwall_bound(const std::vector<double>& samples, const Control& omega,
                                   double L, double kappa, double phi_total, double K) {
    if (samples.empty()) throw std::invalid_argument("rough_gronwall_bound: no samples");
    if (!(L > 0.0) || !(kappa > 0.0))
        throw std::invalid_argument("rough_gronwall_bound: L and kappa must be positive");
    GronwallBound out;
    out.alpha = std::max(1.0, std::pow(2.0 * std::exp(2.0), -kappa) / L);
    const double total = omega.total();
    out.bound = 2.0 * std::exp(total / (L * out.alpha)) * (samples.front() + K * phi_total);
    for (double g : samples) {
        const double excess = g - out.bound;
        if (excess > out.worst_excess) out.worst_excess = excess;
    }
    out.violated = out.worst_excess > 1e-12 * std::max(1.0, out.bound);
    return out;
}

} // namespace roughns
