#pragma once

#include "roughns/rough_path.hpp"

#include <vector>

namespace roughns {

/// Calibration constants of the 3d continuation estimate. The comparison
/// function is
///   w(y) = (1+|mean0|) exp{C (1+y)^p} y^8 + y^10 + (1 + C3*Ceps) y^6 + y^2
/// and the blow-up comparison ODE is ydot = C q w(y), y(0) = q g0.
struct HorizonConstants {
    double growth = 1.0;    // C
    double interp = 1.0;    // C3
    double young = 1.0;     // Ceps
    double p = 2.5;
    double q = 2.0;         // Gronwall amplification
    double mean0_abs = 0.0; // |mean velocity at time zero|
    bool riccati_only = false; // use w(y) = y^2 (closed-form cross-check)
};

double bihari_w(double y, const HorizonConstants& c);

/// Largest horizon T* with W(q g0) + T* C q inside the domain of W^{-1},
/// where W(y) is the antiderivative of 1/w from the baseline q g0. Evaluated
/// by adaptive quadrature of the integral of 1/w to infinity. Returns +inf
/// when the growth constant vanishes.
double tstar_estimate(double g0, const HorizonConstants& c);

/// Blow-up time of ydot = C q w(y), y(0) = q g0, by adaptive fourth-order
/// stepping; independent cross-check of tstar_estimate.
double tstar_ode_oracle(double g0, const HorizonConstants& c);

struct GronwallBound {
    double bound = 0.0;
    double alpha = 0.0;
    bool violated = false;
    double worst_excess = 0.0; // max over samples of G_t - bound
};

/// Evaluates 2 exp{omega(0,T)/(L alpha)} (G_0 + K phi_total) with
/// alpha = max(1, L^{-1} (2 e^2)^{-kappa}) and flags samples above it.
GronwallBound rough_gronwall_bound(const std::vector<double>& samples, const Control& omega,
                                   double L, double kappa, double phi_total, double K = 1.0);

} // namespace roughns
