#pragma once

// Scalar model data: problem parameters and the energy/Nehari functionals.
// Everything here is a pure formula over precomputed norms; all
// discretization error lives in how the norms are obtained.

#include <cmath>

#include "blowlab/errors.hpp"

namespace blowlab {

struct ModelParams {
    int n = 3;        // spatial dimension, n >= 3
    double s = 1.0;   // singular-potential exponent, 0 <= s <= 2
    double p = 4.0;   // nonlinearity exponent, 2 < p < 2n/(n-2)
    double R = 1.0;   // ball radius

    void validate() const {
        if (n < 3) throw ConfigError("ModelParams: n must be >= 3");
        if (s < 0.0 || s > 2.0) throw ConfigError("ModelParams: s must lie in [0,2]");
        const double p_crit = 2.0 * n / (n - 2.0);
        if (!(p > 2.0 && p < p_crit))
            throw ConfigError("ModelParams: p must lie in (2, 2n/(n-2))");
        if (!(R > 0.0)) throw ConfigError("ModelParams: R must be positive");
    }
};

// One sample of all monitored scalars along a trajectory.
struct FunctionalSnapshot {
    double t = 0.0;
    double J = 0.0;           // energy
    double I = 0.0;           // Nehari functional
    double H = 0.0;           // (weighted_l2 + norm_grad^2)/2
    double G = 0.0;           // gap functional (regime dependent)
    double norm_p = 0.0;      // L^p norm of u
    double norm_grad = 0.0;   // L^2 norm of grad u
    double weighted_l2 = 0.0; // integral of u^2/|x|^s
};

// J(u) = |grad u|^2/2 - |u|_p^p / p
inline double eval_J(double norm_grad, double norm_p, double p) {
    return 0.5 * norm_grad * norm_grad - std::pow(norm_p, p) / p;
}

// I(u) = |grad u|^2 - |u|_p^p
inline double eval_I(double norm_grad, double norm_p, double p) {
    return norm_grad * norm_grad - std::pow(norm_p, p);
}

// h(theta) = theta^2/(2 C*^2) - theta^p/p; maximized at theta1 = C*^(-2/(p-2))
// with h(theta1) = d.
inline double eval_h(double theta, double Cstar, double p) {
    return theta * theta / (2.0 * Cstar * Cstar) - std::pow(theta, p) / p;
}

struct RayValues {
    double J = 0.0;
    double I = 0.0;
};

// Closed-form J(lambda*u), I(lambda*u) along the ray through a state with the
// given norms.
inline RayValues ray_scaling(double lambda, double norm_grad, double norm_p, double p) {
    const double g2 = lambda * lambda * norm_grad * norm_grad;
    const double pp = std::pow(lambda * norm_p, p);
    return {0.5 * g2 - pp / p, g2 - pp};
}

// lambda beyond which I(lambda*u) < 0.
inline double ray_lambda_nehari(double norm_grad, double norm_p, double p) {
    return std::pow(norm_grad * norm_grad / std::pow(norm_p, p), 1.0 / (p - 2.0));
}

// lambda beyond which J(lambda*u) < 0.
inline double ray_lambda_negative_energy(double norm_grad, double norm_p, double p) {
    return std::pow(p * norm_grad * norm_grad / (2.0 * std::pow(norm_p, p)),
                    1.0 / (p - 2.0));
}

// sup over lambda >= 0 of J(lambda*u), attained at lambda = ray_lambda_nehari.
inline double ray_peak_energy(double norm_grad, double norm_p, double p) {
    const double lam = ray_lambda_nehari(norm_grad, norm_p, p);
    return (p - 2.0) / (2.0 * p) * lam * lam * norm_grad * norm_grad;
}

}  // namespace blowlab
