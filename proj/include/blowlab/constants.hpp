#pragma once

// Estimation of every constant in the blowup theory: the embedding constants
// C*, C**, the mountain-pass level d, the thresholds theta1/theta2/theta0,
// and the blowup-bound constants C1, C2.

#include <string>

#include "blowlab/assembly.hpp"

#include "json.hpp"

namespace blowlab {

enum class Regime { NegativeEnergy, Subcritical, NotBlowupCertified };

std::string regime_name(Regime r);
Regime regime_from_name(const std::string& name);

struct Provenance {
    std::string estimator;
    int mesh_M = 0;
    double tol = 0.0;
    int iterations = 0;
};

struct ConstantsReport {
    double Cstar = 0.0;
    double Cstarstar = 0.0;
    double d = 0.0;
    double theta1 = 0.0;
    double theta2 = 0.0;  // NaN outside [0, d) energies
    double theta0 = 0.0;  // NaN when J0 < 0
    double C1 = 0.0;
    double C2 = 0.0;
    double G0 = 0.0;
    double H0 = 0.0;
    double J0 = 0.0;
    double I0 = 0.0;
    double norm_p0 = 0.0;
    double norm_grad0 = 0.0;
    Regime regime = Regime::NotBlowupCertified;
    bool second_branch = false;  // which C1/C2 branch fired
    Provenance cstar_prov, cstarstar_prov;

    nlohmann::ordered_json to_json() const;
    static ConstantsReport from_json(const nlohmann::json& j);
};

struct CstarResult {
    double Cstar = 0.0;
    StateVector extremal;  // normalized so ||u_h||_p = 1
    int iterations = 0;
};

// Discrete best constant in ||u||_p <= C* ||grad u||_2, via the normalized
// inverse fixed-point iteration u <- K^{-1} F(u) started from the first
// Dirichlet eigenvector. p = 2 reduces to inverse power iteration.
CstarResult estimate_Cstar(const RadialMesh& mesh, const DiscreteOperators& ops,
                           double p, double tol, int max_iter = 2000);

// Discrete best constant in int u^2/|x|^s <= C** ||grad u||_2^2, i.e. the
// reciprocal of the smallest generalized eigenvalue of (K, Ms).
double estimate_Cstarstar(const RadialMesh& mesh, const DiscreteOperators& ops,
                          double tol, int* iterations = nullptr,
                          int max_iter = 100000);

// First Dirichlet eigenpair of (K, M0); eigenvector normalized in M0.
struct EigResult {
    double lambda = 0.0;
    StateVector vec;
    int iterations = 0;
};
EigResult smallest_eigenpair(const TriDiag& K, const TriDiag& M, double tol,
                             int max_iter = 100000);

// d = ((p-2)/2p) C*^{-2p/(p-2)}
double mountain_pass_d(double Cstar, double p);

// Root of h(theta) = J0 on the decreasing branch (theta1, inf).
double solve_theta2(double J0, double Cstar, double p);

// theta0 = (p/2 - p C*^{2p/(p-2)} J0)^{1/(p-2)}
double compute_theta0(double J0, double Cstar, double p);

// C1 = p when J0 < 0; (theta0^p - 1)(p-2)/theta0^p + 2 when 0 <= J0 < d.
double compute_C1(double J0, double theta0, double p);

// C2 = (p-2)/(C**+1) when J0 < 0; (p-2)(theta0^2-1)/(theta0^2 (C**+1)) else.
double compute_C2(double J0, double theta0, double Cstarstar, double p);

struct ConstantsOptions {
    double tol_Cstar = 1e-10;
    double tol_Cstarstar = 1e-12;
    double i_margin = 0.0;  // certify blowup only when I(u0) < -i_margin
};

ConstantsReport build_constants_report(const RadialMesh& mesh,
                                       const DiscreteOperators& ops,
                                       const StateVector& u0,
                                       const ConstantsOptions& opt = {});

}  // namespace blowlab
