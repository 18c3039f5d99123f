#include "blowlab/constants.hpp"

#include <cmath>
#include <limits>

#include "blowlab/errors.hpp"
#include "blowlab/linsolve.hpp"
#include "blowlab/model.hpp"

namespace blowlab {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

std::string regime_name(Regime r) {
    switch (r) {
        case Regime::NegativeEnergy: return "NegativeEnergy";
        case Regime::Subcritical: return "Subcritical";
        case Regime::NotBlowupCertified: return "NotBlowupCertified";
    }
    return "NotBlowupCertified";
}

Regime regime_from_name(const std::string& name) {
    if (name == "NegativeEnergy") return Regime::NegativeEnergy;
    if (name == "Subcritical") return Regime::Subcritical;
    if (name == "NotBlowupCertified") return Regime::NotBlowupCertified;
    throw ConfigError("unknown regime name: " + name);
}

EigResult smallest_eigenpair(const TriDiag& K, const TriDiag& M, double tol,
                             int max_iter) {
    SpdSolver solver(K);
    EigResult out;
    StateVector x(K.size(), 1.0);
    double lambda_prev = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        StateVector y = solver.solve(M.matvec(x));
        const double mn = std::sqrt(M.quadform(y));
        if (!(mn > 0.0)) throw NoConvergenceError("smallest_eigenpair: degenerate iterate");
        for (double& v : y) v /= mn;
        const double lambda = K.quadform(y) / M.quadform(y);
        x = std::move(y);
        if (it > 1 && std::abs(lambda - lambda_prev) <= tol * std::abs(lambda)) {
            out.lambda = lambda;
            out.vec = std::move(x);
            out.iterations = it;
            return out;
        }
        lambda_prev = lambda;
    }
    throw NoConvergenceError("smallest_eigenpair: no convergence; mesh too coarse or tol too tight");
}

CstarResult estimate_Cstar(const RadialMesh& mesh, const DiscreteOperators& ops,
                           double p, double tol, int max_iter) {
    if (!(p >= 2.0)) throw ConfigError("estimate_Cstar: p must be >= 2");
    SpdSolver solver(ops.K);
    // Deterministic start: first Dirichlet eigenvector.
    StateVector u = smallest_eigenpair(ops.K, ops.M0, 1e-8).vec;
    {
        const double np = norm_p_fine(mesh, u, p, mesh.quad_order);
        for (double& v : u) v /= np;
    }
    double ratio_prev = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        StateVector w = solver.solve(assemble_nonlinear_load(mesh, u, p));
        const double np = norm_p_fine(mesh, w, p, mesh.quad_order);
        if (!(np > 0.0)) throw NoConvergenceError("estimate_Cstar: degenerate iterate");
        for (double& v : w) v /= np;
        const double grad = std::sqrt(ops.K.quadform(w));
        const double ratio = 1.0 / grad;  // ||w||_p = 1
        u = std::move(w);
        if (it > 1 && std::abs(ratio - ratio_prev) <= tol * ratio)
            return {ratio, std::move(u), it};
        ratio_prev = ratio;
    }
    throw NoConvergenceError("estimate_Cstar: no convergence; mesh too coarse or tol too tight");
}

double estimate_Cstarstar(const RadialMesh& mesh, const DiscreteOperators& ops,
                          double tol, int* iterations, int max_iter) {
    (void)mesh;
    EigResult eig = smallest_eigenpair(ops.K, ops.Ms, tol, max_iter);
    if (iterations) *iterations = eig.iterations;
    return 1.0 / eig.lambda;
}

double mountain_pass_d(double Cstar, double p) {
    if (!(Cstar > 0.0)) throw ConfigError("mountain_pass_d: Cstar must be positive");
    return (p - 2.0) / (2.0 * p) * std::pow(Cstar, -2.0 * p / (p - 2.0));
}

double solve_theta2(double J0, double Cstar, double p) {
    const double d = mountain_pass_d(Cstar, p);
    const double theta1 = std::pow(Cstar, -2.0 / (p - 2.0));
    if (J0 < 0.0 || J0 > d)
        throw OutOfRegimeError("solve_theta2: requires 0 <= J0 < d");
    if (J0 >= d * (1.0 - 1e-14)) return theta1;  // degenerate bracket
    // Bracket [theta1, theta_big] on the decreasing branch, then bisect.
    double lo = theta1, hi = 2.0 * theta1;
    while (eval_h(hi, Cstar, p) > J0) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (eval_h(mid, Cstar, p) > J0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-12 * hi) break;
    }
    return 0.5 * (lo + hi);
}

double compute_theta0(double J0, double Cstar, double p) {
    const double d = mountain_pass_d(Cstar, p);
    if (J0 < 0.0 || J0 >= d)
        throw OutOfRegimeError("compute_theta0: requires 0 <= J0 < d");
    return std::pow(0.5 * p - p * std::pow(Cstar, 2.0 * p / (p - 2.0)) * J0,
                    1.0 / (p - 2.0));
}

double compute_C1(double J0, double theta0, double p) {
    if (J0 < 0.0) return p;
    const double t0p = std::pow(theta0, p);
    return (t0p - 1.0) * (p - 2.0) / t0p + 2.0;
}

double compute_C2(double J0, double theta0, double Cstarstar, double p) {
    if (J0 < 0.0) return (p - 2.0) / (Cstarstar + 1.0);
    const double t02 = theta0 * theta0;
    return (p - 2.0) * (t02 - 1.0) / (t02 * (Cstarstar + 1.0));
}

ConstantsReport build_constants_report(const RadialMesh& mesh,
                                       const DiscreteOperators& ops,
                                       const StateVector& u0,
                                       const ConstantsOptions& opt) {
    const double p = mesh.params.p;
    ConstantsReport rep;

    CstarResult cs = estimate_Cstar(mesh, ops, p, opt.tol_Cstar);
    rep.Cstar = cs.Cstar;
    rep.cstar_prov = {"ground-state fixed-point iteration", mesh.num_elements(),
                      opt.tol_Cstar, cs.iterations};

    int css_iters = 0;
    rep.Cstarstar = estimate_Cstarstar(mesh, ops, opt.tol_Cstarstar, &css_iters);
    rep.cstarstar_prov = {"inverse power iteration on (K, Ms)", mesh.num_elements(),
                          opt.tol_Cstarstar, css_iters};

    rep.d = mountain_pass_d(rep.Cstar, p);
    rep.theta1 = std::pow(rep.Cstar, -2.0 / (p - 2.0));

    const Norms norms = discrete_norms(mesh, ops, u0, p);
    rep.norm_p0 = norms.p;
    rep.norm_grad0 = norms.grad;
    rep.J0 = eval_J(norms.grad, norms.p, p);
    rep.I0 = eval_I(norms.grad, norms.p, p);
    rep.H0 = 0.5 * (norms.weighted_l2 + norms.grad * norms.grad);

    if (rep.J0 < 0.0) {
        rep.theta2 = kNaN;
        rep.theta0 = kNaN;
        rep.second_branch = false;
        rep.G0 = -rep.J0;
    } else if (rep.J0 < rep.d) {
        rep.theta2 = solve_theta2(rep.J0, rep.Cstar, p);
        rep.theta0 = compute_theta0(rep.J0, rep.Cstar, p);
        rep.second_branch = true;
        rep.G0 = rep.d - rep.J0;
    } else {
        rep.theta2 = kNaN;
        rep.theta0 = kNaN;
        rep.second_branch = true;
        rep.G0 = rep.d - rep.J0;  // nonpositive; not a certified regime
    }
    if (rep.J0 < rep.d) {
        rep.C1 = compute_C1(rep.J0, rep.theta0, p);
        rep.C2 = compute_C2(rep.J0, rep.theta0, rep.Cstarstar, p);
    } else {
        rep.C1 = kNaN;
        rep.C2 = kNaN;
    }

    if (rep.J0 < 0.0)
        rep.regime = Regime::NegativeEnergy;
    else if (rep.J0 < rep.d && rep.I0 < -opt.i_margin)
        rep.regime = Regime::Subcritical;
    else
        rep.regime = Regime::NotBlowupCertified;
    return rep;
}

namespace {

nlohmann::ordered_json prov_json(const Provenance& pr) {
    return {{"estimator", pr.estimator},
            {"mesh_M", pr.mesh_M},
            {"tol", pr.tol},
            {"iterations", pr.iterations}};
}

Provenance prov_from(const nlohmann::json& j) {
    Provenance pr;
    pr.estimator = j.value("estimator", "");
    pr.mesh_M = j.value("mesh_M", 0);
    pr.tol = j.value("tol", 0.0);
    pr.iterations = j.value("iterations", 0);
    return pr;
}

double json_num(const nlohmann::json& j, const char* key) {
    const auto& v = j.at(key);
    return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

nlohmann::ordered_json num_or_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

}  // namespace

nlohmann::ordered_json ConstantsReport::to_json() const {
    nlohmann::ordered_json j;
    j["Cstar"] = Cstar;
    j["Cstarstar"] = Cstarstar;
    j["d"] = d;
    j["theta1"] = theta1;
    j["theta2"] = num_or_null(theta2);
    j["theta0"] = num_or_null(theta0);
    j["C1"] = num_or_null(C1);
    j["C2"] = num_or_null(C2);
    j["G0"] = G0;
    j["H0"] = H0;
    j["J0"] = J0;
    j["I0"] = I0;
    j["norm_p0"] = norm_p0;
    j["norm_grad0"] = norm_grad0;
    j["regime"] = regime_name(regime);
    j["second_branch"] = second_branch;
    j["provenance"] = {{"Cstar", prov_json(cstar_prov)},
                       {"Cstarstar", prov_json(cstarstar_prov)}};
    j["note"] = "Cstar and Cstarstar are discrete subspace estimates; both "
                "under-approximate the continuum constants.";
    return j;
}

ConstantsReport ConstantsReport::from_json(const nlohmann::json& j) {
    ConstantsReport rep;
    rep.Cstar = json_num(j, "Cstar");
    rep.Cstarstar = json_num(j, "Cstarstar");
    rep.d = json_num(j, "d");
    rep.theta1 = json_num(j, "theta1");
    rep.theta2 = json_num(j, "theta2");
    rep.theta0 = json_num(j, "theta0");
    rep.C1 = json_num(j, "C1");
    rep.C2 = json_num(j, "C2");
    rep.G0 = json_num(j, "G0");
    rep.H0 = json_num(j, "H0");
    rep.J0 = json_num(j, "J0");
    rep.I0 = json_num(j, "I0");
    rep.norm_p0 = json_num(j, "norm_p0");
    rep.norm_grad0 = json_num(j, "norm_grad0");
    rep.regime = regime_from_name(j.at("regime").get<std::string>());
    rep.second_branch = j.value("second_branch", false);
    if (j.contains("provenance")) {
        rep.cstar_prov = prov_from(j["provenance"].at("Cstar"));
        rep.cstarstar_prov = prov_from(j["provenance"].at("Cstarstar"));
    }
    return rep;
}

}  // namespace blowlab
