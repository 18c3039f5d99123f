#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "blowlab/constants.hpp"
#include "blowlab/model.hpp"

using namespace blowlab;

namespace {

const ModelParams kBall{3, 1.0, 4.0, 1.0};

struct Lab {
    RadialMesh mesh;
    DiscreteOperators ops;
};

Lab make_lab(int M, double grading = 2.0, double s = 1.0) {
    ModelParams params = kBall;
    params.s = s;
    Lab lab;
    lab.mesh = build_mesh(params, M, grading);
    lab.ops = assemble_operators(lab.mesh);
    return lab;
}

}  // namespace

TEST_CASE("Cstar estimator reproduces the linear eigenvalue limit at p = 2") {
    Lab lab = make_lab(400);
    CstarResult res = estimate_Cstar(lab.mesh, lab.ops, 2.0, 1e-10);
    CHECK(res.Cstar == doctest::Approx(1.0 / std::numbers::pi).epsilon(0.01));
}

TEST_CASE("Cstar ratio is scale invariant") {
    Lab lab = make_lab(100);
    CstarResult res = estimate_Cstar(lab.mesh, lab.ops, 4.0, 1e-10);
    StateVector scaled(res.extremal);
    for (double& v : scaled) v *= 2.0;
    const Norms n1 = discrete_norms(lab.mesh, lab.ops, res.extremal, 4.0);
    const Norms n2 = discrete_norms(lab.mesh, lab.ops, scaled, 4.0);
    CHECK(n2.p / n2.grad == doctest::Approx(n1.p / n1.grad).epsilon(1e-12));
}

TEST_CASE("mountain-pass consistency of d with the extremal ray peak") {
    // Golden-section maximization of J along the extremal ray is the
    // independent oracle for d = ((p-2)/2p) Cstar^{-2p/(p-2)}.
    for (double p : {3.0, 4.0, 5.0}) {
        Lab lab = make_lab(200);
        CstarResult res = estimate_Cstar(lab.mesh, lab.ops, p, 1e-10);
        const Norms nm = discrete_norms(lab.mesh, lab.ops, res.extremal, p);
        const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
        double lo = 0.0, hi = 4.0 * ray_lambda_nehari(nm.grad, nm.p, p);
        for (int it = 0; it < 300; ++it) {
            const double x1 = hi - gr * (hi - lo);
            const double x2 = lo + gr * (hi - lo);
            if (ray_scaling(x1, nm.grad, nm.p, p).J < ray_scaling(x2, nm.grad, nm.p, p).J)
                lo = x1;
            else
                hi = x2;
        }
        const double sup_J = ray_scaling(0.5 * (lo + hi), nm.grad, nm.p, p).J;
        const double d = mountain_pass_d(res.Cstar, p);
        CHECK(std::abs(d - sup_J) / d <= 1e-6);
    }
}

TEST_CASE("Cstarstar oracle values on the unit ball") {
    const double pi2 = std::numbers::pi * std::numbers::pi;

    Lab s0 = make_lab(400, 2.0, 0.0);
    const double css0 = estimate_Cstarstar(s0.mesh, s0.ops, 1e-12);
    CHECK(css0 == doctest::Approx(1.0 / pi2).epsilon(0.01));

    // s = 0 is exactly the (K, M0) eigenproblem.
    EigResult eig = smallest_eigenpair(s0.ops.K, s0.ops.M0, 1e-12);
    CHECK(css0 == doctest::Approx(1.0 / eig.lambda).epsilon(1e-10));

    // Hardy case: bounded by the exact constant 4, monotone under refinement.
    double prev = 0.0;
    for (int M : {100, 200, 400}) {
        Lab s2 = make_lab(M, 2.0, 2.0);
        const double css2 = estimate_Cstarstar(s2.mesh, s2.ops, 1e-12);
        CHECK(css2 <= 4.0 * (1.0 + 1e-6));
        CHECK(css2 > prev);
        prev = css2;
    }
}

TEST_CASE("Cstar increases under nested refinement") {
    double prev = 0.0;
    for (int M : {50, 100, 200}) {
        Lab lab = make_lab(M);
        const double cs = estimate_Cstar(lab.mesh, lab.ops, 4.0, 1e-10).Cstar;
        CHECK(cs > prev);
        prev = cs;
    }
}

TEST_CASE("mountain_pass_d formula values") {
    CHECK(mountain_pass_d(1.0, 4.0) == doctest::Approx(0.25));
    CHECK(mountain_pass_d(1.0, 3.0) == doctest::Approx(1.0 / 6.0));
    double prev = mountain_pass_d(0.5, 4.0);
    for (double c : {1.0, 1.5, 2.0}) {
        const double v = mountain_pass_d(c, 4.0);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("solve_theta2") {
    // Closed-form root of theta^2/2 = theta^4/4 on the decreasing branch.
    CHECK(solve_theta2(0.0, 1.0, 4.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));

    // Degenerate bracket at J0 = d.
    const double d = mountain_pass_d(1.0, 4.0);
    CHECK(solve_theta2(d, 1.0, 4.0) == doctest::Approx(1.0).epsilon(1e-10));

    CHECK_THROWS_AS(solve_theta2(-0.1, 1.0, 4.0), OutOfRegimeError);
    CHECK_THROWS_AS(solve_theta2(2.0 * d, 1.0, 4.0), OutOfRegimeError);

    // Self-consistency h(theta2) = J0 for random J0 in (0, d).
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    const double Cstar = 0.8, p = 3.6;
    const double dd = mountain_pass_d(Cstar, p);
    for (int i = 0; i < 50; ++i) {
        const double J0 = dist(rng) * dd * 0.999;
        const double theta2 = solve_theta2(J0, Cstar, p);
        CHECK(eval_h(theta2, Cstar, p) == doctest::Approx(J0).epsilon(1e-10));
    }
}

TEST_CASE("compute_theta0") {
    CHECK(compute_theta0(0.0, 1.0, 4.0) == doctest::Approx(std::sqrt(2.0)));
    const double d = mountain_pass_d(1.0, 4.0);
    CHECK(compute_theta0(d * (1 - 1e-12), 1.0, 4.0) == doctest::Approx(1.0).epsilon(1e-5));

    // theta2/theta1 >= theta0 across random subcritical energies.
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    const double Cstar = 1.1, p = 4.3;
    const double dd = mountain_pass_d(Cstar, p);
    const double theta1 = std::pow(Cstar, -2.0 / (p - 2.0));
    for (int i = 0; i < 50; ++i) {
        const double J0 = dist(rng) * dd * 0.999;
        const double theta2 = solve_theta2(J0, Cstar, p);
        const double theta0 = compute_theta0(J0, Cstar, p);
        CHECK(theta0 > 1.0);
        CHECK(theta2 / theta1 >= theta0 * (1 - 1e-10));
    }
}

TEST_CASE("C1 and C2 branch values") {
    CHECK(compute_C1(-0.1, 0.0, 4.0) == doctest::Approx(4.0));
    // J0 = 0, p = 4: theta0 = sqrt(2), theta0^4 = 4 -> 6/4 + 2 = 3.5.
    const double theta0 = compute_theta0(0.0, 1.0, 4.0);
    CHECK(compute_C1(0.0, theta0, 4.0) == doctest::Approx(3.5));

    // C1 -> 2 as J0 -> d (theta0 -> 1).
    CHECK(compute_C1(0.0, 1.0 + 1e-9, 4.0) == doctest::Approx(2.0).epsilon(1e-6));

    CHECK(compute_C2(-0.5, 0.0, 1.0, 4.0) == doctest::Approx(1.0));
    CHECK(compute_C2(0.0, std::sqrt(2.0), 1.0, 4.0) == doctest::Approx(0.5));
    // C2 > 0 whenever theta0 > 1.
    for (double t0 : {1.001, 1.5, 3.0})
        CHECK(compute_C2(0.1, t0, 2.7, 3.2) > 0.0);
}

TEST_CASE("constants report regimes") {
    Lab lab = make_lab(100);

    StateVector zero(lab.mesh.num_dofs(), 0.0);
    ConstantsReport rz = build_constants_report(lab.mesh, lab.ops, zero);
    CHECK(rz.regime == Regime::NotBlowupCertified);

    // Scale the extremal past the negative-energy threshold.
    CstarResult ext = estimate_Cstar(lab.mesh, lab.ops, 4.0, 1e-10);
    const Norms nm = discrete_norms(lab.mesh, lab.ops, ext.extremal, 4.0);
    const double lam = 1.3 * ray_lambda_negative_energy(nm.grad, nm.p, 4.0);
    StateVector u0(ext.extremal);
    for (double& v : u0) v *= lam;
    ConstantsReport rn = build_constants_report(lab.mesh, lab.ops, u0);
    CHECK(rn.regime == Regime::NegativeEnergy);
    CHECK(rn.J0 < 0.0);
    CHECK(rn.C1 == doctest::Approx(4.0));
    CHECK(rn.G0 == doctest::Approx(-rn.J0));
}

TEST_CASE("constants report invariants on random admissible states") {
    Lab lab = make_lab(80);
    const double p = lab.mesh.params.p;
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        // Random smooth profile, scaled into I < 0.
        const double c1 = 0.5 + dist(rng), c2 = dist(rng) - 0.5;
        StateVector base = interpolate(lab.mesh, [&](double r) {
            const double w = 1 - (r / lab.mesh.params.R) * (r / lab.mesh.params.R);
            return w * (c1 + c2 * r);
        });
        const Norms bn = discrete_norms(lab.mesh, lab.ops, base, p);
        const double lam =
            ray_lambda_nehari(bn.grad, bn.p, p) * (1.05 + 2.0 * dist(rng));
        StateVector u0(base);
        for (double& v : u0) v *= lam;

        ConstantsReport rep = build_constants_report(lab.mesh, lab.ops, u0);
        CHECK(rep.Cstar > 0.0);
        CHECK(rep.Cstarstar > 0.0);
        CHECK(rep.d == doctest::Approx(mountain_pass_d(rep.Cstar, p)).epsilon(1e-14));
        CHECK(rep.theta1 == doctest::Approx(std::pow(rep.Cstar, -2.0 / (p - 2.0))));
        if (rep.regime != Regime::NotBlowupCertified) {
            CHECK(rep.C1 > 2.0);
            CHECK(rep.C2 > 0.0);
            CHECK(rep.G0 > 0.0);
            if (rep.regime == Regime::NegativeEnergy) CHECK(rep.C1 == doctest::Approx(p));
            if (rep.regime == Regime::Subcritical) {
                CHECK(rep.theta2 > rep.theta1);
                CHECK(rep.theta0 > 1.0);
                CHECK(rep.second_branch);
            }
        }
    }
}

TEST_CASE("constants report JSON round trip") {
    Lab lab = make_lab(60);
    CstarResult ext = estimate_Cstar(lab.mesh, lab.ops, 4.0, 1e-10);
    const Norms nm = discrete_norms(lab.mesh, lab.ops, ext.extremal, 4.0);
    const double lam = 1.2 * ray_lambda_negative_energy(nm.grad, nm.p, 4.0);
    StateVector u0(ext.extremal);
    for (double& v : u0) v *= lam;
    ConstantsReport rep = build_constants_report(lab.mesh, lab.ops, u0);

    ConstantsReport back = ConstantsReport::from_json(rep.to_json());
    CHECK(back.Cstar == rep.Cstar);
    CHECK(back.Cstarstar == rep.Cstarstar);
    CHECK(back.J0 == rep.J0);
    CHECK(back.regime == rep.regime);
    CHECK(std::isnan(back.theta2) == std::isnan(rep.theta2));
}
