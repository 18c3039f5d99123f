#include "doctest.h"

#include <cmath>

#include "blowlab/model.hpp"

using namespace blowlab;

TEST_CASE("eval_J basic values") {
    CHECK(eval_J(0, 0, 4) == doctest::Approx(0.0));
    CHECK(eval_J(1, 0, 4) == doctest::Approx(0.5));
    CHECK(eval_J(1, 1, 4) == doctest::Approx(0.25));
}

TEST_CASE("eval_I basic values") {
    CHECK(eval_I(0, 0, 4) == doctest::Approx(0.0));
    CHECK(eval_I(1, 1, 4) == doctest::Approx(0.0));
    CHECK(eval_I(1, 2, 4) == doctest::Approx(-15.0));
}

TEST_CASE("eval_h values and critical point") {
    CHECK(eval_h(0, 1, 4) == doctest::Approx(0.0));
    // theta1 = 1 for Cstar = 1, and h(theta1) = d = 0.25 at p = 4.
    CHECK(eval_h(1, 1, 4) == doctest::Approx(0.25));

    // h'(theta1) = 0 by central difference.
    const double Cstar = 0.7, p = 3.5;
    const double theta1 = std::pow(Cstar, -2.0 / (p - 2.0));
    const double eps = 1e-6 * theta1;
    const double deriv =
        (eval_h(theta1 + eps, Cstar, p) - eval_h(theta1 - eps, Cstar, p)) / (2 * eps);
    CHECK(std::abs(deriv) < 1e-7);
}

TEST_CASE("eval_h equals eval_J under the embedding substitution") {
    const double Cstar = 0.8, p = 3.3;
    for (double theta : {0.1, 0.7, 1.3, 2.9}) {
        CHECK(eval_h(theta, Cstar, p) ==
              doctest::Approx(eval_J(theta / Cstar, theta, p)).epsilon(1e-14));
    }
}

TEST_CASE("eval_h is unimodal about theta1") {
    const double Cstar = 1.2, p = 4.5;
    const double theta1 = std::pow(Cstar, -2.0 / (p - 2.0));
    double prev = eval_h(0.0, Cstar, p);
    for (int k = 1; k <= 50; ++k) {
        const double theta = theta1 * k / 50.0;
        const double v = eval_h(theta, Cstar, p);
        CHECK(v > prev);
        prev = v;
    }
    prev = eval_h(theta1, Cstar, p);
    for (int k = 1; k <= 50; ++k) {
        const double theta = theta1 * (1.0 + 2.0 * k / 50.0);
        const double v = eval_h(theta, Cstar, p);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("ray_scaling endpoints and sign change") {
    const double p = 4.0;
    auto z = ray_scaling(0.0, 2.0, 3.0, p);
    CHECK(z.J == doctest::Approx(0.0));
    CHECK(z.I == doctest::Approx(0.0));

    auto one = ray_scaling(1.0, 2.0, 3.0, p);
    CHECK(one.J == doctest::Approx(eval_J(2.0, 3.0, p)));
    CHECK(one.I == doctest::Approx(eval_I(2.0, 3.0, p)));

    // With unit norms, I(lambda u) < 0 iff lambda > 1.
    CHECK(ray_scaling(1.01, 1.0, 1.0, p).I < 0.0);
    CHECK(ray_scaling(0.99, 1.0, 1.0, p).I > 0.0);
}

TEST_CASE("ray Nehari threshold property") {
    const double p = 3.7, a = 1.4, b = 0.9;
    const double lam_I = ray_lambda_nehari(a, b, p);
    CHECK(ray_scaling(lam_I * 1.001, a, b, p).I < 0.0);
    CHECK(ray_scaling(lam_I * 0.999, a, b, p).I > 0.0);
}

TEST_CASE("ray peak energy matches golden-section search") {
    const double p = 4.2, a = 1.3, b = 0.8;
    // Golden-section maximization of J(lambda u) over [0, 4*lam_I].
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 0.0, hi = 4.0 * ray_lambda_nehari(a, b, p);
    for (int it = 0; it < 200; ++it) {
        const double x1 = hi - gr * (hi - lo);
        const double x2 = lo + gr * (hi - lo);
        if (ray_scaling(x1, a, b, p).J < ray_scaling(x2, a, b, p).J)
            lo = x1;
        else
            hi = x2;
    }
    const double peak_gs = ray_scaling(0.5 * (lo + hi), a, b, p).J;
    CHECK(ray_peak_energy(a, b, p) == doctest::Approx(peak_gs).epsilon(1e-10));
}

TEST_CASE("ModelParams validation") {
    ModelParams ok{3, 1.0, 4.0, 1.0};
    CHECK_NOTHROW(ok.validate());
    CHECK_THROWS_AS((ModelParams{2, 1.0, 3.0, 1.0}.validate()), ConfigError);
    CHECK_THROWS_AS((ModelParams{3, 2.5, 4.0, 1.0}.validate()), ConfigError);
    CHECK_THROWS_AS((ModelParams{3, 1.0, 6.5, 1.0}.validate()), ConfigError);  // >= 2n/(n-2)
    CHECK_THROWS_AS((ModelParams{3, 1.0, 2.0, 1.0}.validate()), ConfigError);
    CHECK_THROWS_AS((ModelParams{3, 1.0, 4.0, 0.0}.validate()), ConfigError);
}
