#include "blowlab/mesh.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "blowlab/errors.hpp"

namespace blowlab {

namespace {

GaussRule compute_gauss_legendre(int order) {
    GaussRule rule;
    rule.points.resize(order);
    rule.weights.resize(order);
    const int m = (order + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev initial guess, then Newton on P_order.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.points[i] = -x;
        rule.points[order - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[order - 1 - i] = w;
    }
    return rule;
}

}  // namespace

GaussRule gauss_legendre(int order) {
    if (order < 1) throw ConfigError("gauss_legendre: order must be >= 1");
    thread_local std::map<int, GaussRule> cache;
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, compute_gauss_legendre(order)).first;
    return it->second;
}

double sphere_area(int n) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

RadialMesh build_mesh(const ModelParams& params, int M, double grading,
                      int quad_order) {
    params.validate();
    if (M < 4) throw ConfigError("build_mesh: M must be >= 4");
    if (!(grading > 0.0)) throw ConfigError("build_mesh: grading must be positive");
    if (quad_order < 4) throw ConfigError("build_mesh: quad_order must be >= 4");

    RadialMesh mesh;
    mesh.params = params;
    mesh.quad_order = quad_order;
    mesh.nodes.resize(M + 1);
    for (int k = 0; k <= M; ++k)
        mesh.nodes[k] = params.R * std::pow(static_cast<double>(k) / M, grading);
    mesh.nodes.front() = 0.0;
    mesh.nodes.back() = params.R;

    const GaussRule rule = gauss_legendre(quad_order);
    const double omega = sphere_area(params.n);
    const double nm1 = params.n - 1.0;
    mesh.quad_r.resize(static_cast<size_t>(M) * quad_order);
    mesh.quad_w.resize(mesh.quad_r.size());
    for (int e = 0; e < M; ++e) {
        const double a = mesh.nodes[e], b = mesh.nodes[e + 1];
        const double h = b - a;
        for (int q = 0; q < quad_order; ++q) {
            const double r = 0.5 * (a + b) + 0.5 * h * rule.points[q];
            mesh.quad_r[e * quad_order + q] = r;
            mesh.quad_w[e * quad_order + q] =
                0.5 * h * rule.weights[q] * omega * std::pow(r, nm1);
        }
    }
    return mesh;
}

}  // namespace blowlab
