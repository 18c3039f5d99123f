#pragma once

// 1-D radial mesh for the ball B_R(0) in R^n and Gauss-Legendre rules for the
// weighted element integrals.

#include <vector>

#include "blowlab/model.hpp"

namespace blowlab {

struct GaussRule {
    std::vector<double> points;   // on [-1, 1]
    std::vector<double> weights;  // sum to 2
};

// Gauss-Legendre rule with `order` points, computed by Newton iteration on the
// Legendre polynomial.
GaussRule gauss_legendre(int order);

// Surface area of the unit sphere in R^n (omega_{n-1} = 2 pi^{n/2} / Gamma(n/2)).
double sphere_area(int n);

struct RadialMesh {
    ModelParams params;
    std::vector<double> nodes;  // r_0 = 0 < r_1 < ... < r_M = R
    int quad_order = 6;

    // Quadrature table at quad_order, element-major: quad_r holds the mapped
    // points, quad_w the weights including the omega_{n-1} r^{n-1} factor.
    std::vector<double> quad_r;
    std::vector<double> quad_w;

    int num_elements() const { return static_cast<int>(nodes.size()) - 1; }
    // Unknowns: all nodes except the Dirichlet node at r = R.
    int num_dofs() const { return static_cast<int>(nodes.size()) - 1; }
};

// Graded mesh r_k = R*(k/M)^grading. grading = 1 is uniform; grading > 1
// refines toward the origin where the weight r^{n-1-s} varies fastest.
RadialMesh build_mesh(const ModelParams& params, int M, double grading,
                      int quad_order = 6);

}  // namespace blowlab
