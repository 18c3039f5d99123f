#pragma once

// P1 assembly of the weighted stiffness, mass, and nonlinear-load operators on
// the radial mesh, plus the discrete norms. All quadratures carry the
// sphere-area factor so values match the n-dimensional integrals.

#include <vector>

#include "blowlab/mesh.hpp"

namespace blowlab {

// Symmetric-storage tridiagonal matrix (lower and upper kept separately so a
// solver can refuse unsymmetric input).
struct TriDiag {
    std::vector<double> diag;
    std::vector<double> lower;  // entry i is A(i+1, i)
    std::vector<double> upper;  // entry i is A(i, i+1)

    explicit TriDiag(int n = 0) : diag(n, 0.0), lower(n > 0 ? n - 1 : 0, 0.0),
                                  upper(n > 0 ? n - 1 : 0, 0.0) {}

    int size() const { return static_cast<int>(diag.size()); }

    std::vector<double> matvec(const std::vector<double>& x) const;
    double quadform(const std::vector<double>& x) const;  // x^T A x

    // this += c * B
    void add_scaled(const TriDiag& B, double c);
};

// State vector: coefficients on nodes r_0..r_{M-1}; the Dirichlet node r_M = R
// is eliminated.
using StateVector = std::vector<double>;

struct DiscreteOperators {
    TriDiag K;    // stiffness, Dirichlet-reduced
    TriDiag Ms;   // mass with weight r^{n-1-s}
    TriDiag M0;   // unweighted mass (s = 0)
};

// Full (M+1)-node matrices, boundary row included. Used by tests and reduced
// by assemble_operators.
TriDiag assemble_stiffness_full(const RadialMesh& mesh);
TriDiag assemble_weighted_mass_full(const RadialMesh& mesh, double s);

// Drop the last row/column (Dirichlet node at r = R).
TriDiag reduce_dirichlet(const TriDiag& full);

DiscreteOperators assemble_operators(const RadialMesh& mesh);

// Load vector F(u)_i = omega * int |u_h|^{p-2} u_h phi_i r^{n-1} dr, on the
// reduced dof set. Uses the mesh's Gauss rule, so u^T F(u) equals the
// quadrature value of |u_h|_p^p exactly.
StateVector assemble_nonlinear_load(const RadialMesh& mesh, const StateVector& u,
                                    double p);

struct Norms {
    double grad = 0.0;         // ||grad u||_2
    double p = 0.0;            // ||u||_p
    double weighted_l2 = 0.0;  // int u^2 / |x|^s
};

Norms discrete_norms(const RadialMesh& mesh, const DiscreteOperators& ops,
                     const StateVector& u, double p);

// ||u||_p computed with an independent, much higher-order rule; oracle for
// tests.
double norm_p_fine(const RadialMesh& mesh, const StateVector& u, double p,
                   int order);

double max_abs(const StateVector& u);

// Nodal interpolant of a radial profile f(r) on the reduced dof set.
template <class F>
StateVector interpolate(const RadialMesh& mesh, F&& f) {
    StateVector u(mesh.num_dofs());
    for (int i = 0; i < mesh.num_dofs(); ++i) u[i] = f(mesh.nodes[i]);
    return u;
}

}  // namespace blowlab
