#include "blowlab/assembly.hpp"

#include <cassert>
#include <cmath>

namespace blowlab {

std::vector<double> TriDiag::matvec(const std::vector<double>& x) const {
    const int n = size();
    assert(static_cast<int>(x.size()) == n);
    std::vector<double> y(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double v = diag[i] * x[i];
        if (i > 0) v += lower[i - 1] * x[i - 1];
        if (i + 1 < n) v += upper[i] * x[i + 1];
        y[i] = v;
    }
    return y;
}

double TriDiag::quadform(const std::vector<double>& x) const {
    const int n = size();
    assert(static_cast<int>(x.size()) == n);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        acc += diag[i] * x[i] * x[i];
        if (i + 1 < n) acc += (lower[i] + upper[i]) * x[i] * x[i + 1];
    }
    return acc;
}

void TriDiag::add_scaled(const TriDiag& B, double c) {
    assert(size() == B.size());
    for (int i = 0; i < size(); ++i) diag[i] += c * B.diag[i];
    for (int i = 0; i + 1 < size(); ++i) {
        lower[i] += c * B.lower[i];
        upper[i] += c * B.upper[i];
    }
}

namespace {

// Assemble omega * int w(r) * b_i(r) b_j(r) dr with b either the hat values
// or their derivatives, per element, tridiagonal result.
template <class Weight>
TriDiag assemble_form(const RadialMesh& mesh, Weight&& weight, bool gradient) {
    const int M = mesh.num_elements();
    const double omega = sphere_area(mesh.params.n);
    const GaussRule rule = gauss_legendre(mesh.quad_order);
    TriDiag A(M + 1);
    for (int e = 0; e < M; ++e) {
        const double a = mesh.nodes[e], b = mesh.nodes[e + 1];
        const double h = b - a;
        double m00 = 0.0, m01 = 0.0, m11 = 0.0;
        for (size_t q = 0; q < rule.points.size(); ++q) {
            const double r = 0.5 * (a + b) + 0.5 * h * rule.points[q];
            const double w = 0.5 * h * rule.weights[q] * omega * weight(r);
            double v0, v1;
            if (gradient) {
                v0 = -1.0 / h;
                v1 = 1.0 / h;
            } else {
                v0 = (b - r) / h;
                v1 = (r - a) / h;
            }
            m00 += w * v0 * v0;
            m01 += w * v0 * v1;
            m11 += w * v1 * v1;
        }
        A.diag[e] += m00;
        A.diag[e + 1] += m11;
        A.lower[e] += m01;
        A.upper[e] += m01;
    }
    return A;
}

}  // namespace

TriDiag assemble_stiffness_full(const RadialMesh& mesh) {
    const double nm1 = mesh.params.n - 1.0;
    return assemble_form(mesh, [nm1](double r) { return std::pow(r, nm1); }, true);
}

TriDiag assemble_weighted_mass_full(const RadialMesh& mesh, double s) {
    const double e = mesh.params.n - 1.0 - s;  // >= 0 for n >= 3, s <= 2
    return assemble_form(mesh, [e](double r) { return std::pow(r, e); }, false);
}

TriDiag reduce_dirichlet(const TriDiag& full) {
    const int n = full.size() - 1;
    TriDiag A(n);
    for (int i = 0; i < n; ++i) A.diag[i] = full.diag[i];
    for (int i = 0; i + 1 < n; ++i) {
        A.lower[i] = full.lower[i];
        A.upper[i] = full.upper[i];
    }
    return A;
}

DiscreteOperators assemble_operators(const RadialMesh& mesh) {
    DiscreteOperators ops;
    ops.K = reduce_dirichlet(assemble_stiffness_full(mesh));
    ops.Ms = reduce_dirichlet(assemble_weighted_mass_full(mesh, mesh.params.s));
    ops.M0 = reduce_dirichlet(assemble_weighted_mass_full(mesh, 0.0));
    return ops;
}

namespace {

inline double node_value(const StateVector& u, int i) {
    // Dirichlet node carries 0.
    return i < static_cast<int>(u.size()) ? u[i] : 0.0;
}

// |x|^e for real e, with a multiply-only fast path at small integer e.
inline double abs_pow(double x, double e) {
    const double a = std::abs(x);
    const int k = static_cast<int>(e);
    if (e == k && k >= 0 && k <= 8) {
        double acc = 1.0;
        for (int i = 0; i < k; ++i) acc *= a;
        return acc;
    }
    return std::pow(a, e);
}

}  // namespace

StateVector assemble_nonlinear_load(const RadialMesh& mesh, const StateVector& u,
                                    double p) {
    const int M = mesh.num_elements();
    const int Q = mesh.quad_order;
    StateVector F(mesh.num_dofs(), 0.0);
    for (int e = 0; e < M; ++e) {
        const double a = mesh.nodes[e], b = mesh.nodes[e + 1];
        const double h = b - a;
        const double u0 = node_value(u, e), u1 = node_value(u, e + 1);
        double f0 = 0.0, f1 = 0.0;
        for (int q = 0; q < Q; ++q) {
            const double r = mesh.quad_r[e * Q + q];
            const double w = mesh.quad_w[e * Q + q];
            const double phi1 = (r - a) / h, phi0 = 1.0 - phi1;
            const double uh = u0 * phi0 + u1 * phi1;
            const double g = abs_pow(uh, p - 2.0) * uh;
            f0 += w * g * phi0;
            f1 += w * g * phi1;
        }
        F[e] += f0;
        if (e + 1 < mesh.num_dofs()) F[e + 1] += f1;
    }
    return F;
}

Norms discrete_norms(const RadialMesh& mesh, const DiscreteOperators& ops,
                     const StateVector& u, double p) {
    Norms out;
    out.grad = std::sqrt(std::max(0.0, ops.K.quadform(u)));
    out.weighted_l2 = ops.Ms.quadform(u);
    out.p = norm_p_fine(mesh, u, p, mesh.quad_order);
    return out;
}

double norm_p_fine(const RadialMesh& mesh, const StateVector& u, double p,
                   int order) {
    const int M = mesh.num_elements();
    const bool cached = order == mesh.quad_order && !mesh.quad_r.empty();
    const double omega = sphere_area(mesh.params.n);
    const double nm1 = mesh.params.n - 1.0;
    const GaussRule rule = cached ? GaussRule{} : gauss_legendre(order);
    double acc = 0.0;
    for (int e = 0; e < M; ++e) {
        const double a = mesh.nodes[e], b = mesh.nodes[e + 1];
        const double h = b - a;
        const double u0 = node_value(u, e), u1 = node_value(u, e + 1);
        for (int q = 0; q < order; ++q) {
            double r, w;
            if (cached) {
                r = mesh.quad_r[e * order + q];
                w = mesh.quad_w[e * order + q];
            } else {
                r = 0.5 * (a + b) + 0.5 * h * rule.points[q];
                w = 0.5 * h * rule.weights[q] * omega * std::pow(r, nm1);
            }
            const double phi1 = (r - a) / h;
            const double uh = u0 * (1.0 - phi1) + u1 * phi1;
            acc += w * abs_pow(uh, p);
        }
    }
    return std::pow(acc, 1.0 / p);
}

double max_abs(const StateVector& u) {
    double m = 0.0;
    for (double v : u) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace blowlab
