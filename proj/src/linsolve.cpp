#include "blowlab/linsolve.hpp"

#include <cmath>

#include "blowlab/errors.hpp"

namespace blowlab {

SpdSolver::SpdSolver(const TriDiag& A, double tolerance)
    : direct_(true), dim_(A.size()), tol_(tolerance) {
    for (int i = 0; i + 1 < dim_; ++i) {
        const double scale = std::max({std::abs(A.lower[i]), std::abs(A.upper[i]), 1.0});
        if (std::abs(A.lower[i] - A.upper[i]) > 1e-12 * scale)
            throw NotSpdError("SpdSolver: matrix is not symmetric");
    }
    d_.resize(dim_);
    l_.resize(dim_ > 0 ? dim_ - 1 : 0);
    for (int i = 0; i < dim_; ++i) {
        double di = A.diag[i];
        if (i > 0) di -= l_[i - 1] * l_[i - 1] * d_[i - 1];
        if (!(di > 0.0)) throw NotSpdError("SpdSolver: nonpositive pivot");
        d_[i] = di;
        if (i + 1 < dim_) l_[i] = A.lower[i] / di;
    }
}

SpdSolver::SpdSolver(MatVec A, std::vector<double> inv_diag, double tolerance,
                     int max_iterations)
    : direct_(false), dim_(static_cast<int>(inv_diag.size())), tol_(tolerance),
      max_iter_(max_iterations), matvec_(std::move(A)),
      inv_diag_(std::move(inv_diag)) {}

std::vector<double> SpdSolver::solve(const std::vector<double>& b) const {
    if (static_cast<int>(b.size()) != dim_)
        throw ConfigError("SpdSolver::solve: dimension mismatch");
    if (direct_) {
        std::vector<double> x(b);
        for (int i = 1; i < dim_; ++i) x[i] -= l_[i - 1] * x[i - 1];
        for (int i = 0; i < dim_; ++i) x[i] /= d_[i];
        for (int i = dim_ - 2; i >= 0; --i) x[i] -= l_[i] * x[i + 1];
        return x;
    }

    // Jacobi-preconditioned CG.
    std::vector<double> x(dim_, 0.0), r(b), z(dim_), q;
    double bnorm = 0.0;
    for (double v : b) bnorm += v * v;
    bnorm = std::sqrt(bnorm);
    if (bnorm == 0.0) return x;
    for (int i = 0; i < dim_; ++i) z[i] = inv_diag_[i] * r[i];
    std::vector<double> pdir(z);
    double rz = 0.0;
    for (int i = 0; i < dim_; ++i) rz += r[i] * z[i];
    for (int it = 0; it < max_iter_; ++it) {
        q = matvec_(pdir);
        double pq = 0.0;
        for (int i = 0; i < dim_; ++i) pq += pdir[i] * q[i];
        if (!(pq > 0.0)) throw NotSpdError("SpdSolver: CG detected non-SPD operator");
        const double alpha = rz / pq;
        double rnorm = 0.0;
        for (int i = 0; i < dim_; ++i) {
            x[i] += alpha * pdir[i];
            r[i] -= alpha * q[i];
            rnorm += r[i] * r[i];
        }
        if (std::sqrt(rnorm) <= tol_ * bnorm) return x;
        for (int i = 0; i < dim_; ++i) z[i] = inv_diag_[i] * r[i];
        double rz_new = 0.0;
        for (int i = 0; i < dim_; ++i) rz_new += r[i] * z[i];
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < dim_; ++i) pdir[i] = z[i] + beta * pdir[i];
    }
    throw MaxIterationsError("SpdSolver: CG did not reach the residual target");
}

}  // namespace blowlab
