#pragma once

// SPD solvers: direct LDL^T for the tridiagonal systems, preconditioned CG as
// the fallback path for general sparse operators.

#include <functional>
#include <vector>

#include "blowlab/assembly.hpp"

namespace blowlab {

using MatVec = std::function<std::vector<double>(const std::vector<double>&)>;

class SpdSolver {
  public:
    // Direct path. Refuses unsymmetric input and nonpositive pivots.
    explicit SpdSolver(const TriDiag& A, double tolerance = 1e-12);

    // Iterative path (Jacobi-preconditioned CG).
    SpdSolver(MatVec A, std::vector<double> inv_diag, double tolerance = 1e-12,
              int max_iterations = 10000);

    std::vector<double> solve(const std::vector<double>& b) const;

    int size() const { return dim_; }
    bool direct() const { return direct_; }

  private:
    bool direct_ = true;
    int dim_ = 0;
    double tol_ = 1e-12;
    int max_iter_ = 10000;
    // LDL^T factors for the direct path.
    std::vector<double> d_, l_;
    MatVec matvec_;
    std::vector<double> inv_diag_;
};

}  // namespace blowlab
