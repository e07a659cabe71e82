#pragma once

// Dense convex quadratic programs
//   minimize 1/2 x' H x + c' x   subject to   G x >= h
// by a primal-dual interior-point method with Mehrotra correction.

#include "gssm/series.hpp"

namespace gssm {

struct QPResult {
    RVec x;
    RVec z;  // multipliers of G x >= h
    int iterations = 0;
    bool converged = false;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double gap = 0.0;
};

struct QPOptions {
    double tol = 1e-10;
    int max_iterations = 200;
};

QPResult solve_qp(const RMat& H, const RVec& c, const RMat& G, const RVec& h, const QPOptions& opt = {});

}  // namespace gssm
