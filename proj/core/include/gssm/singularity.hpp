#pragma once

// Convergence-limiting singularities from Taylor coefficients, and scans of
// rational denominators for zeros.

#include <string>
#include <vector>

#include "gssm/pade.hpp"

namespace gssm {

struct RadiusEstimate {
    double radius = 0.0;
    bool zero_radius = false;  // ratios extrapolate to zero (divergent series)
    int stride = 1;            // spacing of the nonzero coefficients used
    double fit_residual = 0.0;
};

// Ratio test |c_n / c_{n+g}|^{1/g} over the nonzero coefficients (stride g),
// extrapolated to n -> infinity by a linear fit in 1/n over the later half.
RadiusEstimate estimate_radius(const MultiSeries& coeffs);

struct SingularityEstimate {
    double radius = 0.0;
    double theta = 0.0;       // in [0, pi]
    std::string pattern;      // all-positive | alternating | period-<p> | irregular | inconclusive
    double confidence = 0.0;  // fraction of coefficient signs explained by cos(k theta)
    std::string summary() const;  // "r theta pattern confidence"
};

// Sign pattern of the nonzero-order coefficients c_k, k >= 1, of a
// univariate series. A singularity pair at r e^{+-i theta} makes c_k follow
// the sign of cos(k theta); "all-positive" means one sign throughout.
SingularityEstimate classify_sign_pattern(const MultiSeries& coeffs);

struct ZeroFlag {
    std::vector<cplx> point;
    int component = 0;
    cplx denominator;
    bool sign_change = false;
};

// Grid points where |Q| < floor * |Q(0)|, or where Re Q changes sign between
// tensor-grid neighbors (the point with the smaller |Q| is reported).
std::vector<ZeroFlag> denominator_zero_scan(const RationalMap& r, const EvaluationGrid& domain, double floor = 1e-6);

struct LadderStep {
    int N = 0;
    int M = 0;
    std::vector<ZeroFlag> flags;
};

struct LadderResult {
    RationalMap map;  // first clean approximant, else the last one tried
    bool clean = false;
    std::vector<LadderStep> steps;
};

// Tries [N/M], [N/M-1], [N-1/M-1] in turn and keeps the first whose
// denominators show no zero on the grid. Univariate input uses the robust
// univariate solver, otherwise the homogeneous multivariate one.
LadderResult pade_ladder(const MultiSeries& coeffs, int N, int M, const EvaluationGrid& domain,
                         bool shared_denominator = false, double floor = 1e-6);

}  // namespace gssm
