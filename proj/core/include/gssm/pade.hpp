#pragma once

// Univariate and homogeneous multivariate Padé approximants.

#include <iosfwd>
#include <string>
#include <vector>

#include "gssm/series.hpp"

namespace gssm {

// Rational map z -> P(z) / Q(z). The numerator is one vector-valued series;
// denominators are scalar series with constant term 1, either a single one
// shared by every output component or one per component.
struct RationalMap {
    int dim_in = 1;
    int dim_out = 1;
    int N = 0;
    int M = 0;
    MultiSeries numerator;
    std::vector<MultiSeries> denominators;
    // Set when the denominator solve was rank deficient or the degrees were reduced.
    bool flagged = false;
    std::string note;

    bool shared() const { return denominators.size() == 1; }
    const MultiSeries& denominator(int component) const;

    // Polynomial P / 1.
    static RationalMap polynomial(const MultiSeries& p);
};

// Robust Padé [N/M] of each scalar component of a univariate series, after
// Gonnet, Güttel and Trefethen: SVD of the Toeplitz block with rank
// detection at svd_tol, degree reduction and trimming. The variable is
// rescaled so that the first and last nonzero coefficients have equal
// magnitude before the solve.
RationalMap pade_univariate(const MultiSeries& coeffs, int N, int M, double svd_tol = 1e-13);

// Homogeneous multivariate approximant. Numerator conditions cover total
// orders 0..N, denominator conditions orders N+1..N+M (least squares).
RationalMap pade_multivariate(const MultiSeries& coeffs, int N, int M, bool shared_denominator = false,
                              double svd_tol = 1e-13);

CVec evaluate_rational(const RationalMap& r, std::span<const cplx> point, double floor = 1e-12);
CVec evaluate_rational(const RationalMap& r, const CVec& point, double floor = 1e-12);
// Denominator value of component i (no floor check).
cplx evaluate_denominator(const RationalMap& r, std::span<const cplx> point, int component = 0);

MultiSeries taylor_of_rational(const RationalMap& r, int order);

// Text format:
//   pade <d> <l> <N> <M>
//   NUMERATOR
//   <series block>
//   DENOMINATOR          (once if shared, otherwise once per component)
//   <series block>
void write_rational(std::ostream& os, const RationalMap& r);
RationalMap read_rational(std::istream& is);

}  // namespace gssm
