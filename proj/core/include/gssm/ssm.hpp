#pragma once

// Spectral submanifolds of polynomial systems x' = A x + f(x).

#include <iosfwd>
#include <string>
#include <vector>

#include "gssm/series.hpp"

namespace gssm {

struct PolySystem {
    RMat linear;               // A
    MultiSeries nonlinearity;  // n -> n, no constant or linear terms
    RVec forcing;              // direction of eps * forcing * cos(Omega t); empty when unforced
    double epsilon = 0.0;
    double omega = 0.0;

    int dim() const { return static_cast<int>(linear.rows()); }
    void validate() const;

    RVec rhs(const RVec& x) const;
    RVec rhs(double t, const RVec& x) const;  // includes forcing
    CVec rhs(const CVec& x) const;
    RMat jacobian(const RVec& x) const;
};

enum class Style { graph, normal_form };
enum class Projection { spectral, orthogonal, coordinate };

std::string to_string(Style s);
std::string to_string(Projection p);
Style parse_style(const std::string& s);
Projection parse_projection(const std::string& s);

struct SpectralData {
    CVec eigenvalues;         // descending real part
    CMat right;               // columns, unit norm, first nonzero entry positive real
    CMat left;                // rows, left * right = I
    std::vector<int> master;  // indices into eigenvalues; a conjugate pair lists +Im first

    int n() const { return static_cast<int>(eigenvalues.size()); }
    int d() const { return static_cast<int>(master.size()); }
    CVec master_eigenvalues() const;
    bool oscillatory_pair() const;
    std::vector<int> slaves() const;
};

struct SpectralOptions {
    std::vector<int> master;  // explicit choice (indices after sorting); empty = slowest
    int check_order = 0;      // cross-resonance check through this order
    double resonance_tol = 1e-8;
};

SpectralData spectral_analysis(const PolySystem& sys, int d, const SpectralOptions& opt = {});

// Rejects |lambda_j - <m, lambda_E>| < tol * max|lambda| for slave rows j
// and 2 <= |m| <= order.
void check_nonresonance(const SpectralData& spec, int order, double tol = 1e-8);

struct SSMOptions {
    Style style = Style::normal_form;
    int order = 3;
    Projection projection = Projection::spectral;
    int coordinate = 0;  // ambient coordinate for Projection::coordinate (d = 1)
    double resonance_tol = 1e-8;
};

struct SSMModel {
    SpectralData spectral;
    Style style = Style::normal_form;
    Projection projection = Projection::spectral;
    int coordinate = 0;
    int order = 0;
    MultiSeries W;  // d -> n, ambient coordinates
    MultiSeries R;  // d -> d

    int n() const { return spectral.n(); }
    int d() const { return spectral.d(); }
};

SSMModel compute_ssm(const PolySystem& sys, const SpectralData& spec, const SSMOptions& opt);

// Checks shapes, tangency of W and the linear part of R.
void validate_model(const SSMModel& model, double tol = 1e-10);

// kappa(rho) = sum kappa_n rho^(2n), omega(rho) = sum omega_n rho^(2n).
struct PolarNormalForm {
    std::vector<double> kappa;
    std::vector<double> omega;

    double kappa_at(double rho) const;
    double omega_at(double rho) const;
    double dkappa_at(double rho) const;
    double domega_at(double rho) const;
    // Amplitude gauge rho -> rho * sqrt(s): coefficient n scales by s^n.
    PolarNormalForm rescaled(double s) const;
    // Even univariate series in rho (coefficient 2n holds the n-th entry).
    MultiSeries kappa_series() const;
    MultiSeries omega_series() const;
};

PolarNormalForm extract_polar(const SSMModel& model);

// |l . F| / 2 for the first master mode: leading-order forcing amplitude in
// the polar system.
double forcing_projection(const SSMModel& model, const RVec& forcing);

// Parameter points for a model: +-r for a real 1D master, (r e^{it}, r e^{-it})
// for a conjugate pair, (r cos t, r sin t) for two real modes.
EvaluationGrid radial_grid(const SSMModel& model, double rmin, double rmax, int n_radii, int n_angles);
// Realified ambient state from a parameter point.
RVec realify(const SSMModel& model, const CVec& ambient);

struct ResidualStats {
    std::vector<double> radius;    // per distinct radius
    std::vector<double> residual;  // max defect over points at that radius
    double slope = 0.0;            // log-log least squares
    double max_residual = 0.0;
};

// Defect of A W(p) + f(W(p)) - DW(p) R(p), evaluated in extended precision.
ResidualStats invariance_residual(const PolySystem& sys, const SSMModel& model, const EvaluationGrid& grid);

// Coefficient-based estimate of the convergence radius of W.
double parametrization_radius(const SSMModel& model);
// Residual on a radial sweep. The window starts where the defect is still
// well above roundoff of the linear part.
ResidualStats residual_sweep(const PolySystem& sys, const SSMModel& model, int n_radii = 12, int n_angles = 16);

// Text format:
//   ssm <n> <d> <style> <order>
//   master i [j]
//   projection <kind> <coordinate>
//   eigenvalues        (n lines: re im)
//   eigenvectors       (n lines, row-major: re im pairs)
//   W <series block>
//   R <series block>
void write_model(std::ostream& os, const SSMModel& model);
SSMModel read_model(std::istream& is);

}  // namespace gssm
