#pragma once

// Reduced dynamics on SSMs: integration, lifting, backbone and forced
// response curves, chaos diagnostics.

#include <functional>
#include <span>
#include <vector>

#include "gssm/ode.hpp"
#include "gssm/pade.hpp"
#include "gssm/ssm.hpp"

namespace gssm {

// p' = R(p) [+ eps * forcing_dir * cos(Omega t)] in real coordinates, or for a
// conjugate pair p' = R_0(p, conj p) [+ eps * forcing_dir_0 * e^{i Omega t}]
// with state (Re p, Im p).
struct ReducedField {
    enum class Kind { polynomial, rational };
    Kind kind = Kind::polynomial;
    MultiSeries poly;
    RationalMap rational;
    bool conjugate_pair = false;
    CVec forcing_dir;
    double epsilon = 0.0;
    double omega = 0.0;
    double pole_floor = 1e-12;

    static ReducedField from_model(const SSMModel& model);
    static ReducedField from_polynomial(const MultiSeries& R, bool conjugate_pair = false);
    static ReducedField from_rational(const RationalMap& R, bool conjugate_pair = false);
    // The full system x' = A x + f(x) + eps * forcing * cos(Omega t) as a real field.
    static ReducedField from_system(const PolySystem& sys);

    int dim() const;
    bool forced() const { return epsilon != 0.0 && forcing_dir.size() > 0; }
    // Parameter vector p from a real state and back.
    CVec param(const RVec& state) const;
    RVec state(const CVec& p) const;
    RVec operator()(double t, const RVec& state) const;
};

TrajectoryData integrate_reduced(const ReducedField& field, const RVec& ic, double t0, double t1,
                                 const OdeOptions& opt = {});

// Ambient trajectory x = W(p) along a reduced trajectory.
TrajectoryData lift(const SSMModel& model, const ReducedField& field, const TrajectoryData& reduced);
TrajectoryData lift(const RationalMap& W, const ReducedField& field, const TrajectoryData& reduced,
                    double floor = 1e-12);

// Amplitude-dependent damping and frequency, Taylor or rational.
struct PolarFunctions {
    std::function<double(double)> kappa;
    std::function<double(double)> omega;
    std::function<double(double)> dkappa;
    std::function<double(double)> domega;

    static PolarFunctions from_taylor(const PolarNormalForm& p);
    // Univariate rational functions of rho.
    static PolarFunctions from_rational(const RationalMap& kappa, const RationalMap& omega);
};

struct BackbonePoint {
    double rho;
    double omega;
    double kappa;
};
std::vector<BackbonePoint> backbone(const PolarFunctions& polar, std::span<const double> rho_grid);

struct FRCPoint {
    double rho;
    double Omega;
    double amplitude;
    double psi;
    bool stable;
    int branch;  // -1 or +1
};
struct FRCBranch {
    std::vector<FRCPoint> points;
    const FRCPoint* peak() const;
};

// Implicit forced-response equation (Omega - omega)^2 - (eps f / rho)^2 + kappa^2.
double frc_residual(const PolarFunctions& polar, double eps_f, double rho, double Omega);

// Closed-form sweep in rho. amplitude maps rho to the reported response
// amplitude (identity when empty).
FRCBranch forced_response(const PolarFunctions& polar, double eps_f, std::span<const double> rho_grid,
                          const std::function<double(double)>& amplitude = {});

// Stroboscopic samples at t = k T, T = 2 pi / Omega, after skip periods.
// period > 0 overrides the forcing period (needed for unforced fields).
std::vector<RVec> poincare_sample(const ReducedField& field, const RVec& ic, int n_periods, int skip = 20,
                                  double period = 0.0, const OdeOptions& opt = {});

struct LyapunovEstimate {
    double exponent = 0.0;
    double fit_error = 0.0;
    bool saturated = false;
};

// Two-trajectory estimate with renormalization every renorm_interval. The
// reference and the perturbed copy are integrated separately, so the
// reference does not change with the perturbation size; the probe needs an
// integration tolerance well below the perturbation.
LyapunovEstimate lyapunov_estimate(const ReducedField& field, const RVec& ic, double perturbation = 1e-7,
                                   double horizon = 200.0, double renorm_interval = 1.0, double transient = 0.0,
                                   const OdeOptions& opt = {});

struct Spectrum {
    std::vector<double> frequency;
    std::vector<double> power;
};
// One-sided periodogram of a mean-removed component; frequency in cycles per unit time.
Spectrum psd_estimate(const TrajectoryData& traj, int component);

// Largest single-bin share of the total power.
double peak_fraction(const Spectrum& s);

}  // namespace gssm
