#pragma once

// Data-driven reduced models: delay embedding, a linear chart from PCA,
// derivative targets and rational regression with a shared, positive
// denominator. Polynomial regression is kept as the baseline.

#include <cstdint>
#include <string>
#include <vector>

#include "gssm/ode.hpp"
#include "gssm/pade.hpp"
#include "gssm/reduced.hpp"

namespace gssm {

struct EmbeddingConfig {
    int delays = 0;      // q copies of the observable
    int lag = 1;         // tau, in samples
    int observable = 0;  // component of the input trajectory
    int manifold_dim = 0;  // d; 0 skips the q > 2d check

    void validate() const;
};

// Sliding window (y_i, y_{i-tau}, ..., y_{i-(q-1)tau}) with the time stamp of y_i.
TrajectoryData delay_embed(const TrajectoryData& series, const EmbeddingConfig& cfg);

struct ChartProjection {
    RMat basis;  // q x d, orthonormal columns
    RVec center;

    int ambient_dim() const { return static_cast<int>(basis.rows()); }
    int dim() const { return static_cast<int>(basis.cols()); }
    RVec project(const RVec& y) const { return basis.transpose() * (y - center); }
    RVec reconstruct(const RVec& eta) const { return center + basis * eta; }
    void validate(double tol = 1e-10) const;
};

// Leading d right singular vectors of the centered samples. An empty center
// means the mean over the last 10% of every trajectory. Each basis vector is
// signed so that its largest entry is positive.
ChartProjection tangent_space_pca(const std::vector<TrajectoryData>& embedded, int d, const RVec& center = {},
                                  double rank_tol = 1e-10);

TrajectoryData project(const ChartProjection& chart, const TrajectoryData& embedded);

// Fourth-order finite differences (one-sided near the ends). A nonzero
// smoothing half-width applies a Savitzky-Golay cubic filter first.
TrajectoryData estimate_derivatives(const TrajectoryData& traj, int smoothing_half_width = 0);

struct RegressionProblem {
    RMat inputs;   // K x d
    RMat targets;  // K x l
    int N = 1;
    int M = 0;
    double delta = 1e-3;
    bool anchored = true;  // no constant term in the numerator (fixed point at the origin)

    static RegressionProblem from_trajectories(const std::vector<TrajectoryData>& eta,
                                               const std::vector<TrajectoryData>& zeta, int N, int M);
    int dim_in() const { return static_cast<int>(inputs.cols()); }
    int dim_out() const { return static_cast<int>(targets.cols()); }
    std::size_t unknowns() const;
    void validate() const;
};

struct FitOptions {
    bool constrained = true;
    bool refine = true;
    std::uint64_t seed = 0;     // nonzero: randomized denominator start for restarts
    double init_scale = 0.5;    // size of the random start, in scaled coefficients
    int max_iterations = 500;
    double gradient_tol = 1e-10;
};

struct RationalFit {
    RationalMap map;  // shared denominator
    double error = 0.0;         // sum over samples of |zeta - P/Q|^2
    double stage1_error = 0.0;  // same objective at the linearized solution
    int iterations = 0;
    int active_constraints = 0;
    double min_margin = 0.0;    // min_i Q(eta_i) - delta
    bool flagged = false;
    std::string note;
};

RationalFit fit_rational_field(const RegressionProblem& prob, const FitOptions& opt = {});

// Sum over samples of |zeta - P/Q|^2 for an arbitrary map.
double regression_error(const RationalMap& r, const RMat& inputs, const RMat& targets);

struct PolynomialFit {
    MultiSeries field;
    double error = 0.0;
    int rank = 0;
    bool flagged = false;  // rank deficient: minimum-norm solution
};

PolynomialFit fit_polynomial_field(const RMat& inputs, const RMat& targets, int order, bool anchored = true);

// Free coefficients of a fitted model. The denominator constant is fixed to
// one; anchored models have no numerator constant.
std::size_t parameter_count(const RationalMap& r, bool anchored = true);
std::size_t parameter_count(const MultiSeries& p, bool anchored = true);

struct Prediction {
    TrajectoryData reduced;     // eta(t)
    TrajectoryData observable;  // first embedding coordinate of y = center + V eta
};

// Embeds the newest point of the observable window, projects it, integrates
// the reduced field and maps back.
Prediction predict(const ChartProjection& chart, const EmbeddingConfig& cfg, const ReducedField& field,
                   const std::vector<double>& window, double horizon, double dt, const OdeOptions& opt = {});

}  // namespace gssm
