#include "gssm/datadriven.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "gssm/error.hpp"
#include "gssm/qp.hpp"

namespace gssm {

void EmbeddingConfig::validate() const {
    if (delays < 1) throw ValidationError("delay count must be positive");
    if (lag < 1) throw ValidationError("delay lag must be at least one sample");
    if (observable < 0) throw ValidationError("observable index must be non-negative");
    if (manifold_dim < 0) throw ValidationError("manifold dimension must be non-negative");
    if (manifold_dim > 0 && delays <= 2 * manifold_dim)
        throw ValidationError("number of delays (" + std::to_string(delays) +
                              ") must exceed twice the manifold dimension (" + std::to_string(manifold_dim) + ")");
}

TrajectoryData delay_embed(const TrajectoryData& series, const EmbeddingConfig& cfg) {
    cfg.validate();
    if (cfg.observable >= series.dim()) throw ValidationError("observable index exceeds the trajectory dimension");
    const std::size_t span = static_cast<std::size_t>(cfg.delays - 1) * static_cast<std::size_t>(cfg.lag);
    if (series.size() < span + 1)
        throw ValidationError("series of length " + std::to_string(series.size()) + " is too short for " +
                              std::to_string(cfg.delays) + " delays at lag " + std::to_string(cfg.lag));
    if (series.size() > 1) (void)series.uniform_step();

    TrajectoryData out;
    out.status = series.status;
    out.message = series.message;
    const std::size_t len = series.size() - span;
    out.t.reserve(len);
    out.x.reserve(len);
    for (std::size_t j = 0; j < len; ++j) {
        const std::size_t i = j + span;
        RVec y(cfg.delays);
        for (int k = 0; k < cfg.delays; ++k)
            y[k] = series.x[i - static_cast<std::size_t>(k) * static_cast<std::size_t>(cfg.lag)][cfg.observable];
        out.t.push_back(series.t[i]);
        out.x.push_back(std::move(y));
    }
    return out;
}

void ChartProjection::validate(double tol) const {
    if (basis.rows() == 0 || basis.cols() == 0) throw ValidationError("chart basis is empty");
    if (basis.cols() > basis.rows()) throw ValidationError("chart basis has more columns than rows");
    if (center.size() != basis.rows()) throw ValidationError("chart center has wrong dimension");
    const double err = (basis.transpose() * basis - RMat::Identity(basis.cols(), basis.cols())).cwiseAbs().maxCoeff();
    if (err > tol) throw ValidationError("chart basis is not orthonormal (error " + std::to_string(err) + ")");
}

ChartProjection tangent_space_pca(const std::vector<TrajectoryData>& embedded, int d, const RVec& center,
                                  double rank_tol) {
    if (embedded.empty()) throw ValidationError("no trajectories for PCA");
    const int q = embedded.front().dim();
    if (d < 1 || d > q) throw ValidationError("PCA dimension must lie in [1, q]");
    std::size_t total = 0;
    for (const auto& tr : embedded) {
        if (tr.dim() != q) throw ValidationError("embedded trajectories differ in dimension");
        total += tr.size();
    }
    if (total < static_cast<std::size_t>(d)) throw ValidationError("too few samples for PCA");

    ChartProjection chart;
    if (center.size() > 0) {
        if (center.size() != q) throw ValidationError("PCA center has wrong dimension");
        chart.center = center;
    } else {
        chart.center = RVec::Zero(q);
        std::size_t cnt = 0;
        for (const auto& tr : embedded) {
            const std::size_t tail = std::max<std::size_t>(1, tr.size() / 10);
            for (std::size_t i = tr.size() - tail; i < tr.size(); ++i, ++cnt) chart.center += tr.x[i];
        }
        chart.center /= static_cast<double>(cnt);
    }

    RMat X(static_cast<Eigen::Index>(total), q);
    Eigen::Index row = 0;
    for (const auto& tr : embedded)
        for (const auto& y : tr.x) X.row(row++) = (y - chart.center).transpose();
    Eigen::BDCSVD<RMat> svd(X, Eigen::ComputeThinV);
    const RVec& sv = svd.singularValues();
    if (sv.size() < d || sv[0] <= 0.0 || sv[d - 1] <= rank_tol * sv[0])
        throw ValidationError("sample matrix has rank below " + std::to_string(d) + " at tolerance");
    chart.basis = svd.matrixV().leftCols(d);
    for (int j = 0; j < d; ++j) {
        Eigen::Index imax = 0;
        chart.basis.col(j).cwiseAbs().maxCoeff(&imax);
        if (chart.basis(imax, j) < 0.0) chart.basis.col(j) *= -1.0;
    }
    return chart;
}

TrajectoryData project(const ChartProjection& chart, const TrajectoryData& embedded) {
    if (embedded.dim() != chart.ambient_dim()) throw ValidationError("trajectory dimension differs from the chart");
    TrajectoryData out;
    out.t = embedded.t;
    out.status = embedded.status;
    out.message = embedded.message;
    out.x.reserve(embedded.size());
    for (const auto& y : embedded.x) out.x.push_back(chart.project(y));
    return out;
}

namespace {

// Savitzky-Golay cubic smoothing with half-width m; windows are shifted
// inward near the ends.
std::vector<double> savgol_cubic(const std::vector<double>& y, int m) {
    const int n = static_cast<int>(y.size());
    const int w = 2 * m + 1;
    if (m < 2) throw ValidationError("smoothing half-width must be at least 2");
    if (n < w) throw ValidationError("series shorter than the smoothing window");
    RMat V(w, 4);
    for (int j = 0; j < w; ++j) {
        const double x = static_cast<double>(j - m) / m;
        V(j, 0) = 1.0;
        V(j, 1) = x;
        V(j, 2) = x * x;
        V(j, 3) = x * x * x;
    }
    const RMat pinv = V.completeOrthogonalDecomposition().pseudoInverse();
    std::vector<double> out(y.size());
    for (int i = 0; i < n; ++i) {
        const int s = std::clamp(i - m, 0, n - w);
        const double x = static_cast<double>(i - s - m) / m;
        RVec basis(4);
        basis << 1.0, x, x * x, x * x * x;
        const RVec weights = pinv.transpose() * basis;
        double acc = 0.0;
        for (int j = 0; j < w; ++j) acc += weights[j] * y[static_cast<std::size_t>(s + j)];
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

std::vector<double> fd4(const std::vector<double>& f, double h) {
    const std::size_t n = f.size();
    std::vector<double> d(n);
    for (std::size_t i = 2; i + 2 < n; ++i) d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h);
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h);
    d[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) / (12.0 * h);
    d[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) / (12.0 * h);
    return d;
}

}  // namespace

TrajectoryData estimate_derivatives(const TrajectoryData& traj, int smoothing_half_width) {
    if (traj.size() < 5) throw ValidationError("derivative estimate needs at least 5 samples");
    const double h = traj.uniform_step();
    TrajectoryData out;
    out.t = traj.t;
    out.status = traj.status;
    out.message = traj.message;
    out.x.assign(traj.size(), RVec(traj.dim()));
    for (int c = 0; c < traj.dim(); ++c) {
        std::vector<double> f = traj.component(c);
        if (smoothing_half_width > 0) f = savgol_cubic(f, smoothing_half_width);
        const std::vector<double> d = fd4(f, h);
        for (std::size_t i = 0; i < d.size(); ++i) out.x[i][c] = d[i];
    }
    return out;
}

RegressionProblem RegressionProblem::from_trajectories(const std::vector<TrajectoryData>& eta,
                                                       const std::vector<TrajectoryData>& zeta, int N, int M) {
    if (eta.size() != zeta.size() || eta.empty()) throw ValidationError("input and target trajectory lists differ");
    std::size_t K = 0;
    for (std::size_t j = 0; j < eta.size(); ++j) {
        if (eta[j].size() != zeta[j].size()) throw ValidationError("input and target trajectories differ in length");
        K += eta[j].size();
    }
    RegressionProblem p;
    p.N = N;
    p.M = M;
    p.inputs.resize(static_cast<Eigen::Index>(K), eta.front().dim());
    p.targets.resize(static_cast<Eigen::Index>(K), zeta.front().dim());
    Eigen::Index row = 0;
    for (std::size_t j = 0; j < eta.size(); ++j)
        for (std::size_t i = 0; i < eta[j].size(); ++i, ++row) {
            p.inputs.row(row) = eta[j].x[i].transpose();
            p.targets.row(row) = zeta[j].x[i].transpose();
        }
    return p;
}

std::size_t RegressionProblem::unknowns() const {
    const int d = dim_in();
    const std::size_t np = monomial_count(d, N) - (anchored ? 1 : 0);
    return static_cast<std::size_t>(dim_out()) * np + monomial_count(d, M) - 1;
}

void RegressionProblem::validate() const {
    if (inputs.rows() != targets.rows()) throw ValidationError("inputs and targets differ in sample count");
    if (inputs.cols() < 1 || targets.cols() < 1) throw ValidationError("regression needs at least one input and output");
    if (N < 0 || M < 0) throw ValidationError("orders must be non-negative");
    if (anchored && N < 1) throw ValidationError("an anchored numerator needs N >= 1");
    if (!(delta > 0.0)) throw ValidationError("positivity margin delta must be positive");
    if (!inputs.allFinite() || !targets.allFinite()) throw ValidationError("regression data contain non-finite values");
    if (static_cast<std::size_t>(inputs.rows()) < unknowns())
        throw ValidationError("need at least " + std::to_string(unknowns()) + " samples, have " +
                              std::to_string(inputs.rows()));
}

namespace {

RMat monomial_matrix(const RMat& pts, const std::vector<MultiIndex>& basis) {
    RMat out(pts.rows(), static_cast<Eigen::Index>(basis.size()));
    for (Eigen::Index i = 0; i < pts.rows(); ++i)
        for (std::size_t j = 0; j < basis.size(); ++j) {
            double v = 1.0;
            for (int a = 0; a < basis[j].dim(); ++a)
                for (int e = 0; e < basis[j][a]; ++e) v *= pts(i, a);
            out(i, static_cast<Eigen::Index>(j)) = v;
        }
    return out;
}

// Quotient residuals and their Jacobian for x = [a_0; ...; a_{l-1}; b].
struct Quotient {
    const RMat& Phi;  // K x nP
    const RMat& Psi;  // K x nQ
    const RMat& Z;    // K x l

    Eigen::Index K() const { return Phi.rows(); }
    Eigen::Index l() const { return Z.cols(); }
    Eigen::Index nP() const { return Phi.cols(); }
    Eigen::Index nQ() const { return Psi.cols(); }
    Eigen::Index size() const { return l() * nP() + nQ(); }

    RVec denominator(const RVec& x) const {
        RVec q = RVec::Ones(K());
        if (nQ() > 0) q += Psi * x.tail(nQ());
        return q;
    }
    RMat numerator(const RVec& x) const {
        RMat P(K(), l());
        for (Eigen::Index c = 0; c < l(); ++c) P.col(c) = Phi * x.segment(c * nP(), nP());
        return P;
    }
    RVec residual(const RVec& x, const RVec& q) const {
        const RMat P = numerator(x);
        RVec r(K() * l());
        for (Eigen::Index i = 0; i < K(); ++i)
            for (Eigen::Index c = 0; c < l(); ++c) r[i * l() + c] = Z(i, c) - P(i, c) / q[i];
        return r;
    }
    RMat jacobian(const RVec& x, const RVec& q) const {
        const RMat P = numerator(x);
        RMat J = RMat::Zero(K() * l(), size());
        for (Eigen::Index i = 0; i < K(); ++i)
            for (Eigen::Index c = 0; c < l(); ++c) {
                const Eigen::Index row = i * l() + c;
                J.block(row, c * nP(), 1, nP()) = -Phi.row(i) / q[i];
                if (nQ() > 0) J.block(row, l() * nP(), 1, nQ()) = Psi.row(i) * (P(i, c) / (q[i] * q[i]));
            }
        return J;
    }
};

// Best numerator for a fixed denominator (linear least squares in a).
void numerator_for_denominator(const Quotient& Q, RVec& x) {
    const RVec q = Q.denominator(x);
    const RMat A = q.cwiseInverse().asDiagonal() * Q.Phi;
    Eigen::CompleteOrthogonalDecomposition<RMat> cod(A);
    for (Eigen::Index c = 0; c < Q.l(); ++c) x.segment(c * Q.nP(), Q.nP()) = cod.solve(RVec(Q.Z.col(c)));
}

RationalMap assemble(const RegressionProblem& prob, const std::vector<MultiIndex>& pb,
                     const std::vector<MultiIndex>& qb, const RVec& x) {
    const int d = prob.dim_in();
    const int l = prob.dim_out();
    RationalMap r;
    r.dim_in = d;
    r.dim_out = l;
    r.N = prob.N;
    r.M = prob.M;
    r.numerator = MultiSeries(d, l, prob.N);
    const auto nP = static_cast<Eigen::Index>(pb.size());
    for (int c = 0; c < l; ++c)
        for (std::size_t j = 0; j < pb.size(); ++j) {
            const double v = x[c * nP + static_cast<Eigen::Index>(j)];
            if (v != 0.0) r.numerator.set(pb[j], c, v);
        }
    MultiSeries q(d, 1, prob.M);
    q.set(MultiIndex::zero(d), 0, 1.0);
    for (std::size_t j = 0; j < qb.size(); ++j) {
        const double v = x[l * nP + static_cast<Eigen::Index>(j)];
        if (v != 0.0) q.set(qb[j], 0, v);
    }
    r.denominators = {q};
    return r;
}

}  // namespace

double regression_error(const RationalMap& r, const RMat& inputs, const RMat& targets) {
    if (inputs.cols() != r.dim_in || targets.cols() != r.dim_out || inputs.rows() != targets.rows())
        throw ValidationError("data dimensions differ from the rational map");
    double e = 0.0;
    std::vector<cplx> pt(static_cast<std::size_t>(r.dim_in));
    for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
        for (int a = 0; a < r.dim_in; ++a) pt[static_cast<std::size_t>(a)] = inputs(i, a);
        const CVec p = evaluate(r.numerator, pt);
        for (int c = 0; c < r.dim_out; ++c) {
            const cplx q = evaluate_denominator(r, pt, c);
            const double v = q == cplx(0.0) ? std::numeric_limits<double>::infinity() : std::abs(targets(i, c) - p[c] / q);
            e += v * v;
        }
    }
    return e;
}

RationalFit fit_rational_field(const RegressionProblem& prob, const FitOptions& opt) {
    prob.validate();
    const int d = prob.dim_in();
    const int l = prob.dim_out();
    const auto pb = indices_up_to(d, prob.N, prob.anchored ? 1 : 0);
    const auto qb = prob.M > 0 ? indices_up_to(d, prob.M, 1) : std::vector<MultiIndex>{};
    const RMat Phi = monomial_matrix(prob.inputs, pb);
    const RMat Psi = monomial_matrix(prob.inputs, qb);
    const Quotient Q{Phi, Psi, prob.targets};
    const Eigen::Index K = Q.K(), nP = Q.nP(), nQ = Q.nQ(), n = Q.size();

    // Linearized residual Q zeta - P = A x - y.
    RMat A = RMat::Zero(K * l, n);
    RVec y(K * l);
    for (Eigen::Index i = 0; i < K; ++i)
        for (Eigen::Index c = 0; c < l; ++c) {
            const Eigen::Index row = i * l + c;
            A.block(row, c * nP, 1, nP) = -Phi.row(i);
            if (nQ > 0) A.block(row, l * nP, 1, nQ) = Psi.row(i) * prob.targets(i, c);
            y[row] = -prob.targets(i, c);
        }
    RVec D(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double cn = A.col(j).norm();
        D[j] = cn > 0.0 ? 1.0 / cn : 1.0;
    }
    const RMat As = A * D.asDiagonal();

    RationalFit fit;
    RVec x;
    const bool constrained = opt.constrained && nQ > 0;
    if (constrained) {
        RMat G = RMat::Zero(K, n);
        G.rightCols(nQ) = Psi * D.tail(nQ).asDiagonal();
        // A small cushion keeps the interior-point iterate strictly feasible.
        const RVec h = RVec::Constant(K, prob.delta - 1.0 + 1e-9 * std::max(1.0, prob.delta));
        const QPResult qp = solve_qp(As.transpose() * As, -As.transpose() * y, G, h);
        x = D.cwiseProduct(qp.x);
        const RVec q = Q.denominator(x);
        Eigen::Index worst = 0;
        const double margin = (q.array() - prob.delta).minCoeff(&worst);
        if (margin < -1e-8 * std::max(1.0, prob.delta)) {
            std::string pt;
            for (int a = 0; a < d; ++a) pt += (a ? " " : "") + std::to_string(prob.inputs(worst, a));
            throw ValidationError("positivity constraints are infeasible with b0 = 1: best denominator at sample " +
                                  std::to_string(worst) + " (" + pt + ") is " + std::to_string(q[worst]) +
                                  " < delta = " + std::to_string(prob.delta));
        }
        if (!qp.converged) {
            fit.flagged = true;
            fit.note = "linearized problem did not converge";
        }
    } else {
        Eigen::BDCSVD<RMat> svd(As, Eigen::ComputeThinU | Eigen::ComputeThinV);
        svd.setThreshold(1e-13);
        x = D.cwiseProduct(svd.solve(y));
        if (svd.rank() < n) {
            fit.flagged = true;
            fit.note = "linearized problem is rank deficient";
        }
    }
    const auto feasible = [&](const RVec& q) {
        if (!q.allFinite()) return false;
        return constrained ? (q.array() >= prob.delta).all() : (q.array() != 0.0).all();
    };

    RVec q = Q.denominator(x);
    RVec r = Q.residual(x, q);
    fit.stage1_error = r.squaredNorm();
    const RVec stage1 = x;

    if (opt.seed != 0 && nQ > 0) {
        std::mt19937_64 rng(opt.seed);
        std::normal_distribution<double> normal;
        RVec kick(nQ);
        for (Eigen::Index j = 0; j < nQ; ++j) kick[j] = opt.init_scale * normal(rng) * D[l * nP + j];
        RVec trial = x;
        for (int halving = 0; halving < 60; ++halving) {
            trial.tail(nQ) = x.tail(nQ) + kick;
            numerator_for_denominator(Q, trial);
            if (feasible(Q.denominator(trial))) break;
            kick *= 0.5;
        }
        x = trial;
        q = Q.denominator(x);
        r = Q.residual(x, q);
    }

    double E = r.squaredNorm();
    if (opt.refine) {
        double mu = -1.0;
        int it = 0;
        for (; it < opt.max_iterations; ++it) {
            const RMat J = Q.jacobian(x, q) * D.asDiagonal();
            const RVec g = J.transpose() * r;
            if (g.lpNorm<Eigen::Infinity>() < opt.gradient_tol) break;
            const RMat JtJ = J.transpose() * J;
            const RVec diag = JtJ.diagonal().cwiseMax(1e-12 * std::max(1.0, JtJ.diagonal().maxCoeff()));
            if (mu < 0.0) mu = 1e-3;
            bool accepted = false;
            while (!accepted && mu < 1e20 && it < opt.max_iterations) {
                RMat Hm = JtJ;
                Hm.diagonal() += mu * diag;
                const RVec step = Hm.ldlt().solve(-g);
                const RVec xt = x + D.cwiseProduct(step);
                const RVec qt = Q.denominator(xt);
                if (step.allFinite() && feasible(qt)) {
                    const RVec rt = Q.residual(xt, qt);
                    const double Et = rt.squaredNorm();
                    if (std::isfinite(Et) && Et < E) {
                        x = xt;
                        q = qt;
                        r = rt;
                        E = Et;
                        mu = std::max(mu / 3.0, 1e-15);
                        accepted = true;
                        break;
                    }
                }
                mu *= 4.0;
                ++it;
            }
            if (!accepted) break;
        }
        fit.iterations = it;
        if (!x.allFinite() || !std::isfinite(E)) {
            x = stage1;
            q = Q.denominator(x);
            E = fit.stage1_error;
            fit.flagged = true;
            fit.note = "refinement diverged; linearized solution returned";
        }
    }

    fit.error = E;
    fit.map = assemble(prob, pb, qb, x);
    fit.min_margin = (q.array() - prob.delta).minCoeff();
    if (nQ == 0) fit.min_margin = 1.0 - prob.delta;
    if (constrained) {
        if (fit.min_margin < -1e-12) throw NumericalError("fitted denominator violates the positivity margin");
        fit.active_constraints = static_cast<int>(((q.array() - prob.delta) <= 1e-7 * std::max(1.0, prob.delta)).count());
    }
    return fit;
}

PolynomialFit fit_polynomial_field(const RMat& inputs, const RMat& targets, int order, bool anchored) {
    if (inputs.rows() != targets.rows()) throw ValidationError("inputs and targets differ in sample count");
    if (order < (anchored ? 1 : 0)) throw ValidationError("polynomial order too small");
    const int d = static_cast<int>(inputs.cols());
    const int l = static_cast<int>(targets.cols());
    const auto basis = indices_up_to(d, order, anchored ? 1 : 0);
    const RMat Phi = monomial_matrix(inputs, basis);
    RVec D(Phi.cols());
    for (Eigen::Index j = 0; j < Phi.cols(); ++j) {
        const double cn = Phi.col(j).norm();
        D[j] = cn > 0.0 ? 1.0 / cn : 1.0;
    }
    Eigen::BDCSVD<RMat> svd(Phi * D.asDiagonal(), Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-13);
    const RMat coef = D.asDiagonal() * svd.solve(targets);

    PolynomialFit fit;
    fit.rank = static_cast<int>(svd.rank());
    fit.flagged = fit.rank < Phi.cols();
    fit.error = (Phi * coef - targets).squaredNorm();
    fit.field = MultiSeries(d, l, order);
    for (std::size_t j = 0; j < basis.size(); ++j)
        for (int c = 0; c < l; ++c) {
            const double v = coef(static_cast<Eigen::Index>(j), c);
            if (v != 0.0) fit.field.set(basis[j], c, v);
        }
    return fit;
}

std::size_t parameter_count(const RationalMap& r, bool anchored) {
    const std::size_t np = monomial_count(r.dim_in, r.N) - (anchored ? 1 : 0);
    const std::size_t nq = monomial_count(r.dim_in, r.M) - 1;
    return static_cast<std::size_t>(r.dim_out) * np + r.denominators.size() * nq;
}

std::size_t parameter_count(const MultiSeries& p, bool anchored) {
    return static_cast<std::size_t>(p.dim_out()) * (monomial_count(p.dim_in(), p.order()) - (anchored ? 1 : 0));
}

Prediction predict(const ChartProjection& chart, const EmbeddingConfig& cfg, const ReducedField& field,
                   const std::vector<double>& window, double horizon, double dt, const OdeOptions& opt) {
    chart.validate();
    cfg.validate();
    if (cfg.delays != chart.ambient_dim()) throw ValidationError("delay count differs from the chart dimension");
    if (field.dim() != chart.dim()) throw ValidationError("reduced field dimension differs from the chart");
    const std::size_t span = static_cast<std::size_t>(cfg.delays - 1) * static_cast<std::size_t>(cfg.lag);
    if (window.size() < span + 1) throw ValidationError("initial window is too short to embed one point");
    if (!(horizon > 0.0) || !(dt > 0.0)) throw ValidationError("horizon and dt must be positive");

    RVec y(cfg.delays);
    const std::size_t last = window.size() - 1;
    for (int k = 0; k < cfg.delays; ++k) y[k] = window[last - static_cast<std::size_t>(k) * static_cast<std::size_t>(cfg.lag)];
    OdeOptions o = opt;
    o.sample_dt = dt;

    Prediction out;
    out.reduced = integrate_reduced(field, chart.project(y), 0.0, horizon, o);
    out.observable.t = out.reduced.t;
    out.observable.status = out.reduced.status;
    out.observable.message = out.reduced.message;
    for (const auto& eta : out.reduced.x) out.observable.x.push_back(RVec::Constant(1, chart.reconstruct(eta)[0]));
    return out;
}

}  // namespace gssm
