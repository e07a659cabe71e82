#include "gssm/qp.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>

#include "gssm/error.hpp"

namespace gssm {

namespace {

double max_step(const RVec& v, const RVec& dv) {
    double a = 1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (dv[i] < 0.0) a = std::min(a, -v[i] / dv[i]);
    return a;
}

}  // namespace

QPResult solve_qp(const RMat& H, const RVec& c, const RMat& G, const RVec& h, const QPOptions& opt) {
    const Eigen::Index n = H.rows();
    const Eigen::Index m = G.rows();
    if (H.cols() != n || c.size() != n || (m > 0 && G.cols() != n) || h.size() != m)
        throw ValidationError("QP dimensions are inconsistent");

    const double reg = 1e-14 * std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
    const RMat Hr = H + reg * RMat::Identity(n, n);

    QPResult res;
    if (m == 0) {
        res.x = Hr.ldlt().solve(-c);
        res.z.resize(0);
        res.converged = true;
        return res;
    }

    RVec x = Hr.ldlt().solve(-c);
    if (!x.allFinite()) x = RVec::Zero(n);
    RVec s = (G * x - h).cwiseMax(1.0);
    RVec z = RVec::Ones(m);

    const double cscale = 1.0 + c.lpNorm<Eigen::Infinity>();
    const double hscale = 1.0 + h.lpNorm<Eigen::Infinity>();

    for (int it = 0; it < opt.max_iterations; ++it) {
        const RVec rd = H * x + c - G.transpose() * z;
        const RVec rp = G * x - s - h;
        const double mu = s.dot(z) / static_cast<double>(m);
        res.iterations = it;
        res.primal_residual = rp.lpNorm<Eigen::Infinity>() / hscale;
        res.dual_residual = rd.lpNorm<Eigen::Infinity>() / cscale;
        res.gap = mu;
        if (res.primal_residual < opt.tol && res.dual_residual < opt.tol && mu < opt.tol) {
            res.converged = true;
            break;
        }

        const RVec w = z.cwiseQuotient(s);
        RMat K = Hr + G.transpose() * w.asDiagonal() * G;
        Eigen::LDLT<RMat> ldlt(K);
        if (ldlt.info() != Eigen::Success) throw NumericalError("QP normal matrix factorization failed");

        auto direction = [&](const RVec& rc, RVec& dx, RVec& ds, RVec& dz) {
            const RVec rhs = -rd - G.transpose() * (w.cwiseProduct(rp) + rc.cwiseQuotient(s));
            dx = ldlt.solve(rhs);
            dz = -w.cwiseProduct(rp + G * dx) - rc.cwiseQuotient(s);
            ds = -(rc + s.cwiseProduct(dz)).cwiseQuotient(z);
        };

        RVec dx, ds, dz;
        RVec rc = s.cwiseProduct(z);
        direction(rc, dx, ds, dz);
        const double a_aff = std::min(max_step(s, ds), max_step(z, dz));
        const double mu_aff = (s + a_aff * ds).dot(z + a_aff * dz) / static_cast<double>(m);
        const double sigma = std::pow(mu_aff / mu, 3);

        rc = s.cwiseProduct(z) + ds.cwiseProduct(dz) - RVec::Constant(m, sigma * mu);
        direction(rc, dx, ds, dz);
        const double a = 0.99 * std::min(max_step(s, ds), max_step(z, dz));
        x += a * dx;
        s += a * ds;
        z += a * dz;
        if (!x.allFinite() || !s.allFinite() || !z.allFinite()) throw NumericalError("QP iteration diverged");
    }
    res.x = x;
    res.z = z;
    return res;
}

}  // namespace gssm
