#include "gssm/systems.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>

#include "gssm/error.hpp"

namespace gssm {

namespace {

ParameterMap resolve(const std::string& id, const ParameterMap& defaults, const ParameterMap& given) {
    ParameterMap out = defaults;
    for (const auto& [k, v] : given) {
        if (!defaults.count(k)) throw ValidationError("unknown parameter '" + k + "' for system " + id);
        if (!std::isfinite(v)) throw ValidationError("parameter '" + k + "' is not finite");
        out[k] = v;
    }
    return out;
}

const std::vector<SystemInfo>& registry() {
    static const std::vector<SystemInfo> list = {
        {"euler", "x' = x^2, y' = x - y; center manifold with a divergent Taylor series", {}},
        {"dauchot_manneville", "bistable non-normal 2D model with quadratic coupling (x1 x2, -x1^2)",
         {{"s1", -0.038}, {"s2", -1.0}}},
        {"imaginary_sing", "x' = x, y' = -y + 2x/(x^2+1)^2 (nonlinearity Taylor-truncated)", {{"truncation", 15.0}}},
        {"shaw_pierre", "forced damped 2-DOF oscillator with cubic spring on q1, state (q1, q1', q2, q2')",
         {{"k", 3.0}, {"c", 0.003}, {"gamma", 0.5}, {"epsilon", 0.0}, {"Omega", 0.0}}},
    };
    return list;
}

}  // namespace

std::vector<SystemInfo> list_systems() { return registry(); }

NamedSystem make_system(const std::string& id, const ParameterMap& params) {
    if (id == "custom") throw ValidationError("custom systems are read from a system file");
    const auto it = std::find_if(registry().begin(), registry().end(), [&](const SystemInfo& s) { return s.id == id; });
    if (it == registry().end()) throw ValidationError("unknown system id '" + id + "'");

    NamedSystem ns;
    ns.id = id;
    ns.parameters = resolve(id, it->defaults, params);
    const ParameterMap& p = ns.parameters;
    PolySystem& sys = ns.system;

    if (id == "euler") {
        sys.linear = RMat{{0.0, 0.0}, {1.0, -1.0}};
        sys.nonlinearity = MultiSeries(2, 2, 2);
        sys.nonlinearity.set(MultiIndex{2, 0}, 0, 1.0);
        ns.closed_form = [](const RVec& x) {
            RVec f(2);
            f << x[0] * x[0], x[0] - x[1];
            return f;
        };
    } else if (id == "dauchot_manneville") {
        const double s1 = p.at("s1"), s2 = p.at("s2");
        if (!(s1 < 0.0 && s2 < 0.0)) throw ValidationError("dauchot_manneville needs s1 < 0 and s2 < 0");
        if (!(s2 < s1)) throw ValidationError("dauchot_manneville needs s2 < s1 for a slow direction");
        sys.linear = RMat{{s1, 1.0}, {0.0, s2}};
        sys.nonlinearity = MultiSeries(2, 2, 2);
        sys.nonlinearity.set(MultiIndex{1, 1}, 0, 1.0);
        sys.nonlinearity.set(MultiIndex{2, 0}, 1, -1.0);
        ns.closed_form = [s1, s2](const RVec& x) {
            RVec f(2);
            f << s1 * x[0] + x[1] + x[0] * x[1], s2 * x[1] - x[0] * x[0];
            return f;
        };
    } else if (id == "imaginary_sing") {
        const double tr = p.at("truncation");
        if (tr < 3.0 || tr != std::floor(tr)) throw ValidationError("imaginary_sing truncation must be an integer >= 3");
        const int order = static_cast<int>(tr);
        // 2x/(1+x^2)^2 = sum_n 2 (n+1) (-1)^n x^{2n+1}; the linear term joins A.
        sys.linear = RMat{{1.0, 0.0}, {2.0, -1.0}};
        sys.nonlinearity = MultiSeries(2, 2, order);
        for (int n = 1; 2 * n + 1 <= order; ++n)
            sys.nonlinearity.set(MultiIndex{2 * n + 1, 0}, 1, 2.0 * (n + 1) * ((n % 2) ? -1.0 : 1.0));
        ns.default_master = {0};
        ns.closed_form = [](const RVec& x) {
            RVec f(2);
            const double s = 1.0 + x[0] * x[0];
            f << x[0], -x[1] + 2.0 * x[0] / (s * s);
            return f;
        };
    } else {  // shaw_pierre
        const double k = p.at("k"), c = p.at("c"), g = p.at("gamma");
        if (!(k > 0.0) || c < 0.0) throw ValidationError("shaw_pierre needs k > 0 and c >= 0");
        if (p.at("epsilon") < 0.0) throw ValidationError("shaw_pierre forcing amplitude must be nonnegative");
        sys.linear = RMat{{0.0, 1.0, 0.0, 0.0},
                          {-2.0 * k, -2.0 * c, k, c},
                          {0.0, 0.0, 0.0, 1.0},
                          {k, c, -2.0 * k, -2.0 * c}};
        sys.nonlinearity = MultiSeries(4, 4, 3);
        if (g != 0.0) sys.nonlinearity.set(MultiIndex{3, 0, 0, 0}, 1, -g);
        sys.forcing = RVec::Unit(4, 1);
        sys.epsilon = p.at("epsilon");
        sys.omega = p.at("Omega");
        ns.default_dim = 2;
        ns.closed_form = [k, c, g](const RVec& x) {
            RVec f(4);
            f << x[1], -c * (2.0 * x[1] - x[3]) - k * (2.0 * x[0] - x[2]) - g * x[0] * x[0] * x[0], x[3],
                -c * (2.0 * x[3] - x[1]) - k * (2.0 * x[2] - x[0]);
            return f;
        };
    }
    sys.validate();
    return ns;
}

double euler_exact(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) throw ValidationError("euler_exact needs x > 0 (branch cut on the negative axis)");
    boost::math::quadrature::exp_sinh<double> integrator;
    double err = 0.0;
    const double v = integrator.integrate([x](double t) { return std::exp(-t) / (1.0 + x * t); }, 1e-14, &err);
    if (!(err < 1e-10)) throw NumericalError("euler_exact quadrature did not reach 1e-10");
    return x * v;
}

MultiSeries euler_series(int order) {
    if (order < 1) throw ValidationError("series order must be positive");
    MultiSeries s(1, 1, order);
    double f = 1.0;
    for (int n = 0; n + 1 <= order; ++n) {
        if (n > 0) f *= n;
        s.set(MultiIndex{n + 1}, 0, (n % 2) ? -f : f);
    }
    return s;
}

MultiSeries imaginary_sing_series(int order) {
    if (order < 1) throw ValidationError("series order must be positive");
    MultiSeries s(1, 1, order);
    for (int n = 0; 2 * n + 1 <= order; ++n) s.set(MultiIndex{2 * n + 1}, 0, (n % 2) ? -1.0 : 1.0);
    return s;
}

std::string stability_type(const CVec& ev, double tol) {
    bool neg = false, pos = false;
    const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    for (const auto& l : ev) {
        if (std::abs(l.real()) <= tol * scale) return "nonhyperbolic";
        (l.real() < 0.0 ? neg : pos) = true;
    }
    if (neg && pos) return "saddle";
    return neg ? "stable" : "unstable";
}

std::vector<FixedPoint> fixed_points_oracle(const PolySystem& sys, const RVec& lo, const RVec& hi, int seeds_per_axis) {
    sys.validate();
    const int n = sys.dim();
    if (lo.size() != n || hi.size() != n) throw ValidationError("search box has wrong dimension");
    if ((hi.array() < lo.array()).any()) throw ValidationError("search box has lo > hi");
    if (seeds_per_axis < 1) throw ValidationError("need at least one seed per axis");

    const RVec margin = 1e-9 * (hi - lo).cwiseMax(1.0);
    std::vector<FixedPoint> roots;
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    for (;;) {
        RVec x(n);
        for (int a = 0; a < n; ++a)
            x[a] = seeds_per_axis == 1 ? 0.5 * (lo[a] + hi[a])
                                       : lo[a] + (hi[a] - lo[a]) * idx[static_cast<std::size_t>(a)] / (seeds_per_axis - 1);
        RVec F = sys.rhs(x);
        double fn = F.norm();
        for (int it = 0; it < 100 && fn > 0.0; ++it) {
            const RVec step = sys.jacobian(x).fullPivLu().solve(F);
            if (!step.allFinite()) break;
            double alpha = 1.0;
            bool moved = false;
            while (alpha > 1e-10) {
                const RVec xt = x - alpha * step;
                const RVec Ft = sys.rhs(xt);
                if (Ft.allFinite() && Ft.norm() < fn) {
                    x = xt;
                    F = Ft;
                    fn = Ft.norm();
                    moved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (!moved) break;
        }
        const bool inside = ((x - lo).array() >= -margin.array()).all() && ((hi - x).array() >= -margin.array()).all();
        if (fn <= 1e-11 * std::max(1.0, x.norm()) && inside) {
            const bool dup = std::any_of(roots.begin(), roots.end(), [&](const FixedPoint& r) { return (r.x - x).norm() < 1e-8; });
            if (!dup) {
                FixedPoint fp;
                fp.x = x;
                fp.eigenvalues = Eigen::EigenSolver<RMat>(sys.jacobian(x), false).eigenvalues();
                fp.type = stability_type(fp.eigenvalues);
                roots.push_back(std::move(fp));
            }
        }
        int a = 0;
        while (a < n && ++idx[static_cast<std::size_t>(a)] == seeds_per_axis) idx[static_cast<std::size_t>(a++)] = 0;
        if (a == n) break;
    }
    std::sort(roots.begin(), roots.end(), [](const FixedPoint& p, const FixedPoint& q) {
        for (Eigen::Index i = 0; i < p.x.size(); ++i)
            if (p.x[i] != q.x[i]) return p.x[i] > q.x[i];
        return false;
    });
    return roots;
}

}  // namespace gssm
