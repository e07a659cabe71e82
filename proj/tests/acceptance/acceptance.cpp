// Acceptance checks. Without arguments every check runs and prints one line;
// with a number only that check runs. Exit status is nonzero when a selected
// check fails.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gssm/datadriven.hpp"
#include "gssm/error.hpp"
#include "gssm/io.hpp"
#include "gssm/pade.hpp"
#include "gssm/reduced.hpp"
#include "gssm/series.hpp"
#include "gssm/singularity.hpp"
#include "gssm/ssm.hpp"
#include "gssm/systems.hpp"

using namespace gssm;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    std::string out(static_cast<std::size_t>(std::snprintf(nullptr, 0, f, args...)), '\0');
    std::snprintf(out.data(), out.size() + 1, f, args...);
    return out;
}

double re(const MultiSeries& s, int k, int comp = 0) { return s.coeff(MultiIndex{k}, comp).real(); }

// ---------------------------------------------------------------- Euler

Outcome euler_1_1() {
    const RationalMap r = pade_univariate(euler_series(2), 1, 1);
    const double err = std::max({std::abs(re(r.numerator, 0)), std::abs(re(r.numerator, 1) - 1.0),
                                 std::abs(re(r.denominator(0), 0) - 1.0), std::abs(re(r.denominator(0), 1) - 1.0)});
    return {r.N == 1 && r.M == 1 && err <= 1e-12, fmt("[%d/%d] max coefficient error %.2e", r.N, r.M, err)};
}

Outcome euler_3_3() {
    const RationalMap r = pade_univariate(euler_series(6), 3, 3);
    const double a[] = {0, 11, 8, 1}, b[] = {1, 9, 18, 6};
    double err = 0.0;
    for (int k = 0; k <= 3; ++k) {
        err = std::max(err, std::abs(re(r.numerator, k) - a[k]));
        err = std::max(err, std::abs(re(r.denominator(0), k) - b[k]));
    }
    double rev = 0.0;
    for (int k = 0; k <= 3; ++k) rev = std::max(rev, std::abs(re(r.numerator, k) - a[k == 0 ? 0 : 4 - k]));
    return {r.N == 3 && r.M == 3 && err <= 1e-9,
            fmt("[%d/%d] num %.6g %.6g %.6g den 1 %.6g %.6g %.6g; max error against the printed form %.2e (numerator "
                "with reversed coefficient order: %.2e)",
                r.N, r.M, re(r.numerator, 1), re(r.numerator, 2), re(r.numerator, 3), re(r.denominator(0), 1),
                re(r.denominator(0), 2), re(r.denominator(0), 3), err, rev)};
}

double eval1(const RationalMap& r, double x) {
    CVec p(1);
    p[0] = x;
    return evaluate_rational(r, p)[0].real();
}

Outcome euler_global() {
    const double exact1 = euler_exact(1.0);
    const RationalMap r55 = pade_univariate(euler_series(10), 5, 5);
    const double e1 = std::abs(eval1(r55, 1.0) - exact1);
    std::vector<double> errs;
    for (int k = 2; k <= 5; ++k)
        errs.push_back(std::abs(eval1(pade_univariate(euler_series(2 * k), k, k), 0.5) - euler_exact(0.5)));
    bool mono = true;
    for (std::size_t i = 1; i < errs.size(); ++i) mono = mono && errs[i] < errs[i - 1];
    const bool ok = std::abs(exact1 - 0.596347) < 1e-6 && e1 <= 1e-2 && mono;
    return {ok, fmt("h(1)=%.6f, |[5/5](1)-h(1)|=%.2e; errors at 0.5 for [2/2]..[5/5]: %.1e %.1e %.1e %.1e", exact1, e1,
                    errs[0], errs[1], errs[2], errs[3])};
}

// ---------------------------------------------------- imaginary singularity

Outcome imaginary_singularity() {
    const RationalMap r = pade_univariate(imaginary_sing_series(3), 1, 2);
    double err = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double x = -5.0 + 10.0 * i / 1000;
        err = std::max(err, std::abs(eval1(r, x) - x / (1 + x * x)));
    }
    const RadiusEstimate rad = estimate_radius(imaginary_sing_series(40));
    const SingularityEstimate sing = classify_sign_pattern(imaginary_sing_series(40));
    const bool ok = err <= 1e-12 && std::abs(rad.radius - 1.0) <= 0.02 && std::abs(sing.theta - std::numbers::pi / 2) < 1e-9;
    return {ok, fmt("max error %.2e on [-5,5], radius %.4f, theta %.6f (%s)", err, rad.radius, sing.theta,
                    sing.pattern.c_str())};
}

// ---------------------------------------------------- Dauchot-Manneville

SSMModel dm_model(double s1, double s2, int order) {
    const NamedSystem ns = make_system("dauchot_manneville", {{"s1", s1}, {"s2", s2}});
    const SpectralData spec = spectral_analysis(ns.system, 1);
    SSMOptions o;
    o.style = Style::graph;
    o.order = order;
    o.projection = Projection::coordinate;
    o.coordinate = 0;
    return compute_ssm(ns.system, spec, o);
}

Outcome dm_taylor() {
    std::mt19937_64 rng(20240);
    std::uniform_real_distribution<double> u1(-0.5, -0.01), u2(-3.0, -0.1);
    double err = 0.0;
    int done = 0;
    std::string pairs;
    while (done < 5) {
        const double s1 = u1(rng);
        const double s2 = s1 + u2(rng);
        if (std::abs(2 * s1 - s2) < 0.05 || std::abs(3 * s1 - s2) < 0.05) continue;
        const SSMModel m = dm_model(s1, s2, 3);
        const double w2 = -1.0 / (2 * s1 - s2);
        const double w3 = -2.0 / ((2 * s1 - s2) * (2 * s1 - s2) * (3 * s1 - s2));
        err = std::max({err, std::abs(re(m.W, 2, 1) - w2), std::abs(re(m.W, 3, 1) - w3)});
        pairs += fmt(" (%.3f,%.3f)", s1, s2);
        ++done;
    }
    return {err <= 1e-10, fmt("max |w2,w3 error| %.2e over%s", err, pairs.c_str())};
}

struct Root {
    double x;
    std::string type;
};

// Sign changes of g on [lo, hi] refined by bisection; cells where pole(x)
// changes sign are skipped.
std::vector<double> roots_1d(const std::function<double(double)>& g, const std::function<double(double)>& pole,
                             double lo, double hi, int n) {
    std::vector<double> out;
    double xa = lo, ga = g(lo), qa = pole(lo);
    for (int i = 1; i <= n; ++i) {
        const double xb = lo + (hi - lo) * i / n, gb = g(xb), qb = pole(xb);
        if (ga == 0.0) out.push_back(xa);
        if (ga * gb < 0.0 && qa * qb > 0.0) {
            double a = xa, b = xb, fa = ga;
            for (int it = 0; it < 80; ++it) {
                const double m = 0.5 * (a + b), fm = g(m);
                if (fa * fm <= 0.0) {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            out.push_back(0.5 * (a + b));
        }
        xa = xb;
        ga = gb;
        qa = qb;
    }
    return out;
}

Outcome dm_fixed_points() {
    const NamedSystem ns = make_system("dauchot_manneville");
    const double s1 = ns.parameters.at("s1");
    RVec lo(2), hi(2);
    lo << -1, -1;
    hi << 1, 1;
    const auto oracle = fixed_points_oracle(ns.system, lo, hi);

    const SSMModel m24 = dm_model(s1, ns.parameters.at("s2"), 24);
    MultiSeries h(1, 1, 24);
    for (const auto& [k, v] : m24.W.terms()) h.set(k, 0, v[1]);
    const RationalMap hp = pade_univariate(h, 12, 12);
    auto hx = [&](double x) { return eval1(hp, x); };
    auto R = [&](double x) { return s1 * x + (1 + x) * hx(x); };
    auto Q = [&](double x) {
        const cplx z = x;
        return evaluate_denominator(hp, std::span<const cplx>(&z, 1)).real();
    };
    // One-signed coefficients put the singularity on the positive axis; the
    // approximant models it by poles there, and roots beyond the first pole
    // sit on the branch cut.
    const SingularityEstimate sing = classify_sign_pattern(h);
    double cut = 1.0;
    if (sing.theta == 0.0) {
        const auto poles = roots_1d(Q, [](double) { return 1.0; }, 0.0, 1.0, 200000);
        if (!poles.empty()) cut = poles.front();
    }
    std::vector<Root> model;
    std::vector<double> beyond;
    for (double x : roots_1d(R, Q, -1.0, 1.0, 200001)) {
        if (x >= cut) {
            beyond.push_back(x);
            continue;
        }
        RVec p(2);
        p << x, hx(x);
        Eigen::EigenSolver<RMat> es(ns.system.jacobian(p));
        model.push_back({x, stability_type(es.eigenvalues())});
    }
    std::sort(model.begin(), model.end(), [](const Root& a, const Root& b) { return a.x > b.x; });

    bool pade_ok = model.size() == oracle.size() && oracle.size() == 3;
    std::string det = fmt("[%d/%d] roots:", hp.N, hp.M);
    for (std::size_t i = 0; i < model.size(); ++i) {
        det += fmt(" %.4f(%s)", model[i].x, model[i].type.c_str());
        if (i < oracle.size())
            pade_ok = pade_ok && std::abs(model[i].x - oracle[i].x[0]) <= 1e-2 && model[i].type == oracle[i].type;
    }
    det += fmt("; %zu roots beyond the first positive pole x1=%.4f excluded", beyond.size(), cut);
    det += "; oracle:";
    for (const auto& f : oracle) det += fmt(" %.4f(%s)", f.x[0], f.type.c_str());

    // Taylor reduced dynamics R(x1) of the order-8 graph-style model.
    const SSMModel m8 = dm_model(s1, ns.parameters.at("s2"), 8);
    auto R8 = [&](double x) { return evaluate_real(m8.R, std::span<const double>(&x, 1))[0].real(); };
    std::vector<double> taylor;
    for (double x : roots_1d(R8, [](double) { return 1.0; }, -1.0, cut, 200001))
        if (std::abs(x) > 1e-6) taylor.push_back(x);
    det += fmt("; order-8 Taylor nontrivial roots in [-1,%.4f):", cut);
    for (double x : taylor) det += fmt(" %.4f", x);
    if (taylor.empty()) det += " none";
    return {pade_ok && taylor.empty(), det};
}

// ---------------------------------------------------- Shaw-Pierre

SSMModel sp_model(int order, double eps = 0.0) {
    const NamedSystem ns = make_system("shaw_pierre", {{"epsilon", eps}});
    const SpectralData spec = spectral_analysis(ns.system, 2);
    SSMOptions o;
    o.order = order;
    o.style = Style::normal_form;
    return compute_ssm(ns.system, spec, o);
}

// Values that print as p with four decimals, by rounding or truncation.
std::pair<double, double> printed_interval(double p) {
    return p >= 0 ? std::pair{p - 5e-5, p + 1e-4} : std::pair{p - 1e-4, p + 5e-5};
}

// Range of log s for which x * s^n prints as p.
std::pair<double, double> log_gauge_interval(double x, double p, int n) {
    const auto [lo, hi] = printed_interval(p);
    if (std::abs(p) < 5e-5) {
        const double bound = std::log(5e-5 / std::abs(x)) / n;
        return {-std::numeric_limits<double>::infinity(), bound};
    }
    if (x * p <= 0) return {1.0, -1.0};
    const double a = std::log(lo / x) / n, b = std::log(hi / x) / n;
    return {std::min(a, b), std::max(a, b)};
}

struct Gauge {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool empty() const { return lo > hi; }
    void cut(std::pair<double, double> iv) {
        lo = std::max(lo, iv.first);
        hi = std::min(hi, iv.second);
    }
};

const double kOmegaPrinted[] = {1.7320, 0.0385, -0.0037, 0.0004};

Gauge omega_gauge(const PolarNormalForm& pol) {
    Gauge g;
    for (int n = 1; n < 4; ++n) g.cut(log_gauge_interval(pol.omega[static_cast<std::size_t>(n)], kOmegaPrinted[n], n));
    return g;
}

bool prints_as(double x, double p) {
    const auto [lo, hi] = printed_interval(p);
    return x >= lo && x < hi;
}

Outcome sp_polar() {
    const PolarNormalForm pol = extract_polar(sp_model(7));
    bool unit = prints_as(pol.omega[0], kOmegaPrinted[0]);
    for (int n = 1; n < 4; ++n) unit = unit && prints_as(pol.omega[static_cast<std::size_t>(n)], kOmegaPrinted[n]);
    std::string det = fmt("omega = %.5f %.5f %.5f %.5f", pol.omega[0], pol.omega[1], pol.omega[2], pol.omega[3]);
    if (unit) return {true, det + " (unit gauge)"};
    const Gauge g = omega_gauge(pol);
    if (g.empty() || !prints_as(pol.omega[0], kOmegaPrinted[0])) return {false, det + "; no amplitude gauge reproduces the printed values"};
    const double s = std::exp(0.5 * (g.lo + g.hi));
    const PolarNormalForm sc = pol.rescaled(s);
    bool ok = true;
    for (int n = 0; n < 4; ++n) ok = ok && prints_as(sc.omega[static_cast<std::size_t>(n)], kOmegaPrinted[n]);
    return {ok, det + fmt("; gauge s in [%.4f, %.4f], at s=%.4f: %.4f %.4f %.4f %.4f", std::exp(g.lo), std::exp(g.hi), s,
                          sc.omega[0], sc.omega[1], sc.omega[2], sc.omega[3])};
}

Outcome sp_pade() {
    const Gauge g7 = omega_gauge(extract_polar(sp_model(7)));
    const PolarNormalForm pol = extract_polar(sp_model(11));
    const RationalMap r = pade_univariate(pol.omega_series(), 5, 5);
    // Printed values at rho^0, rho^2, rho^4; every other coefficient prints as 0.
    const double num[] = {1.7320, 0.3717, 0.0166}, den[] = {1.0, 0.1924, 0.0074};
    Gauge g = g7;
    bool ok = prints_as(re(r.numerator, 0), num[0]) && std::abs(re(r.denominator(0), 0) - 1.0) < 1e-15;
    for (int k = 1; k <= 10; ++k) {
        const double pn = (k % 2 == 0 && k <= 4) ? num[k / 2] : 0.0;
        const double pd = (k % 2 == 0 && k <= 4) ? den[k / 2] : 0.0;
        const double a = re(r.numerator, k), b = k <= r.M ? re(r.denominator(0), k) : 0.0;
        // rho -> rho sqrt(s) multiplies the rho^k coefficient by s^(k/2).
        if (a != 0.0) {
            auto iv = log_gauge_interval(a, pn, 1);
            g.cut({2.0 * iv.first / k, 2.0 * iv.second / k});
        }
        if (b != 0.0) {
            auto iv = log_gauge_interval(b, pd, 1);
            g.cut({2.0 * iv.first / k, 2.0 * iv.second / k});
        }
    }
    std::string det = fmt("[%d/%d] num %.5f %.5f %.5f den 1 %.5f %.5f", r.N, r.M, re(r.numerator, 0), re(r.numerator, 2),
                          re(r.numerator, 4), re(r.denominator(0), 2), re(r.denominator(0), 4));
    ok = ok && !g.empty();
    if (ok) {
        const double s = std::exp(0.5 * (g.lo + g.hi));
        det += fmt("; common gauge s in [%.4f, %.4f]; at s=%.4f: num %.4f %.4f %.4f den 1 %.4f %.4f", std::exp(g.lo),
                   std::exp(g.hi), s, re(r.numerator, 0), re(r.numerator, 2) * s, re(r.numerator, 4) * s * s,
                   re(r.denominator(0), 2) * s, re(r.denominator(0), 4) * s * s);
    } else {
        det += "; no gauge shared with the kappa/omega check reproduces the printed values";
    }
    return {ok, det};
}

// Full-order periodic orbits of the forced Shaw-Pierre system by shooting and
// pseudo-arclength continuation in Omega; returns (peak max|q1|, Omega).
std::pair<double, double> sp_full_order_peak(double eps) {
    using V = Eigen::Matrix<double, 4, 1>;
    using V5 = Eigen::Matrix<double, 5, 1>;
    using M5 = Eigen::Matrix<double, 5, 5>;
    const double k = 3, c = 0.003, g = 0.5;
    auto rhs = [&](double t, const V& x, double Om) {
        V d;
        d[0] = x[1];
        d[2] = x[3];
        d[1] = -(c * (2 * x[1] - x[3]) + k * (2 * x[0] - x[2]) + g * x[0] * x[0] * x[0]) + eps * std::cos(Om * t);
        d[3] = -(c * (2 * x[3] - x[1]) + k * (2 * x[2] - x[0]));
        return d;
    };
    auto flow = [&](V x, double Om, double* amp) {
        const int spp = 400;
        const double h = 2 * std::numbers::pi / Om / spp;
        double t = 0, a = 0;
        for (int s = 0; s < spp; ++s) {
            const V k1 = rhs(t, x, Om), k2 = rhs(t + h / 2, x + h / 2 * k1, Om), k3 = rhs(t + h / 2, x + h / 2 * k2, Om),
                    k4 = rhs(t + h, x + h * k3, Om);
            x += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
            t += h;
            a = std::max(a, std::abs(x[0]));
        }
        if (amp) *amp = a;
        return x;
    };
    auto F = [&](const V5& z) { return V(flow(z.head<4>(), z[4], nullptr) - z.head<4>()); };
    auto jac = [&](const V5& y, const V5& tan) {
        M5 J;
        const V f0 = F(y);
        for (int j = 0; j < 5; ++j) {
            V5 yy = y;
            const double h = 1e-7 * std::max(1.0, std::abs(y[j]));
            yy[j] += h;
            J.block<4, 1>(0, j) = (F(yy) - f0) / h;
        }
        J.row(4) = tan.transpose();
        return std::pair{J, f0};
    };
    double Om = 1.70;
    V x = V::Zero();
    for (int p = 0; p < 3000; ++p) x = flow(x, Om, nullptr);
    V5 z, tan = V5::Zero();
    z << x, Om;
    tan[4] = 1;
    double ds = 0.02, best = 0, bestOm = 0;
    bool turned = false;
    for (int step = 0; step < 4000; ++step) {
        const V5 zp = z + ds * tan;
        V5 y = zp;
        bool ok = false;
        for (int it = 0; it < 20; ++it) {
            auto [J, f0] = jac(y, tan);
            V5 r;
            r.head<4>() = f0;
            r[4] = tan.dot(y - zp);
            const V5 dy = J.fullPivLu().solve(r);
            y -= dy;
            if (dy.norm() < 1e-11) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            ds /= 2;
            if (ds < 1e-6) break;
            continue;
        }
        auto [J, f0] = jac(y, tan);
        V5 e = V5::Zero();
        e[4] = 1;
        V5 nt = J.fullPivLu().solve(e).normalized();
        if (nt.dot(tan) < 0) nt = -nt;
        tan = nt;
        z = y;
        double a;
        flow(z.head<4>(), z[4], &a);
        if (a > best) {
            best = a;
            bestOm = z[4];
        }
        if (tan[4] < 0) turned = true;
        // Past the fold and back on the lower branch beyond it.
        if (turned && tan[4] > 0 && a < 0.5 * best) break;
        ds = std::min(ds * 1.2, 0.05);
    }
    return {best, bestOm};
}

Outcome sp_forced_response() {
    const double eps = 0.05;
    const NamedSystem ns = make_system("shaw_pierre", {{"epsilon", eps}});
    const SSMModel m = sp_model(15, eps);
    const PolarNormalForm pol = extract_polar(m);
    const RationalMap kp = pade_univariate(pol.kappa_series(), 7, 7), wp = pade_univariate(pol.omega_series(), 7, 7);
    const PolarFunctions pf = PolarFunctions::from_rational(kp, wp);
    const RationalMap Wq = pade_multivariate(m.W.component(0), 5, 5);
    const double eps_f = eps * forcing_projection(m, ns.system.forcing);
    auto amp = [&](double rho) {
        double a = 0;
        for (int j = 0; j < 64; ++j) {
            const double th = 2 * std::numbers::pi * j / 64;
            CVec p(2);
            p << std::polar(rho, th), std::polar(rho, -th);
            a = std::max(a, std::abs(evaluate_rational(Wq, p)[0].real()));
        }
        return a;
    };
    std::vector<double> grid;
    for (int i = 1; i <= 8000; ++i) grid.push_back(0.001 * i);
    const FRCBranch br = forced_response(pf, eps_f, grid, amp);
    double worst = 0;
    for (const auto& p : br.points) worst = std::max(worst, std::abs(frc_residual(pf, eps_f, p.rho, p.Omega)));
    const FRCPoint* pk = br.peak();
    const auto [a_or, om_or] = sp_full_order_peak(eps);
    if (!pk) return {false, "no forced response points"};
    const double ea = std::abs(pk->amplitude - a_or) / a_or, eo = std::abs(pk->Omega - om_or) / om_or;
    return {ea <= 0.05 && eo <= 0.05 && worst <= 1e-10,
            fmt("model peak %.4f at Omega %.4f; full-order peak %.4f at %.4f; amplitude error %.1f%%, frequency error "
                "%.1f%%; max implicit residual %.1e",
                pk->amplitude, pk->Omega, a_or, om_or, 100 * ea, 100 * eo, worst)};
}

// ---------------------------------------------------- residual slopes

Outcome residual_suite() {
    int count = 0, bad = 0;
    double worst_margin = std::numeric_limits<double>::infinity();
    std::string worst, failures;
    for (const auto& info : list_systems()) {
        const NamedSystem ns = make_system(info.id);
        SpectralOptions so;
        so.master = ns.default_master;
        const SpectralData spec = spectral_analysis(ns.system, ns.default_dim, so);
        for (Style st : {Style::graph, Style::normal_form})
            for (int order = 3; order <= 11; ++order) {
                SSMOptions o;
                o.order = order;
                o.style = st;
                ++count;
                try {
                    const SSMModel m = compute_ssm(ns.system, spec, o);
                    const double margin = residual_sweep(ns.system, m).slope - (order + 0.75);
                    if (margin < worst_margin) {
                        worst_margin = margin;
                        worst = fmt("%s/%s/%d", info.id.c_str(), to_string(st).c_str(), order);
                    }
                    if (margin < 0) {
                        ++bad;
                        failures += " " + fmt("%s/%s/%d", info.id.c_str(), to_string(st).c_str(), order);
                    }
                } catch (const std::exception& e) {
                    ++bad;
                    failures += " " + info.id + ":" + e.what();
                }
            }
    }
    return {bad == 0, fmt("%d models, %d below order+0.75; smallest margin %.2f (%s)%s", count, bad, worst_margin,
                          worst.c_str(), failures.c_str())};
}

// ---------------------------------------------------- Pade matching

Outcome pade_match_suite() {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd;
    std::uniform_int_distribution<int> tot(1, 10);
    int bad = 0;
    double worst = 0;
    std::string failures;
    for (int trial = 0; trial < 200; ++trial) {
        const int K = tot(rng);
        const int M = std::uniform_int_distribution<int>(trial < 100 ? 0 : 1, K)(rng);
        const int N = K - M;
        MultiSeries s;
        RationalMap r;
        if (trial < 100) {
            std::vector<double> c(static_cast<std::size_t>(K) + 1);
            for (auto& v : c) v = nd(rng);
            s = MultiSeries::univariate(std::span<const double>(c));
            r = pade_univariate(s, N, M);
        } else {
            // Bivariate input: expansion of a random [N/M] rational.
            RationalMap planted;
            planted.dim_in = 2;
            planted.N = N;
            planted.M = M;
            planted.numerator = MultiSeries(2, 1, N);
            for (const auto& k : indices_up_to(2, N)) planted.numerator.set(k, 0, nd(rng));
            MultiSeries q(2, 1, M);
            q.set(MultiIndex{0, 0}, 0, 1.0);
            for (const auto& k : indices_up_to(2, M, 1)) q.set(k, 0, 0.3 * nd(rng));
            planted.denominators = {q};
            s = taylor_of_rational(planted, K);
            r = pade_multivariate(s, N, M);
        }
        const MultiSeries back = taylor_of_rational(r, K);
        double scale = 0, err = 0;
        for (const auto& [k, v] : s.terms()) scale = std::max(scale, std::abs(v[0]));
        for (const auto& k : indices_up_to(s.dim_in(), K))
            err = std::max(err, std::abs(back.coeff(k, 0) - s.coeff(k, 0)));
        const double rel = err / std::max(scale, 1e-300);
        worst = std::max(worst, rel);
        if (!(rel <= 1e-8)) {
            ++bad;
            if (s.dim_in() == 1 && r.M > 0) {
                // Smallest pole modulus: roots of Q from its companion matrix.
                auto b = r.denominator(0).dense_univariate();
                while (b.size() > 1 && b.back() == 0.0) b.pop_back();
                const int m = static_cast<int>(b.size()) - 1;
                Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(m, m);
                for (int i = 0; i < m; ++i) C(0, i) = -b[static_cast<std::size_t>(m - 1 - i)] / b[static_cast<std::size_t>(m)];
                for (int i = 1; i < m; ++i) C(i, i - 1) = 1.0;
                const double pole = Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(C).eigenvalues().cwiseAbs().minCoeff();
                failures += fmt(" [%d/%d] error %.1e, nearest pole |z|=%.3f;", N, M, rel, pole);
            } else {
                failures += fmt(" d=%d [%d/%d] error %.1e;", s.dim_in(), N, M, rel);
            }
        }
    }
    return {bad == 0, fmt("200 series (100 univariate, 100 bivariate), %d above 1e-8, worst relative error %.2e%s", bad, worst,
                          failures.c_str())};
}

// ---------------------------------------------------- regression

RegressionProblem grid_problem(int n, double x0, double x1, double y0, double y1,
                               const std::function<std::vector<double>(double, double)>& f) {
    RegressionProblem p;
    p.inputs.resize(n * n, 2);
    const int l = static_cast<int>(f(0, 0).size());
    p.targets.resize(n * n, l);
    int r = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double a = x0 + (x1 - x0) * i / (n - 1), b = y0 + (y1 - y0) * j / (n - 1);
            p.inputs(r, 0) = a;
            p.inputs(r, 1) = b;
            const auto v = f(a, b);
            for (int c = 0; c < l; ++c) p.targets(r, c) = v[static_cast<std::size_t>(c)];
            ++r;
        }
    return p;
}

double coefficient_error(const RationalMap& fit, const RationalMap& truth) {
    double err = 0;
    for (const auto& k : indices_up_to(2, truth.N))
        for (int c = 0; c < truth.dim_out; ++c)
            err = std::max(err, std::abs(fit.numerator.coeff(k, c) - truth.numerator.coeff(k, c)));
    for (const auto& k : indices_up_to(2, truth.M))
        err = std::max(err, std::abs(fit.denominator(0).coeff(k, 0) - truth.denominator(0).coeff(k, 0)));
    return err;
}

double min_denominator(const RationalMap& r, const RMat& inputs) {
    double m = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
        const cplx z[2] = {inputs(i, 0), inputs(i, 1)};
        m = std::min(m, evaluate_denominator(r, std::span<const cplx>(z, 2)).real());
    }
    return m;
}

Outcome regression_recovery() {
    // [1/2]: z1 / (1 + z1^2 + z2^2).
    RationalMap t12;
    t12.dim_in = 2;
    t12.N = 1;
    t12.M = 2;
    t12.numerator = MultiSeries(2, 1, 1);
    t12.numerator.set(MultiIndex{1, 0}, 0, 1.0);
    MultiSeries q12(2, 1, 2);
    q12.set(MultiIndex{0, 0}, 0, 1.0);
    q12.set(MultiIndex{2, 0}, 0, 1.0);
    q12.set(MultiIndex{0, 2}, 0, 1.0);
    t12.denominators = {q12};

    // [3/2], two outputs sharing Q = 1 + 0.3 z1^2 + 0.2 z1 z2 + 0.4 z2^2.
    RationalMap t32;
    t32.dim_in = 2;
    t32.dim_out = 2;
    t32.N = 3;
    t32.M = 2;
    t32.numerator = MultiSeries(2, 2, 3);
    t32.numerator.set(MultiIndex{0, 1}, 0, 1.0);
    t32.numerator.set(MultiIndex{2, 0}, 0, 0.5);
    t32.numerator.set(MultiIndex{1, 2}, 0, -0.2);
    t32.numerator.set(MultiIndex{1, 0}, 1, 1.0);
    t32.numerator.set(MultiIndex{0, 1}, 1, 0.3);
    t32.numerator.set(MultiIndex{3, 0}, 1, -1.0);
    MultiSeries q32(2, 1, 2);
    q32.set(MultiIndex{0, 0}, 0, 1.0);
    q32.set(MultiIndex{2, 0}, 0, 0.3);
    q32.set(MultiIndex{1, 1}, 0, 0.2);
    q32.set(MultiIndex{0, 2}, 0, 0.4);
    t32.denominators = {q32};

    std::string det;
    bool ok = true;
    for (const RationalMap* t : {&t12, &t32}) {
        RegressionProblem p = grid_problem(15, -1, 1, -1, 1, [&](double a, double b) {
            const CVec v = evaluate_rational(*t, CVec{{cplx(a), cplx(b)}});
            std::vector<double> out;
            for (Eigen::Index c = 0; c < v.size(); ++c) out.push_back(v[c].real());
            return out;
        });
        p.N = t->N;
        p.M = t->M;
        const RationalFit f = fit_rational_field(p);
        const double ce = coefficient_error(f.map, *t), qmin = min_denominator(f.map, p.inputs);
        ok = ok && ce <= 1e-6 && qmin >= p.delta - 1e-12;
        det += fmt("[%d/%d] coefficient error %.1e, min Q %.3f; ", t->N, t->M, ce, qmin);
    }

    // Double-well field with 1% noise, [3/2], ten seeded restarts each.
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    RegressionProblem dw = grid_problem(12, -1.5, 1.5, -1, 1, [&](double x, double y) {
        return std::vector<double>{y + 0.01 * nd(rng), x - x * x * x - 0.3 * y + 0.01 * nd(rng)};
    });
    dw.N = 3;
    dw.M = 2;
    const double lo[2] = {-1.5, -1}, hi[2] = {1.5, 1};
    const int cnt[2] = {61, 41};
    const EvaluationGrid hull = EvaluationGrid::box(lo, hi, cnt);
    int sign_unc = 0, sign_con = 0;
    double qmin_con = std::numeric_limits<double>::infinity();
    for (int constrained = 0; constrained < 2; ++constrained)
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            FitOptions o;
            o.constrained = constrained;
            o.seed = seed;
            o.init_scale = 2.0;
            const RationalFit f = fit_rational_field(dw, o);
            bool change = false;
            for (const auto& z : denominator_zero_scan(f.map, hull)) change = change || z.sign_change;
            (constrained ? sign_con : sign_unc) += change;
            if (constrained) qmin_con = std::min(qmin_con, min_denominator(f.map, dw.inputs));
        }
    ok = ok && sign_unc >= 1 && sign_con == 0 && qmin_con >= dw.delta - 1e-12;
    det += fmt("double well: sign changes in %d/10 unconstrained and %d/10 constrained fits (min Q %.3f)", sign_unc,
               sign_con, qmin_con);
    return {ok, det};
}

// ---------------------------------------------------- chaos diagnostics

Outcome chaos_diagnostics() {
    PolySystem s;
    s.linear = RMat{{0, 1}, {1, -0.25}};
    s.nonlinearity = MultiSeries(2, 2, 3);
    s.nonlinearity.set(MultiIndex{3, 0}, 1, -1.0);
    s.forcing = RVec::Unit(2, 1);
    s.epsilon = 0.4;
    s.omega = 1.0;
    const ReducedField f = ReducedField::from_system(s);
    RVec ic(2);
    ic << 0.1, 0.0;
    OdeOptions o;
    o.rtol = 1e-12;
    o.atol = 1e-15;
    std::vector<double> ex;
    for (double pert : {1e-6, 1e-7, 1e-8}) ex.push_back(lyapunov_estimate(f, ic, pert, 1000.0, 1.0, 100.0, o).exponent);
    const double mean = (ex[0] + ex[1] + ex[2]) / 3;
    double spread = 0;
    for (double e : ex) spread = std::max(spread, std::abs(e - mean) / std::abs(mean));
    OdeOptions op;
    op.sample_dt = 0.05;
    const double pf = peak_fraction(psd_estimate(integrate_reduced(f, ic, 0, 2000, op), 0));
    const bool ok = ex[0] > 0 && ex[1] > 0 && ex[2] > 0 && spread <= 0.1 && pf <= 0.9;
    return {ok, fmt("exponents %.4f %.4f %.4f (spread %.1e), largest bin %.3f of total power", ex[0], ex[1], ex[2], spread, pf)};
}

// ---------------------------------------------------- imported 60-D model

// Oscillatory master p' = lambda p + beta p^2 conj(p) in (u, v) = (Re p, Im p)
// and real slaves z_s' = mu_s z_s + c_s (u^2 + v^2), mixed by Givens
// rotations. The slow SSM is z_s = sum_n w_{s,n} |p|^{2n} with
// w_n = (c delta_{n1} - 2 (n-1) Re(beta) w_{n-1}) / (2 n Re(lambda) - mu_s).
Outcome imported_model() {
    const int n = 60, order = 11;
    const cplx lam(-0.05, 1.0), beta(-0.02, 0.3);
    std::vector<double> mu, cs;
    for (int s = 0; s < n - 2; ++s) {
        mu.push_back(-0.33 - 0.137 * s);
        cs.push_back(0.3 * std::cos(1.0 + s));
    }
    RMat A = RMat::Zero(n, n);
    A(0, 0) = lam.real();
    A(0, 1) = -lam.imag();
    A(1, 0) = lam.imag();
    A(1, 1) = lam.real();
    for (int s = 0; s < n - 2; ++s) A(2 + s, 2 + s) = mu[static_cast<std::size_t>(s)];
    MultiSeries fy(n, n, 3);
    const MultiIndex uu = MultiIndex::unit(n, 0) + MultiIndex::unit(n, 0), vv = MultiIndex::unit(n, 1) + MultiIndex::unit(n, 1);
    const MultiIndex u = MultiIndex::unit(n, 0), v = MultiIndex::unit(n, 1);
    // beta (u + i v)(u^2 + v^2) split into real and imaginary rows.
    for (const auto& [mono, w] : {std::pair{uu, 1.0}, std::pair{vv, 1.0}}) {
        fy.add(mono + u, 0, beta.real() * w);
        fy.add(mono + v, 0, -beta.imag() * w);
        fy.add(mono + u, 1, beta.imag() * w);
        fy.add(mono + v, 1, beta.real() * w);
        for (int s = 0; s < n - 2; ++s) fy.add(mono, 2 + s, cs[static_cast<std::size_t>(s)] * w);
    }
    // Orthogonal mixing x = Q y: pairs (0,2), (1,3), (4,5), (6,7), ...
    RMat Qm = RMat::Identity(n, n);
    auto givens = [&](int i, int j, double th) {
        RMat G = RMat::Identity(n, n);
        G(i, i) = G(j, j) = std::cos(th);
        G(i, j) = -std::sin(th);
        G(j, i) = std::sin(th);
        Qm = G * Qm;
    };
    givens(0, 2, 0.4);
    givens(1, 3, -0.7);
    for (int i = 4; i + 1 < n; i += 2) givens(i, i + 1, 0.1 * i);
    MultiSeries inner(n, n, 1);  // y = Q^T x
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            if (Qm(c, r) != 0.0) inner.set(MultiIndex::unit(n, c), r, Qm(c, r));
    PolySystem sys;
    sys.linear = Qm * A * Qm.transpose();
    sys.nonlinearity = compose_truncated(fy, inner, 3).transformed(Qm.cast<cplx>());
    sys.nonlinearity.prune(0.0);

    const SpectralData spec = spectral_analysis(sys, 2);
    // Coefficient vector of p in x: Q (1/2, -i/2, 0, ...); rescale p = k q to
    // the solver's eigenvector normalization.
    CVec e = CVec::Zero(n);
    e[0] = 0.5;
    e[1] = cplx(0, -0.5);
    e = Qm.cast<cplx>() * e;
    Eigen::Index j0;
    e.cwiseAbs().maxCoeff(&j0);
    const CVec r0 = spec.right.col(spec.master[0]);
    const cplx k = r0[j0] / e[j0];
    const double tangency = (r0 - k * e).norm();
    const double k2 = std::norm(k);

    SSMModel m;
    m.spectral = spec;
    m.style = Style::normal_form;
    m.order = order;
    m.W = MultiSeries(2, n, order);
    m.R = MultiSeries(2, 2, order);
    CVec ey = CVec::Zero(n), ey_bar = CVec::Zero(n);
    ey[0] = 0.5 * k;
    ey[1] = cplx(0, -0.5) * k;
    ey_bar[0] = 0.5 * std::conj(k);
    ey_bar[1] = cplx(0, 0.5) * std::conj(k);
    m.W.set(MultiIndex{1, 0}, Qm.cast<cplx>() * ey);
    m.W.set(MultiIndex{0, 1}, Qm.cast<cplx>() * ey_bar);
    std::vector<std::vector<double>> w(static_cast<std::size_t>(n - 2));
    for (int s = 0; s < n - 2; ++s) {
        auto& ws = w[static_cast<std::size_t>(s)];
        ws.assign(1, 0.0);
        for (int nn = 1; 2 * nn <= order; ++nn) {
            const double prev = ws.back();
            ws.push_back(((nn == 1 ? cs[static_cast<std::size_t>(s)] : 0.0) - 2.0 * (nn - 1) * beta.real() * prev) /
                         (2.0 * nn * lam.real() - mu[static_cast<std::size_t>(s)]));
        }
    }
    for (int nn = 1; 2 * nn <= order; ++nn) {
        CVec y = CVec::Zero(n);
        for (int s = 0; s < n - 2; ++s) y[2 + s] = w[static_cast<std::size_t>(s)][static_cast<std::size_t>(nn)] * std::pow(k2, nn);
        m.W.set(MultiIndex{nn, nn}, Qm.cast<cplx>() * y);
    }
    m.R.set(MultiIndex{1, 0}, 0, lam);
    m.R.set(MultiIndex{0, 1}, 1, std::conj(lam));
    m.R.set(MultiIndex{2, 1}, 0, beta * k2);
    m.R.set(MultiIndex{1, 2}, 1, std::conj(beta) * k2);

    std::ostringstream first;
    write_model(first, m);
    std::istringstream in(first.str());
    const SSMModel imported = read_model(in);
    std::ostringstream second;
    write_model(second, imported);
    const bool bitwise = first.str() == second.str() && imported.W == m.W && imported.R == m.R;

    std::ostringstream sys_text;
    write_system(sys_text, sys);
    std::istringstream sys_in(sys_text.str());
    const PolySystem sys_back = read_system(sys_in);
    std::ostringstream sys_again;
    write_system(sys_again, sys_back);
    const bool sys_round = sys_text.str() == sys_again.str();

    const ResidualStats rs = residual_sweep(sys_back, imported);
    const bool ok = bitwise && sys_round && tangency < 1e-10 && rs.slope >= order + 0.75;
    return {ok, fmt("n=%d, model file %zu bytes, round trip %s, system round trip %s, tangency %.1e, residual slope %.2f "
                    "(order %d)",
                    n, first.str().size(), bitwise ? "bitwise" : "MISMATCH", sys_round ? "bitwise" : "MISMATCH",
                    tangency, rs.slope, order)};
}

struct Check {
    int id;
    const char* name;
    Outcome (*fn)();
};

const Check kChecks[] = {
    {1, "Euler [1/1]", euler_1_1},
    {2, "Euler [3/3]", euler_3_3},
    {3, "Euler global convergence", euler_global},
    {4, "imaginary singularity", imaginary_singularity},
    {5, "Dauchot-Manneville Taylor coefficients", dm_taylor},
    {6, "Dauchot-Manneville fixed points", dm_fixed_points},
    {7, "Shaw-Pierre kappa/omega", sp_polar},
    {8, "Shaw-Pierre omega [5/5]", sp_pade},
    {9, "Shaw-Pierre forced response", sp_forced_response},
    {10, "invariance residual slopes", residual_suite},
    {11, "Pade re-expansion", pade_match_suite},
    {12, "rational regression", regression_recovery},
    {13, "chaos diagnostics", chaos_diagnostics},
    {14, "imported 60-D model", imported_model},
};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);
    int failed = 0;
    for (const auto& c : kChecks) {
        if (only && c.id != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%2d] %s  %s: %s (%.1fs)\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), sec);
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed ? 1 : 0;
}
