#include "gssm/ssm.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "gssm/error.hpp"

namespace gssm {

// ---------------------------------------------------------------------------
// PolySystem

void PolySystem::validate() const {
    const int n = dim();
    if (n < 1 || linear.cols() != n) throw ValidationError("linear part must be a nonempty square matrix");
    if (nonlinearity.dim_in() != n || nonlinearity.dim_out() != n)
        throw ValidationError("nonlinearity must map R^" + std::to_string(n) + " to itself");
    if (!nonlinearity.empty() && nonlinearity.lowest_order() < 2)
        throw ValidationError("nonlinearity must start at total order 2");
    if (forcing.size() != 0 && forcing.size() != n) throw ValidationError("forcing vector has wrong length");
    if (epsilon < 0.0) throw ValidationError("forcing amplitude must be nonnegative");
    if (!linear.allFinite()) throw ValidationError("linear part has non-finite entries");
}

RVec PolySystem::rhs(const RVec& x) const {
    RVec out = linear * x;
    if (!nonlinearity.empty()) out += evaluate_real(nonlinearity, std::span<const double>(x.data(), static_cast<std::size_t>(x.size()))).real();
    return out;
}

RVec PolySystem::rhs(double t, const RVec& x) const {
    RVec out = rhs(x);
    if (forcing.size() == dim() && epsilon != 0.0) out += epsilon * std::cos(omega * t) * forcing;
    return out;
}

CVec PolySystem::rhs(const CVec& x) const {
    CVec out = linear.cast<cplx>() * x;
    if (!nonlinearity.empty()) out += evaluate(nonlinearity, x);
    return out;
}

RMat PolySystem::jacobian(const RVec& x) const {
    RMat J = linear;
    const std::span<const double> px(x.data(), static_cast<std::size_t>(x.size()));
    for (int j = 0; j < dim(); ++j) {
        if (nonlinearity.empty()) break;
        J.col(j) += evaluate_real(derivative(nonlinearity, j), px).real();
    }
    return J;
}

std::string to_string(Style s) { return s == Style::graph ? "graph" : "normal_form"; }

std::string to_string(Projection p) {
    switch (p) {
        case Projection::spectral: return "spectral";
        case Projection::orthogonal: return "orthogonal";
        case Projection::coordinate: return "coordinate";
    }
    return "spectral";
}

Style parse_style(const std::string& s) {
    if (s == "graph") return Style::graph;
    if (s == "normal_form" || s == "normal-form" || s == "nf") return Style::normal_form;
    throw ValidationError("unknown style '" + s + "' (expected graph or normal_form)");
}

Projection parse_projection(const std::string& s) {
    if (s == "spectral") return Projection::spectral;
    if (s == "orthogonal") return Projection::orthogonal;
    if (s == "coordinate") return Projection::coordinate;
    throw ValidationError("unknown projection '" + s + "'");
}

// ---------------------------------------------------------------------------
// Spectral data

CVec SpectralData::master_eigenvalues() const {
    CVec out(d());
    for (int i = 0; i < d(); ++i) out[i] = eigenvalues[master[static_cast<std::size_t>(i)]];
    return out;
}

bool SpectralData::oscillatory_pair() const {
    if (d() != 2) return false;
    const cplx a = eigenvalues[master[0]];
    const cplx b = eigenvalues[master[1]];
    return a.imag() != 0.0 && std::abs(a - std::conj(b)) <= 1e-10 * std::max(1.0, std::abs(a));
}

std::vector<int> SpectralData::slaves() const {
    std::vector<int> out;
    for (int j = 0; j < n(); ++j)
        if (std::find(master.begin(), master.end(), j) == master.end()) out.push_back(j);
    return out;
}

namespace {

double spectral_scale(const CVec& lam) {
    const double s = lam.size() ? lam.cwiseAbs().maxCoeff() : 0.0;
    return s > 0.0 ? s : 1.0;
}

void normalize_vector(Eigen::Ref<CVec> v) {
    v /= v.norm();
    const double vmax = v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > 1e-12 * vmax) {
            v *= std::abs(v[i]) / v[i];
            v[i] = std::abs(v[i]);
            return;
        }
    }
}

}  // namespace

SpectralData spectral_analysis(const PolySystem& sys, int d, const SpectralOptions& opt) {
    sys.validate();
    if (d != 1 && d != 2) throw ValidationError("only 1- and 2-dimensional SSMs are supported");
    const int n = sys.dim();
    if (d > n) throw ValidationError("SSM dimension exceeds phase-space dimension");

    Eigen::EigenSolver<RMat> es(sys.linear, true);
    if (es.info() != Eigen::Success) throw NumericalError("eigenvalue computation failed");
    const CVec lam0 = es.eigenvalues();
    const CMat vec0 = es.eigenvectors();

    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (lam0[a].real() != lam0[b].real()) return lam0[a].real() > lam0[b].real();
        return lam0[a].imag() > lam0[b].imag();
    });

    SpectralData s;
    s.eigenvalues.resize(n);
    s.right.resize(n, n);
    for (int i = 0; i < n; ++i) {
        s.eigenvalues[i] = lam0[order[static_cast<std::size_t>(i)]];
        s.right.col(i) = vec0.col(order[static_cast<std::size_t>(i)]);
    }
    const double scale = spectral_scale(s.eigenvalues);
    // Snap eigenvalues that are real to within roundoff.
    for (int i = 0; i < n; ++i)
        if (std::abs(s.eigenvalues[i].imag()) <= 1e-14 * scale) s.eigenvalues[i] = s.eigenvalues[i].real();

    std::vector<bool> done(static_cast<std::size_t>(n), false);
    for (int i = 0; i < n; ++i) {
        if (s.eigenvalues[i].imag() < 0.0) continue;
        normalize_vector(s.right.col(i));
        done[static_cast<std::size_t>(i)] = true;
    }
    for (int i = 0; i < n; ++i) {
        if (done[static_cast<std::size_t>(i)]) continue;
        int partner = -1;
        for (int j = 0; j < n; ++j) {
            if (s.eigenvalues[j].imag() > 0.0 &&
                std::abs(s.eigenvalues[j] - std::conj(s.eigenvalues[i])) <= 1e-10 * scale) {
                partner = j;
                break;
            }
        }
        if (partner >= 0) {
            s.right.col(i) = s.right.col(partner).conjugate();
            s.eigenvalues[i] = std::conj(s.eigenvalues[partner]);
        } else {
            normalize_vector(s.right.col(i));
        }
    }

    Eigen::JacobiSVD<CMat> svd(s.right);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= 1e-12 * sv(0)) throw NumericalError("linear part is defective (eigenvectors are dependent)");
    s.left = s.right.partialPivLu().inverse();

    if (!opt.master.empty()) {
        if (static_cast<int>(opt.master.size()) != d)
            throw ValidationError("explicit master set must have d entries");
        for (int m : opt.master)
            if (m < 0 || m >= n) throw ValidationError("master index out of range");
        s.master = opt.master;
    } else {
        std::vector<int> by_speed(order.size());
        for (int i = 0; i < n; ++i) by_speed[static_cast<std::size_t>(i)] = i;
        std::stable_sort(by_speed.begin(), by_speed.end(), [&](int a, int b) {
            const double ra = std::abs(s.eigenvalues[a].real()), rb = std::abs(s.eigenvalues[b].real());
            if (ra != rb) return ra < rb;
            return std::abs(s.eigenvalues[a]) < std::abs(s.eigenvalues[b]);
        });
        s.master.assign(by_speed.begin(), by_speed.begin() + d);
    }
    if (d == 2 && s.eigenvalues[s.master[0]].imag() < s.eigenvalues[s.master[1]].imag())
        std::swap(s.master[0], s.master[1]);
    for (int m : s.master) {
        const bool cx = s.eigenvalues[m].imag() != 0.0;
        if (cx && d == 1) throw ValidationError("a one-dimensional SSM needs a real master eigenvalue");
    }
    if (d == 2) {
        const bool c0 = s.eigenvalues[s.master[0]].imag() != 0.0;
        const bool c1 = s.eigenvalues[s.master[1]].imag() != 0.0;
        if ((c0 || c1) && !s.oscillatory_pair())
            throw ValidationError("master set splits a complex-conjugate pair");
    }

    double min_master = std::numeric_limits<double>::infinity();
    for (int m : s.master) min_master = std::min(min_master, s.eigenvalues[m].real());
    for (int j : s.slaves())
        if (s.eigenvalues[j].real() >= min_master)
            throw ValidationError("no spectral gap: slave eigenvalue " + std::to_string(s.eigenvalues[j].real()) +
                                  " has real part >= master " + std::to_string(min_master));

    if (opt.check_order >= 2) check_nonresonance(s, opt.check_order, opt.resonance_tol);
    return s;
}

void check_nonresonance(const SpectralData& spec, int order, double tol) {
    const CVec lamE = spec.master_eigenvalues();
    const double cut = tol * spectral_scale(spec.eigenvalues);
    for (const auto& m : indices_up_to(spec.d(), order, 2)) {
        cplx mu = 0.0;
        for (int i = 0; i < spec.d(); ++i) mu += static_cast<double>(m[i]) * lamE[i];
        for (int j : spec.slaves()) {
            if (std::abs(spec.eigenvalues[j] - mu) < cut)
                throw ResonanceError("resonance between eigenvalue " + std::to_string(j) + " and master monomial " +
                                         m.str(),
                                     j, m.str());
        }
    }
}

// ---------------------------------------------------------------------------
// Order-by-order solve

SSMModel compute_ssm(const PolySystem& sys, const SpectralData& spec_in, const SSMOptions& opt) {
    sys.validate();
    const int n = sys.dim();
    const int d = spec_in.d();
    const int N = opt.order;
    if (N < 1) throw ValidationError("SSM order must be at least 1");
    if (spec_in.n() != n) throw ValidationError("spectral data does not match system dimension");

    SSMModel model;
    model.spectral = spec_in;
    model.style = opt.style;
    model.projection = opt.projection;
    model.coordinate = opt.coordinate;
    model.order = N;
    SpectralData& spec = model.spectral;

    if (opt.projection == Projection::coordinate) {
        if (d != 1) throw ValidationError("coordinate projection needs a one-dimensional SSM");
        if (opt.coordinate < 0 || opt.coordinate >= n) throw ValidationError("projection coordinate out of range");
        const int m0 = spec.master[0];
        const cplx c = spec.right(opt.coordinate, m0);
        if (std::abs(c) < 1e-14) throw ValidationError("master eigenvector has no component along the coordinate");
        spec.right.col(m0) /= c;
        spec.left.row(m0) *= c;
    }

    const CMat& V = spec.right;
    const CMat& Vinv = spec.left;
    const CVec lam = spec.eigenvalues;
    const CVec lamE = spec.master_eigenvalues();
    const std::vector<int> slaves = spec.slaves();
    const double cut = opt.resonance_tol * spectral_scale(lam);
    const bool pair = spec.oscillatory_pair();

    CMat P(d, n);
    switch (opt.projection) {
        case Projection::spectral:
            for (int i = 0; i < d; ++i) P.row(i) = Vinv.row(spec.master[static_cast<std::size_t>(i)]);
            break;
        case Projection::orthogonal: {
            CMat VE(n, d);
            for (int i = 0; i < d; ++i) VE.col(i) = V.col(spec.master[static_cast<std::size_t>(i)]);
            P = (VE.adjoint() * VE).inverse() * VE.adjoint();
            break;
        }
        case Projection::coordinate:
            P = CMat::Zero(1, n);
            P(0, opt.coordinate) = 1.0;
            break;
    }
    const CMat PV = P * V;
    CMat Qs(d, static_cast<int>(slaves.size()));
    for (std::size_t s = 0; s < slaves.size(); ++s) Qs.col(static_cast<int>(s)) = PV.col(slaves[s]);

    // Modal nonlinearity g(y) = V^{-1} f(V y).
    MultiSeries Vlin(n, n, 1);
    for (int j = 0; j < n; ++j) Vlin.set(MultiIndex::unit(n, j), V.col(j));
    const int forder = std::max(sys.nonlinearity.highest_order(), 0);
    MultiSeries g(n, n, std::max(forder, 1));
    if (!sys.nonlinearity.empty()) g = compose_truncated(sys.nonlinearity, Vlin, forder).transformed(Vinv);

    MultiSeries Y(d, n, N);
    MultiSeries R(d, d, N);
    for (int i = 0; i < d; ++i) {
        Y.set(MultiIndex::unit(d, i), spec.master[static_cast<std::size_t>(i)], 1.0);
        R.set(MultiIndex::unit(d, i), i, lamE[i]);
    }

    for (int k = 2; k <= N; ++k) {
        MultiSeries G(d, n, k);
        if (!g.empty()) G = compose_truncated(g, Y.truncated(k - 1), k);

        std::map<MultiIndex, CVec> mixed;
        for (const auto& [a, ya] : Y.terms()) {
            if (a.order() < 2) continue;
            if (a.order() > k - 1) break;
            for (const auto& [b, rb] : R.terms()) {
                if (b.order() < 2) continue;
                if (a.order() + b.order() - 1 > k) break;
                if (a.order() + b.order() - 1 < k) continue;
                for (int i = 0; i < d; ++i) {
                    if (a[i] == 0 || rb[i] == cplx(0.0)) continue;
                    std::vector<int> e = a.exponents();
                    e[static_cast<std::size_t>(i)] -= 1;
                    const MultiIndex m = MultiIndex(std::move(e)) + b;
                    auto it = mixed.find(m);
                    if (it == mixed.end()) it = mixed.emplace(m, CVec::Zero(n)).first;
                    it->second += static_cast<double>(a[i]) * rb[i] * ya;
                }
            }
        }

        for (const auto& m : indices_of_order(d, k)) {
            CVec rhs = -G.coeff(m);
            if (auto it = mixed.find(m); it != mixed.end()) rhs += it->second;
            cplx mu = 0.0;
            for (int i = 0; i < d; ++i) mu += static_cast<double>(m[i]) * lamE[i];

            CVec ym = CVec::Zero(n);
            CVec rm = CVec::Zero(d);
            for (int j : slaves) {
                const cplx div = lam[j] - mu;
                if (std::abs(div) < cut)
                    throw ResonanceError("small divisor " + std::to_string(std::abs(div)) + " at row " +
                                             std::to_string(j) + ", monomial " + m.str(),
                                         j, m.str());
                ym[j] = rhs[j] / div;
            }
            if (opt.style == Style::graph) {
                CVec ys(static_cast<int>(slaves.size()));
                for (std::size_t s = 0; s < slaves.size(); ++s) ys[static_cast<int>(s)] = ym[slaves[s]];
                const CVec yM = slaves.empty() ? CVec(CVec::Zero(d)) : CVec(-Qs * ys);
                for (int i = 0; i < d; ++i) {
                    const int j = spec.master[static_cast<std::size_t>(i)];
                    ym[j] = yM[i];
                    rm[i] = (lam[j] - mu) * yM[i] - rhs[j];
                }
            } else {
                for (int i = 0; i < d; ++i) {
                    const int j = spec.master[static_cast<std::size_t>(i)];
                    const cplx div = lam[j] - mu;
                    const bool routed = pair && ((i == 0 && m[0] == m[1] + 1) || (i == 1 && m[1] == m[0] + 1));
                    if (routed || std::abs(div) < cut) {
                        rm[i] = -rhs[j];
                    } else {
                        ym[j] = rhs[j] / div;
                    }
                }
            }
            Y.set(m, ym);
            R.set(m, rm);
        }
    }

    model.W = Y.transformed(V);
    model.R = std::move(R);
    return model;
}

void validate_model(const SSMModel& model, double tol) {
    const int n = model.n(), d = model.d();
    if (d != 1 && d != 2) throw ValidationError("model dimension must be 1 or 2");
    if (model.spectral.right.rows() != n || model.spectral.right.cols() != n)
        throw ValidationError("eigenvector block has wrong shape");
    if (model.W.dim_in() != d || model.W.dim_out() != n) throw ValidationError("W has wrong shape");
    if (model.R.dim_in() != d || model.R.dim_out() != d) throw ValidationError("R has wrong shape");
    if (model.W.find(MultiIndex::zero(d)) || model.R.find(MultiIndex::zero(d)))
        throw ValidationError("W and R must vanish at the origin");
    const CVec lamE = model.spectral.master_eigenvalues();
    for (int i = 0; i < d; ++i) {
        const auto e = MultiIndex::unit(d, i);
        const CVec v = model.spectral.right.col(model.spectral.master[static_cast<std::size_t>(i)]);
        if ((model.W.coeff(e) - v).norm() > tol * std::max(1.0, v.norm()))
            throw ValidationError("W is not tangent to master eigenvector " + std::to_string(i));
        CVec r = CVec::Zero(d);
        r[i] = lamE[i];
        if ((model.R.coeff(e) - r).norm() > tol * std::max(1.0, std::abs(lamE[i])))
            throw ValidationError("linear part of R differs from the master eigenvalues");
    }
}

// ---------------------------------------------------------------------------
// Polar form

namespace {

double even_poly(const std::vector<double>& c, double rho) {
    const double u = rho * rho;
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * u + *it;
    return acc;
}

double even_poly_derivative(const std::vector<double>& c, double rho) {
    double acc = 0.0;
    for (std::size_t n = 1; n < c.size(); ++n) acc += 2.0 * static_cast<double>(n) * c[n] * std::pow(rho, 2 * static_cast<int>(n) - 1);
    return acc;
}

MultiSeries even_series(const std::vector<double>& c) {
    const int order = c.empty() ? 0 : 2 * (static_cast<int>(c.size()) - 1);
    MultiSeries s(1, 1, order);
    for (std::size_t n = 0; n < c.size(); ++n) s.set(MultiIndex{2 * static_cast<int>(n)}, 0, c[n]);
    return s;
}

}  // namespace

double PolarNormalForm::kappa_at(double rho) const { return even_poly(kappa, rho); }
double PolarNormalForm::omega_at(double rho) const { return even_poly(omega, rho); }
double PolarNormalForm::dkappa_at(double rho) const { return even_poly_derivative(kappa, rho); }
double PolarNormalForm::domega_at(double rho) const { return even_poly_derivative(omega, rho); }

PolarNormalForm PolarNormalForm::rescaled(double s) const {
    PolarNormalForm out = *this;
    double f = 1.0;
    for (std::size_t n = 0; n < std::max(kappa.size(), omega.size()); ++n) {
        if (n < out.kappa.size()) out.kappa[n] *= f;
        if (n < out.omega.size()) out.omega[n] *= f;
        f *= s;
    }
    return out;
}

MultiSeries PolarNormalForm::kappa_series() const { return even_series(kappa); }
MultiSeries PolarNormalForm::omega_series() const { return even_series(omega); }

PolarNormalForm extract_polar(const SSMModel& model) {
    if (model.style != Style::normal_form) throw ValidationError("polar form needs a normal-form model");
    if (!model.spectral.oscillatory_pair()) throw ValidationError("polar form needs a complex-conjugate master pair");
    PolarNormalForm p;
    for (int n = 0; 2 * n + 1 <= model.order; ++n) {
        const cplx r = model.R.coeff(MultiIndex{n + 1, n}, 0);
        p.kappa.push_back(r.real());
        p.omega.push_back(r.imag());
    }
    return p;
}

double forcing_projection(const SSMModel& model, const RVec& forcing) {
    if (forcing.size() != model.n()) throw ValidationError("forcing vector has wrong length");
    const cplx c = model.spectral.left.row(model.spectral.master[0]) * forcing.cast<cplx>();
    return std::abs(c) / 2.0;
}

// ---------------------------------------------------------------------------
// Residuals

EvaluationGrid radial_grid(const SSMModel& model, double rmin, double rmax, int n_radii, int n_angles) {
    if (!(rmin > 0.0) || !(rmax >= rmin) || n_radii < 1 || n_angles < 1)
        throw ValidationError("invalid radial grid parameters");
    EvaluationGrid g;
    const int d = model.d();
    for (int i = 0; i < d; ++i) g.bounds.emplace_back(-rmax, rmax);
    for (int r = 0; r < n_radii; ++r) {
        const double t = n_radii == 1 ? 0.0 : static_cast<double>(r) / (n_radii - 1);
        const double rho = rmin * std::pow(rmax / rmin, t);
        if (d == 1) {
            g.points.push_back({cplx(rho)});
            g.points.push_back({cplx(-rho)});
            continue;
        }
        for (int a = 0; a < n_angles; ++a) {
            const double th = 2.0 * std::numbers::pi * a / n_angles;
            if (model.spectral.oscillatory_pair())
                g.points.push_back({std::polar(rho, th), std::polar(rho, -th)});
            else
                g.points.push_back({cplx(rho * std::cos(th)), cplx(rho * std::sin(th))});
        }
    }
    return g;
}

RVec realify(const SSMModel&, const CVec& ambient) { return ambient.real(); }

namespace {

using lcplx = std::complex<long double>;

struct LTerm {
    std::vector<int> e;
    std::vector<lcplx> c;
};

std::vector<LTerm> to_long(const MultiSeries& s) {
    std::vector<LTerm> out;
    for (const auto& [k, v] : s.terms()) {
        LTerm t;
        t.e = k.exponents();
        for (Eigen::Index i = 0; i < v.size(); ++i) t.c.emplace_back(v[i].real(), v[i].imag());
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<lcplx> eval_long(const std::vector<LTerm>& terms, const std::vector<lcplx>& x, int dim_out, int max_order) {
    const std::size_t d = x.size();
    std::vector<std::vector<lcplx>> pw(d, std::vector<lcplx>(static_cast<std::size_t>(max_order) + 1));
    for (std::size_t j = 0; j < d; ++j) {
        pw[j][0] = 1.0L;
        for (int e = 1; e <= max_order; ++e) pw[j][static_cast<std::size_t>(e)] = pw[j][static_cast<std::size_t>(e - 1)] * x[j];
    }
    std::vector<lcplx> out(static_cast<std::size_t>(dim_out), 0.0L);
    for (const auto& t : terms) {
        lcplx mono = 1.0L;
        for (std::size_t j = 0; j < d; ++j) mono *= pw[j][static_cast<std::size_t>(t.e[j])];
        for (int i = 0; i < dim_out; ++i) out[static_cast<std::size_t>(i)] += mono * t.c[static_cast<std::size_t>(i)];
    }
    return out;
}

}  // namespace

ResidualStats invariance_residual(const PolySystem& sys, const SSMModel& model, const EvaluationGrid& grid) {
    sys.validate();
    if (sys.dim() != model.n()) throw ValidationError("system and model dimensions differ");
    grid.validate();
    if (grid.dim() != model.d()) throw ValidationError("grid dimension differs from SSM dimension");
    const int n = model.n(), d = model.d();

    const auto Wt = to_long(model.W);
    const auto Rt = to_long(model.R);
    const auto Ft = to_long(sys.nonlinearity);
    std::vector<std::vector<LTerm>> DWt;
    for (int i = 0; i < d; ++i) DWt.push_back(to_long(derivative(model.W, i)));
    const int wo = std::max(model.W.highest_order(), 1);
    const int ro = std::max(model.R.highest_order(), 1);
    const int fo = std::max(sys.nonlinearity.highest_order(), 1);

    std::vector<std::pair<double, double>> samples;
    for (const auto& p : grid.points) {
        std::vector<lcplx> x(p.size());
        double rad = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            x[i] = lcplx(p[i].real(), p[i].imag());
            rad = std::max(rad, std::abs(p[i]));
        }
        const auto w = eval_long(Wt, x, n, wo);
        const auto r = eval_long(Rt, x, d, ro);
        std::vector<lcplx> defect(static_cast<std::size_t>(n), 0.0L);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                defect[static_cast<std::size_t>(a)] += static_cast<long double>(sys.linear(a, b)) * w[static_cast<std::size_t>(b)];
        if (!Ft.empty()) {
            const auto f = eval_long(Ft, w, n, fo);
            for (int a = 0; a < n; ++a) defect[static_cast<std::size_t>(a)] += f[static_cast<std::size_t>(a)];
        }
        for (int i = 0; i < d; ++i) {
            const auto dw = eval_long(DWt[static_cast<std::size_t>(i)], x, n, wo);
            for (int a = 0; a < n; ++a) defect[static_cast<std::size_t>(a)] -= dw[static_cast<std::size_t>(a)] * r[static_cast<std::size_t>(i)];
        }
        long double nrm = 0.0L;
        for (const auto& v : defect) nrm += std::norm(v);
        samples.emplace_back(rad, static_cast<double>(std::sqrt(nrm)));
    }

    std::sort(samples.begin(), samples.end());
    ResidualStats st;
    for (const auto& [rad, res] : samples) {
        if (!st.radius.empty() && std::abs(rad - st.radius.back()) <= 1e-9 * std::max(rad, 1e-300)) {
            st.residual.back() = std::max(st.residual.back(), res);
        } else {
            st.radius.push_back(rad);
            st.residual.push_back(res);
        }
        st.max_residual = std::max(st.max_residual, res);
    }

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (std::size_t i = 0; i < st.radius.size(); ++i) {
        if (!(st.residual[i] > 0.0) || !(st.radius[i] > 0.0)) continue;
        const double lx = std::log(st.radius[i]), ly = std::log(st.residual[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++cnt;
    }
    const double den = cnt * sxx - sx * sx;
    if (cnt >= 2 && den > 0.0)
        st.slope = (cnt * sxy - sx * sy) / den;
    else
        st.slope = std::numeric_limits<double>::infinity();  // identically zero defect
    return st;
}

double parametrization_radius(const SSMModel& model) {
    std::map<int, double> by_order;
    for (const auto& [k, v] : model.W.terms())
        if (k.order() >= 2) by_order[k.order()] += v.norm();
    double r = std::numeric_limits<double>::infinity();
    for (const auto& [k, s] : by_order)
        if (s > 0.0) r = std::min(r, std::pow(s, -1.0 / k));
    return r;
}

ResidualStats residual_sweep(const PolySystem& sys, const SSMModel& model, int n_radii, int n_angles) {
    // Window start: smallest radius where the defect sits well above roundoff
    // of the linear part (relative size 1e-9). Found on a coarse geometric ladder,
    // since systems with only odd terms skip an order in the defect.
    const double rc = parametrization_radius(model);
    double r_top = std::isfinite(rc) ? 0.5 * rc : 1.0;
    r_top = std::min(r_top, 1.0);
    double lin = sys.linear.norm();
    if (!(lin > 0.0)) lin = 1.0;
    double r_lo = -1.0;
    for (double r = r_top; r > 1e-12; r /= 1.5) {
        const auto st = invariance_residual(sys, model, radial_grid(model, r, r, 1, 8));
        const double rel = st.residual.front() / (lin * r);
        if (rel < 1e-9) break;
        r_lo = r;
    }
    if (r_lo < 0.0) {
        std::map<int, double> by_order;
        for (const auto& [k, v] : model.W.terms()) by_order[k.order()] += v.norm();
        r_lo = 1e-3;
        const int top = model.W.highest_order();
        if (top >= 2 && by_order[top] > 0.0) r_lo = std::pow(1e-9 / by_order[top], 1.0 / (top - 1));
    }
    double r_hi = 4.0 * r_lo;
    if (std::isfinite(rc) && r_hi > 0.9 * rc) {
        r_hi = 0.9 * rc;
        r_lo = std::min(r_lo, r_hi / 4.0);
    }
    return invariance_residual(sys, model, radial_grid(model, r_lo, r_hi, n_radii, n_angles));
}

// ---------------------------------------------------------------------------
// Model files

void write_model(std::ostream& os, const SSMModel& model) {
    const auto flags = os.flags();
    const auto prec = os.precision();
    const auto& s = model.spectral;
    os << "ssm " << model.n() << ' ' << model.d() << ' ' << to_string(model.style) << ' ' << model.order << '\n';
    os << "master";
    for (int m : s.master) os << ' ' << m;
    os << '\n';
    os << "projection " << to_string(model.projection) << ' ' << model.coordinate << '\n';
    os << std::setprecision(17);
    os << "eigenvalues\n";
    for (int i = 0; i < model.n(); ++i) os << s.eigenvalues[i].real() << ' ' << s.eigenvalues[i].imag() << '\n';
    os << "eigenvectors\n";
    for (int i = 0; i < model.n(); ++i) {
        for (int j = 0; j < model.n(); ++j) os << (j ? "  " : "") << s.right(i, j).real() << ' ' << s.right(i, j).imag();
        os << '\n';
    }
    os << "W\n";
    write_series(os, model.W);
    os << "R\n";
    write_series(os, model.R);
    os.flags(flags);
    os.precision(prec);
}

SSMModel read_model(std::istream& is) {
    std::string line;
    auto next_line = [&]() {
        while (std::getline(is, line)) {
            auto pos = line.find_first_not_of(" \t\r");
            if (pos != std::string::npos && line[pos] != '#') return;
        }
        throw ValidationError("ssm: unexpected end of input");
    };
    auto expect = [&](const std::string& tag) {
        next_line();
        std::istringstream ls(line);
        std::string t;
        ls >> t;
        if (t != tag) throw ValidationError("ssm: expected '" + tag + "', found '" + line + "'");
    };

    SSMModel model;
    next_line();
    std::istringstream head(line);
    std::string tag, style;
    int n = 0, d = 0;
    if (!(head >> tag >> n >> d >> style >> model.order) || tag != "ssm")
        throw ValidationError("ssm: malformed header '" + line + "'");
    if (n < 1 || (d != 1 && d != 2) || d > n) throw ValidationError("ssm: invalid dimensions in header");
    model.style = parse_style(style);

    next_line();
    {
        std::istringstream ls(line);
        ls >> tag;
        if (tag != "master") throw ValidationError("ssm: expected master line");
        int m = 0;
        while (ls >> m) model.spectral.master.push_back(m);
        if (static_cast<int>(model.spectral.master.size()) != d) throw ValidationError("ssm: master line needs d indices");
        for (int mm : model.spectral.master)
            if (mm < 0 || mm >= n) throw ValidationError("ssm: master index out of range");
    }
    next_line();
    {
        std::istringstream ls(line);
        std::string kind;
        ls >> tag >> kind >> model.coordinate;
        if (tag != "projection") throw ValidationError("ssm: expected projection line");
        model.projection = parse_projection(kind);
    }
    expect("eigenvalues");
    model.spectral.eigenvalues.resize(n);
    for (int i = 0; i < n; ++i) {
        next_line();
        std::istringstream ls(line);
        double re = 0, im = 0;
        if (!(ls >> re >> im)) throw ValidationError("ssm: bad eigenvalue line '" + line + "'");
        model.spectral.eigenvalues[i] = cplx(re, im);
    }
    expect("eigenvectors");
    model.spectral.right.resize(n, n);
    for (int i = 0; i < n; ++i) {
        next_line();
        std::istringstream ls(line);
        for (int j = 0; j < n; ++j) {
            double re = 0, im = 0;
            if (!(ls >> re >> im)) throw ValidationError("ssm: bad eigenvector row " + std::to_string(i));
            model.spectral.right(i, j) = cplx(re, im);
        }
    }
    Eigen::FullPivLU<CMat> lu(model.spectral.right);
    if (!lu.isInvertible()) throw ValidationError("ssm: eigenvector matrix is singular");
    model.spectral.left = lu.inverse();
    expect("W");
    model.W = read_series(is);
    expect("R");
    model.R = read_series(is);
    validate_model(model, 1e-9);
    return model;
}

}  // namespace gssm
