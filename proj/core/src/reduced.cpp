#include "gssm/reduced.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include "gssm/error.hpp"

namespace gssm {

ReducedField ReducedField::from_model(const SSMModel& model) {
    return from_polynomial(model.R, model.spectral.oscillatory_pair());
}

ReducedField ReducedField::from_polynomial(const MultiSeries& R, bool conjugate_pair) {
    if (R.dim_in() != R.dim_out()) throw ValidationError("reduced field must map R^d to itself");
    if (conjugate_pair && R.dim_in() != 2) throw ValidationError("a conjugate pair needs d = 2");
    ReducedField f;
    f.kind = Kind::polynomial;
    f.poly = R;
    f.conjugate_pair = conjugate_pair;
    return f;
}

ReducedField ReducedField::from_rational(const RationalMap& R, bool conjugate_pair) {
    if (R.dim_in != R.dim_out) throw ValidationError("reduced field must map R^d to itself");
    if (conjugate_pair && R.dim_in != 2) throw ValidationError("a conjugate pair needs d = 2");
    ReducedField f;
    f.kind = Kind::rational;
    f.rational = R;
    f.conjugate_pair = conjugate_pair;
    return f;
}

ReducedField ReducedField::from_system(const PolySystem& sys) {
    sys.validate();
    const int n = sys.dim();
    MultiSeries poly = sys.nonlinearity;
    poly.set_order(std::max(1, sys.nonlinearity.order()));
    for (int j = 0; j < n; ++j) {
        const MultiIndex e = MultiIndex::unit(n, j);
        for (int i = 0; i < n; ++i)
            if (sys.linear(i, j) != 0.0) poly.set(e, i, sys.linear(i, j));
    }
    ReducedField f = from_polynomial(poly);
    if (sys.forcing.size() == n) {
        f.forcing_dir = sys.forcing.cast<cplx>();
        f.epsilon = sys.epsilon;
        f.omega = sys.omega;
    }
    return f;
}

int ReducedField::dim() const { return kind == Kind::polynomial ? poly.dim_in() : rational.dim_in; }

CVec ReducedField::param(const RVec& s) const {
    if (s.size() != dim()) throw ValidationError("state has wrong dimension for the reduced field");
    if (conjugate_pair) {
        CVec p(2);
        p[0] = cplx(s[0], s[1]);
        p[1] = cplx(s[0], -s[1]);
        return p;
    }
    return s.cast<cplx>();
}

RVec ReducedField::state(const CVec& p) const {
    if (conjugate_pair) {
        RVec s(2);
        s << p[0].real(), p[0].imag();
        return s;
    }
    return p.real();
}

RVec ReducedField::operator()(double t, const RVec& s) const {
    const CVec p = param(s);
    CVec v = kind == Kind::polynomial ? evaluate(poly, p) : evaluate_rational(rational, p, pole_floor);
    if (conjugate_pair) {
        cplx dp = v[0];
        if (forced()) dp += epsilon * forcing_dir[0] * std::polar(1.0, omega * t);
        RVec out(2);
        out << dp.real(), dp.imag();
        return out;
    }
    RVec out = v.real();
    if (forced()) out += epsilon * std::cos(omega * t) * forcing_dir.real();
    return out;
}

TrajectoryData integrate_reduced(const ReducedField& field, const RVec& ic, double t0, double t1,
                                 const OdeOptions& opt) {
    if (ic.size() != field.dim()) throw ValidationError("initial condition has wrong dimension");
    if (field.kind == ReducedField::Kind::rational) {
        // Rejects an initial condition inside the pole floor.
        (void)evaluate_rational(field.rational, field.param(ic), field.pole_floor);
    }
    TrajectoryData out = integrate([&](double t, const RVec& x, RVec& dx) { dx = field(t, x); }, ic, t0, t1, opt);
    if (field.kind == ReducedField::Kind::rational && out.status == Termination::failure && !out.x.empty()) {
        // The step size collapses before |Q| reaches the floor when a
        // trajectory runs into a pole; report it as one.
        const CVec p = field.param(out.x.back());
        const std::span<const cplx> pt(p.data(), static_cast<std::size_t>(p.size()));
        double q = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < field.rational.denominators.size(); ++i)
            q = std::min(q, std::abs(evaluate_denominator(field.rational, pt, static_cast<int>(i))));
        if (q < 1e-4) {
            out.status = Termination::pole;
            out.message = "pole crossing: |Q| = " + std::to_string(q) + " at t=" + std::to_string(out.t.back());
        }
    }
    return out;
}

TrajectoryData lift(const SSMModel& model, const ReducedField& field, const TrajectoryData& reduced) {
    TrajectoryData out;
    out.t = reduced.t;
    out.status = reduced.status;
    out.message = reduced.message;
    for (const auto& s : reduced.x) out.x.push_back(evaluate(model.W, field.param(s)).real());
    return out;
}

TrajectoryData lift(const RationalMap& W, const ReducedField& field, const TrajectoryData& reduced, double floor) {
    TrajectoryData out;
    out.t = reduced.t;
    out.status = reduced.status;
    out.message = reduced.message;
    for (std::size_t i = 0; i < reduced.x.size(); ++i) {
        try {
            out.x.push_back(evaluate_rational(W, field.param(reduced.x[i]), floor).real());
        } catch (const PoleProximityError&) {
            out.x.push_back(RVec::Constant(W.dim_out, std::numeric_limits<double>::quiet_NaN()));
            out.flagged.push_back(i);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

PolarFunctions PolarFunctions::from_taylor(const PolarNormalForm& p) {
    PolarFunctions f;
    f.kappa = [p](double r) { return p.kappa_at(r); };
    f.omega = [p](double r) { return p.omega_at(r); };
    f.dkappa = [p](double r) { return p.dkappa_at(r); };
    f.domega = [p](double r) { return p.domega_at(r); };
    return f;
}

namespace {

struct UniRational {
    MultiSeries P, Q, dP, dQ;

    explicit UniRational(const RationalMap& r) {
        if (r.dim_in != 1 || r.dim_out != 1) throw ValidationError("expected a scalar univariate rational");
        P = r.numerator;
        Q = r.denominator(0);
        dP = derivative(P, 0);
        dQ = derivative(Q, 0);
    }
    double value(double x) const {
        const cplx z[] = {x};
        return (evaluate(P, z)[0] / evaluate(Q, z)[0]).real();
    }
    double slope(double x) const {
        const cplx z[] = {x};
        const cplx p = evaluate(P, z)[0], q = evaluate(Q, z)[0];
        return ((evaluate(dP, z)[0] * q - p * evaluate(dQ, z)[0]) / (q * q)).real();
    }
};

}  // namespace

PolarFunctions PolarFunctions::from_rational(const RationalMap& kappa, const RationalMap& omega) {
    auto k = std::make_shared<UniRational>(kappa);
    auto w = std::make_shared<UniRational>(omega);
    PolarFunctions f;
    f.kappa = [k](double r) { return k->value(r); };
    f.omega = [w](double r) { return w->value(r); };
    f.dkappa = [k](double r) { return k->slope(r); };
    f.domega = [w](double r) { return w->slope(r); };
    return f;
}

std::vector<BackbonePoint> backbone(const PolarFunctions& polar, std::span<const double> rho_grid) {
    std::vector<BackbonePoint> out;
    for (double r : rho_grid) {
        if (!(r >= 0.0)) throw ValidationError("backbone grid must be nonnegative");
        out.push_back({r, polar.omega(r), polar.kappa(r)});
    }
    return out;
}

const FRCPoint* FRCBranch::peak() const {
    if (points.empty()) return nullptr;
    return &*std::max_element(points.begin(), points.end(),
                              [](const FRCPoint& a, const FRCPoint& b) { return a.amplitude < b.amplitude; });
}

double frc_residual(const PolarFunctions& polar, double eps_f, double rho, double Omega) {
    const double dw = Omega - polar.omega(rho);
    const double k = polar.kappa(rho);
    return dw * dw - (eps_f / rho) * (eps_f / rho) + k * k;
}

FRCBranch forced_response(const PolarFunctions& polar, double eps_f, std::span<const double> rho_grid,
                          const std::function<double(double)>& amplitude) {
    if (!(eps_f > 0.0)) throw ValidationError("forcing amplitude eps*f must be positive");
    FRCBranch br;
    for (double rho : rho_grid) {
        if (!(rho > 0.0)) throw ValidationError("FRC grid must be positive");
        const double k = polar.kappa(rho);
        const double w = polar.omega(rho);
        const double a = (eps_f / rho) * (eps_f / rho) - k * k;
        if (a < 0.0) continue;
        const double sq = std::sqrt(a);
        const double amp = amplitude ? amplitude(rho) : rho;
        for (int s : {-1, 1}) {
            const double Om = w + s * sq;
            const double sin_psi = -k * rho / eps_f;
            const double cos_psi = s * sq * rho / eps_f;
            // Jacobian of (rho', psi') with rho' = kappa rho + eps f sin psi,
            // psi' = omega - Omega + (eps f / rho) cos psi.
            const double j11 = k + polar.dkappa(rho) * rho;
            const double j12 = eps_f * cos_psi;
            const double j21 = polar.domega(rho) - eps_f * cos_psi / (rho * rho);
            const double j22 = -(eps_f / rho) * sin_psi;
            const double tr = j11 + j22;
            const double det = j11 * j22 - j12 * j21;
            br.points.push_back({rho, Om, amp, std::atan2(sin_psi, cos_psi), tr < 0.0 && det > 0.0, s});
        }
    }
    return br;
}

// ---------------------------------------------------------------------------

std::vector<RVec> poincare_sample(const ReducedField& field, const RVec& ic, int n_periods, int skip, double period,
                                  const OdeOptions& opt) {
    if (n_periods < 1 || skip < 0) throw ValidationError("invalid Poincaré sample counts");
    double T = period;
    if (!(T > 0.0)) {
        if (!field.forced() || !(field.omega > 0.0))
            throw ValidationError("Poincaré sampling needs forcing or an explicit period");
        T = 2.0 * std::numbers::pi / field.omega;
    }
    OdeOptions o = opt;
    o.sample_dt = T;
    const double t_end = T * (skip + n_periods - 1);
    TrajectoryData tr = integrate_reduced(field, ic, 0.0, t_end, o);
    if (tr.status != Termination::completed) throw NumericalError("Poincaré integration stopped: " + tr.message);
    std::vector<RVec> out;
    for (std::size_t i = static_cast<std::size_t>(skip); i < tr.x.size(); ++i) out.push_back(tr.x[i]);
    return out;
}

LyapunovEstimate lyapunov_estimate(const ReducedField& field, const RVec& ic, double perturbation, double horizon,
                                   double renorm_interval, double transient, const OdeOptions& opt) {
    if (!(perturbation > 0.0) || !(horizon > 0.0) || !(renorm_interval > 0.0))
        throw ValidationError("perturbation, horizon and interval must be positive");
    const int d = field.dim();
    RVec x = ic;
    double t = 0.0;
    OdeOptions o = opt;
    if (transient > 0.0) {
        o.sample_dt = transient;
        auto tr = integrate_reduced(field, x, 0.0, transient, o);
        if (tr.status != Termination::completed) throw NumericalError("transient integration stopped: " + tr.message);
        x = tr.x.back();
        t = transient;
    }
    RVec e = RVec::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)));
    RVec probe = x + perturbation * e;
    auto rhs = [&](double tt, const RVec& z, RVec& dz) { dz = field(tt, z); };
    o.sample_dt = renorm_interval;
    o.blowup_factor = std::numeric_limits<double>::infinity();

    LyapunovEstimate est;
    std::vector<double> ts, cum;
    double acc = 0.0;
    const int steps = static_cast<int>(std::floor(horizon / renorm_interval + 1e-9));
    for (int k = 0; k < steps; ++k) {
        // The reference is integrated on its own so it does not depend on the probe.
        auto ref = integrate(rhs, x, t, t + renorm_interval, o);
        auto prb = integrate(rhs, probe, t, t + renorm_interval, o);
        if (ref.status != Termination::completed) throw NumericalError("Lyapunov integration stopped: " + ref.message);
        if (prb.status != Termination::completed) throw NumericalError("Lyapunov integration stopped: " + prb.message);
        x = ref.x.back();
        t += renorm_interval;
        RVec diff = prb.x.back() - x;
        const double dist = diff.norm();
        if (!(dist > 0.0)) throw NumericalError("perturbed trajectory collapsed onto the reference");
        if (dist / perturbation > 1e6) est.saturated = true;
        acc += std::log(dist / perturbation);
        ts.push_back(renorm_interval * (k + 1));
        cum.push_back(acc);
        probe = x + diff * (perturbation / dist);
    }
    if (ts.size() < 2) throw ValidationError("horizon must span at least two renormalization intervals");

    const double nn = static_cast<double>(ts.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        sx += ts[i];
        sy += cum[i];
        sxx += ts[i] * ts[i];
        sxy += ts[i] * cum[i];
    }
    const double den = nn * sxx - sx * sx;
    est.exponent = (nn * sxy - sx * sy) / den;
    const double icpt = (sy - est.exponent * sx) / nn;
    double ss = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double r = cum[i] - icpt - est.exponent * ts[i];
        ss += r * r;
    }
    est.fit_error = ts.size() > 2 ? std::sqrt(ss / (nn - 2.0) * nn / den) : 0.0;
    return est;
}

Spectrum psd_estimate(const TrajectoryData& traj, int component) {
    const double dt = traj.uniform_step();
    std::vector<double> y = traj.component(component);
    const int n = static_cast<int>(y.size());
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= n;
    for (double& v : y) v -= mean;

    std::vector<fftw_complex> out(static_cast<std::size_t>(n / 2 + 1));
    fftw_plan plan = fftw_plan_dft_r2c_1d(n, y.data(), out.data(), FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    Spectrum s;
    const double norm = 1.0 / (static_cast<double>(n) * n);
    for (int k = 0; k <= n / 2; ++k) {
        const auto& c = out[static_cast<std::size_t>(k)];
        double p = (c[0] * c[0] + c[1] * c[1]) * norm;
        if (k > 0 && !(n % 2 == 0 && k == n / 2)) p *= 2.0;
        s.frequency.push_back(k / (n * std::abs(dt)));
        s.power.push_back(p);
    }
    return s;
}

double peak_fraction(const Spectrum& s) {
    double total = 0.0, peak = 0.0;
    for (double p : s.power) {
        total += p;
        peak = std::max(peak, p);
    }
    if (!(total > 0.0)) throw ValidationError("spectrum has no power");
    return peak / total;
}

}  // namespace gssm
