#include "gssm/ode.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>

#include "gssm/error.hpp"

namespace gssm {

namespace odeint = boost::numeric::odeint;

std::string to_string(Termination t) {
    switch (t) {
        case Termination::completed: return "completed";
        case Termination::blowup: return "blowup";
        case Termination::pole: return "pole";
        case Termination::failure: return "failure";
    }
    return "failure";
}

std::vector<double> TrajectoryData::component(int i) const {
    std::vector<double> out;
    out.reserve(x.size());
    for (const auto& v : x) {
        if (i < 0 || i >= v.size()) throw ValidationError("trajectory component out of range");
        out.push_back(v[i]);
    }
    return out;
}

double TrajectoryData::uniform_step() const {
    if (t.size() < 2) throw ValidationError("need at least two samples");
    const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    if (dt == 0.0) throw ValidationError("zero time step");
    for (std::size_t i = 1; i < t.size(); ++i)
        if (std::abs((t[i] - t[i - 1]) - dt) > 1e-6 * std::abs(dt))
            throw ValidationError("timestamps are not uniformly spaced (sample " + std::to_string(i) + ")");
    return dt;
}

TrajectoryData integrate(const OdeRhs& f, const RVec& x0, double t0, double t1, const OdeOptions& opt) {
    if (!x0.allFinite()) throw ValidationError("initial condition is not finite");
    if (!std::isfinite(t0) || !std::isfinite(t1)) throw ValidationError("time span is not finite");
    using state = std::vector<double>;
    const std::size_t n = static_cast<std::size_t>(x0.size());

    TrajectoryData out;
    const double span = t1 - t0;
    const double dir = span >= 0.0 ? 1.0 : -1.0;
    double sample = opt.sample_dt > 0.0 ? opt.sample_dt : std::abs(span) / 200.0;
    if (sample == 0.0) sample = 1.0;
    const auto n_samples = static_cast<std::size_t>(std::floor(std::abs(span) / sample + 1e-9));

    const double limit = opt.blowup_factor * std::max(x0.norm(), opt.blowup_floor);

    auto sys = [&](const state& x, state& dx, double t) {
        Eigen::Map<const RVec> xm(x.data(), static_cast<Eigen::Index>(n));
        RVec d(static_cast<Eigen::Index>(n));
        f(t, xm, d);
        dx.assign(d.data(), d.data() + n);
    };

    auto record = [&](double t, const state& x) {
        out.t.push_back(t);
        out.x.push_back(Eigen::Map<const RVec>(x.data(), static_cast<Eigen::Index>(n)));
    };

    state x(x0.data(), x0.data() + n);
    record(t0, x);
    if (span == 0.0) return out;

    auto stepper = odeint::make_dense_output(opt.atol, opt.rtol, odeint::runge_kutta_dopri5<state>());
    stepper.initialize(x, t0, dir * std::min(std::abs(opt.dt_init), std::abs(span)));
    std::size_t next = 1;
    state xs(n);
    try {
        while (next <= n_samples || dir * (stepper.current_time() - t1) < 0.0) {
            if (next <= n_samples && dir * (stepper.current_time() - (t0 + dir * sample * static_cast<double>(next))) >= 0.0) {
                const double ts = t0 + dir * sample * static_cast<double>(next);
                stepper.calc_state(ts, xs);
                record(ts, xs);
                ++next;
                continue;
            }
            if (dir * (stepper.current_time() - t1) >= 0.0) break;
            stepper.do_step(sys);
            const state& xc = stepper.current_state();
            double nrm = 0.0;
            bool finite = true;
            for (double v : xc) {
                nrm += v * v;
                finite = finite && std::isfinite(v);
            }
            if (!finite || std::sqrt(nrm) > limit) {
                out.status = Termination::blowup;
                out.message = "state norm exceeded " + std::to_string(limit) + " at t=" + std::to_string(stepper.current_time());
                record(stepper.current_time(), xc);
                return out;
            }
            const double dt = std::abs(stepper.current_time_step());
            if (dt < 1e-14 * std::max(1.0, std::abs(stepper.current_time()))) {
                out.status = Termination::failure;
                out.message = "step size underflow at t=" + std::to_string(stepper.current_time());
                record(stepper.current_time(), xc);
                return out;
            }
        }
    } catch (const PoleProximityError& e) {
        out.status = Termination::pole;
        out.message = std::string("pole crossing: ") + e.what();
    } catch (const odeint::step_adjustment_error& e) {
        out.status = Termination::failure;
        out.message = e.what();
    }
    return out;
}

}  // namespace gssm
