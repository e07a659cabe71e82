#include <cmath>
#include <numbers>
#include <sstream>

#include "cli_common.hpp"
#include "gssm/error.hpp"

namespace gssm::cli {

namespace {

struct FieldArgs {
    SystemArgs system;
    std::string model;
    std::string pade_R;
    std::string pade_W;
    std::optional<double> epsilon;
    std::optional<double> Omega;
    std::string forcing;

    void add(CLI::App* app) {
        system.add(app);
        app->add_option("--model", model, "SSM model file (reduced dynamics R, lift W)");
        app->add_option("--pade-R", pade_R, "rational reduced dynamics replacing the Taylor R");
        app->add_option("--pade-W", pade_W, "rational parametrization used for lifting");
        app->add_option("--epsilon", epsilon, "forcing amplitude override");
        app->add_option("--Omega", Omega, "forcing frequency override");
        app->add_option("--forcing", forcing, "ambient forcing direction for model fields, e.g. 0,1,0,0");
    }

    // Ambient forcing vector: explicit list, else the system's.
    RVec forcing_vector(int n) const {
        if (!forcing.empty()) {
            const auto v = parse_list(forcing);
            if (static_cast<int>(v.size()) != n) throw ValidationError("--forcing needs " + std::to_string(n) + " entries");
            return Eigen::Map<const RVec>(v.data(), n);
        }
        if (system.given()) {
            const NamedSystem ns = system.load();
            if (ns.system.forcing.size() == n) return ns.system.forcing;
        }
        return {};
    }

    ReducedField build(std::optional<SSMModel>* model_out = nullptr) const {
        ReducedField f;
        if (!model.empty()) {
            SSMModel m = load_model(model);
            f = pade_R.empty() ? ReducedField::from_model(m)
                               : ReducedField::from_rational(load_rational(pade_R), m.spectral.oscillatory_pair());
            const RVec F = forcing_vector(m.n());
            if (F.size() > 0) {
                CVec dir(m.d());
                for (int i = 0; i < m.d(); ++i) dir[i] = m.spectral.left.row(m.spectral.master[static_cast<std::size_t>(i)]).dot(F.cast<cplx>());
                // Resonant half of cos(Omega t) for a conjugate pair.
                if (f.conjugate_pair) dir *= 0.5;
                f.forcing_dir = dir;
                if (system.given()) {
                    const NamedSystem ns = system.load();
                    f.epsilon = ns.system.epsilon;
                    f.omega = ns.system.omega;
                }
            }
            if (model_out) *model_out = std::move(m);
        } else if (!pade_R.empty()) {
            f = ReducedField::from_rational(load_rational(pade_R));
        } else {
            f = ReducedField::from_system(system.load().system);
        }
        if (epsilon) f.epsilon = *epsilon;
        if (Omega) f.omega = *Omega;
        return f;
    }
};

struct OdeArgs {
    double rtol = 1e-9;
    double atol = 1e-12;
    void add(CLI::App* app) {
        app->add_option("--rtol", rtol, "relative tolerance")->capture_default_str();
        app->add_option("--atol", atol, "absolute tolerance")->capture_default_str();
    }
    OdeOptions options() const {
        OdeOptions o;
        o.rtol = rtol;
        o.atol = atol;
        return o;
    }
};

RVec parse_state(const std::string& text, int dim) {
    const auto v = parse_list(text);
    if (static_cast<int>(v.size()) != dim)
        throw ValidationError("initial condition needs " + std::to_string(dim) + " entries, got " + std::to_string(v.size()));
    return Eigen::Map<const RVec>(v.data(), dim);
}

std::vector<double> rho_grid(double rmax, int n) {
    if (!(rmax > 0.0) || n < 2) throw ValidationError("need --rho-max > 0 and at least 2 points");
    std::vector<double> g;
    for (int i = 1; i <= n; ++i) g.push_back(rmax * i / n);
    return g;
}

struct PolarArgs {
    std::string model;
    std::string polar;
    std::string pade_kappa;
    std::string pade_omega;
    double gauge = 1.0;

    void add(CLI::App* app) {
        app->add_option("--model", model, "normal-form SSM model file");
        app->add_option("--polar", polar, "polar coefficient file");
        app->add_option("--pade-kappa", pade_kappa, "rational kappa(rho)");
        app->add_option("--pade-omega", pade_omega, "rational omega(rho)");
        app->add_option("--gauge", gauge, "amplitude gauge s: rho -> rho sqrt(s)")->capture_default_str();
    }

    PolarFunctions load(std::optional<SSMModel>* model_out = nullptr) const {
        std::optional<SSMModel> m;
        if (!model.empty()) m = load_model(model);
        if (model_out) *model_out = m;
        if (!pade_kappa.empty() || !pade_omega.empty()) {
            if (pade_kappa.empty() || pade_omega.empty()) throw ValidationError("give both --pade-kappa and --pade-omega");
            return PolarFunctions::from_rational(load_rational(pade_kappa), load_rational(pade_omega));
        }
        PolarNormalForm p;
        if (!polar.empty()) {
            run().input(polar);
            std::istringstream is(slurp(polar));
            p = read_polar(is);
        } else if (m) {
            p = extract_polar(*m);
        } else {
            throw ValidationError("no polar source (use --model, --polar or --pade-kappa/--pade-omega)");
        }
        return PolarFunctions::from_taylor(gauge == 1.0 ? p : p.rescaled(gauge));
    }
};

void add_integrate(CLI::App* parent) {
    auto* sub = parent->add_subcommand("integrate", "Integrate a full or reduced system and lift to ambient space");
    struct Args {
        FieldArgs field;
        OdeArgs ode;
        std::string ic;
        double t0 = 0.0;
        double t1 = 10.0;
        double dt = 0.0;
    };
    auto a = std::make_shared<Args>();
    a->field.add(sub);
    a->ode.add(sub);
    sub->add_option("--ic", a->ic, "initial state, e.g. 0.001,0.001")->required();
    sub->add_option("--t0", a->t0, "start time")->capture_default_str();
    sub->add_option("--t1", a->t1, "end time (t1 < t0 integrates backward)")->capture_default_str();
    sub->add_option("--dt", a->dt, "output spacing (0: 200 samples)")->capture_default_str();
    sub->callback([sub, a] {
        run().begin(*sub);
        std::optional<SSMModel> model;
        const ReducedField field = a->field.build(&model);
        OdeOptions o = a->ode.options();
        o.sample_dt = a->dt;
        const TrajectoryData tr = integrate_reduced(field, parse_state(a->ic, field.dim()), a->t0, a->t1, o);
        run().write("trajectory.csv", to_text(tr));
        if (model) {
            const TrajectoryData amb = a->field.pade_W.empty() ? lift(*model, field, tr)
                                                              : lift(load_rational(a->field.pade_W), field, tr);
            run().write("lifted.csv", to_text(amb));
            run().summary["pole_samples"] = amb.flagged.size();
        }
        run().summary["termination"] = to_string(tr.status);
        if (!tr.message.empty()) run().summary["message"] = tr.message;
        run().summary["final_time"] = tr.t.empty() ? a->t0 : tr.t.back();
        run().finish();
    });
}

void add_backbone(CLI::App* parent) {
    auto* sub = parent->add_subcommand("backbone", "Backbone curve omega(rho) and damping kappa(rho)");
    struct Args {
        PolarArgs polar;
        double rho_max = 1.0;
        int points = 200;
    };
    auto a = std::make_shared<Args>();
    a->polar.add(sub);
    sub->add_option("--rho-max", a->rho_max, "largest amplitude")->capture_default_str();
    sub->add_option("--points", a->points, "grid points")->capture_default_str();
    sub->callback([sub, a] {
        run().begin(*sub);
        const PolarFunctions pf = a->polar.load();
        const auto grid = rho_grid(a->rho_max, a->points);
        std::vector<std::vector<double>> rows;
        for (const auto& b : backbone(pf, grid)) rows.push_back({b.rho, b.omega, b.kappa});
        std::ostringstream os;
        write_table(os, {"rho", "omega", "kappa"}, rows);
        run().write("backbone.csv", os.str());
        run().finish();
    });
}

void add_frc(CLI::App* parent) {
    auto* sub = parent->add_subcommand("frc", "Forced response curve from the polar fixed-point equation");
    struct Args {
        PolarArgs polar;
        SystemArgs system;
        double epsilon = 0.0;
        double eps_f = 0.0;
        std::string forcing;
        std::string pade_W;
        int component = 0;
        double rho_max = 1.0;
        int points = 2000;
        int angles = 64;
    };
    auto a = std::make_shared<Args>();
    a->polar.add(sub);
    a->system.add(sub);
    sub->add_option("--epsilon", a->epsilon, "forcing amplitude")->capture_default_str();
    sub->add_option("--eps-f", a->eps_f, "projected forcing eps*f (overrides --epsilon)")->capture_default_str();
    sub->add_option("--forcing", a->forcing, "ambient forcing direction (default: the system's)");
    sub->add_option("--pade-W", a->pade_W, "rational parametrization for the amplitude");
    sub->add_option("--component", a->component, "ambient component reported as amplitude")->capture_default_str();
    sub->add_option("--rho-max", a->rho_max, "largest rho")->capture_default_str();
    sub->add_option("--points", a->points, "rho grid points")->capture_default_str();
    sub->add_option("--angles", a->angles, "phase samples for the amplitude")->capture_default_str();
    sub->callback([sub, a] {
        run().begin(*sub);
        std::optional<SSMModel> model;
        const PolarFunctions pf = a->polar.load(&model);
        double eps_f = a->eps_f;
        if (!(eps_f > 0.0)) {
            if (!model) throw ValidationError("--epsilon needs --model to project the forcing (or give --eps-f)");
            RVec F;
            if (!a->forcing.empty()) {
                const auto v = parse_list(a->forcing);
                if (static_cast<int>(v.size()) != model->n()) throw ValidationError("--forcing has wrong length");
                F = Eigen::Map<const RVec>(v.data(), model->n());
            } else if (a->system.given()) {
                F = a->system.load().system.forcing;
            }
            if (F.size() != model->n()) throw ValidationError("no forcing direction (use --forcing or --system)");
            eps_f = a->epsilon * forcing_projection(*model, F);
        }
        std::function<double(double)> amplitude;
        if (model) {
            std::optional<RationalMap> W;
            if (!a->pade_W.empty()) W = load_rational(a->pade_W);
            const int c = a->component;
            if (c < 0 || c >= model->n()) throw ValidationError("--component out of range");
            const SSMModel& m = *model;
            const int nang = a->angles;
            amplitude = [&m, W, c, nang](double rho) {
                double amp = 0.0;
                for (int j = 0; j < nang; ++j) {
                    const double th = 2.0 * std::numbers::pi * j / nang;
                    CVec p(2);
                    p << std::polar(rho, th), std::polar(rho, -th);
                    const CVec x = W ? evaluate_rational(*W, p) : evaluate(m.W, p);
                    amp = std::max(amp, std::abs(realify(m, x)[c]));
                }
                return amp;
            };
        }
        const FRCBranch br = forced_response(pf, eps_f, rho_grid(a->rho_max, a->points), amplitude);
        std::vector<std::vector<double>> rows;
        double worst = 0.0;
        for (const auto& p : br.points) {
            rows.push_back({p.rho, p.Omega, p.amplitude, p.psi, p.stable ? 1.0 : 0.0, static_cast<double>(p.branch)});
            worst = std::max(worst, std::abs(frc_residual(pf, eps_f, p.rho, p.Omega)));
        }
        std::ostringstream os;
        write_table(os, {"rho", "Omega", "amplitude", "psi", "stable", "branch"}, rows);
        run().write("frc.csv", os.str());
        run().summary["eps_f"] = eps_f;
        run().summary["points"] = br.points.size();
        run().summary["max_implicit_residual"] = worst;
        if (const FRCPoint* pk = br.peak()) {
            run().summary["peak_rho"] = pk->rho;
            run().summary["peak_Omega"] = pk->Omega;
            run().summary["peak_amplitude"] = pk->amplitude;
        }
        run().finish();
    });
}

void add_poincare(CLI::App* parent) {
    auto* sub = parent->add_subcommand("poincare", "Stroboscopic samples of a forced field");
    struct Args {
        FieldArgs field;
        OdeArgs ode;
        std::string ic;
        int periods = 500;
        int skip = 20;
        double period = 0.0;
    };
    auto a = std::make_shared<Args>();
    a->field.add(sub);
    a->ode.add(sub);
    sub->add_option("--ic", a->ic, "initial state")->required();
    sub->add_option("--periods", a->periods, "samples")->capture_default_str();
    sub->add_option("--skip", a->skip, "transient periods")->capture_default_str();
    sub->add_option("--period", a->period, "sampling period (0: forcing period)")->capture_default_str();
    sub->callback([sub, a] {
        run().begin(*sub);
        const ReducedField field = a->field.build();
        const auto pts = poincare_sample(field, parse_state(a->ic, field.dim()), a->periods, a->skip, a->period, a->ode.options());
        std::vector<std::vector<double>> rows;
        std::vector<std::string> head = {"k"};
        for (int i = 0; i < field.dim(); ++i) head.push_back("x" + std::to_string(i + 1));
        for (std::size_t k = 0; k < pts.size(); ++k) {
            std::vector<double> r = {static_cast<double>(k)};
            for (int i = 0; i < field.dim(); ++i) r.push_back(pts[k][i]);
            rows.push_back(std::move(r));
        }
        std::ostringstream os;
        write_table(os, head, rows);
        run().write("poincare.csv", os.str());
        run().summary["samples"] = pts.size();
        run().finish();
    });
}

void add_lyapunov(CLI::App* parent) {
    auto* sub = parent->add_subcommand("lyapunov", "Largest Lyapunov exponent by two-trajectory renormalization");
    struct Args {
        FieldArgs field;
        OdeArgs ode;
        std::string ic;
        double perturbation = 1e-7;
        double horizon = 1000.0;
        double renorm = 1.0;
        double transient = 100.0;
    };
    auto a = std::make_shared<Args>();
    a->field.add(sub);
    a->ode.add(sub);
    a->ode.rtol = 1e-12;
    a->ode.atol = 1e-15;
    sub->add_option("--ic", a->ic, "initial state")->required();
    sub->add_option("--perturbation", a->perturbation, "initial separation")->capture_default_str();
    sub->add_option("--horizon", a->horizon, "integration time")->capture_default_str();
    sub->add_option("--renorm", a->renorm, "renormalization interval")->capture_default_str();
    sub->add_option("--transient", a->transient, "discarded initial time")->capture_default_str();
    sub->callback([sub, a] {
        run().begin(*sub);
        const ReducedField field = a->field.build();
        const LyapunovEstimate e = lyapunov_estimate(field, parse_state(a->ic, field.dim()), a->perturbation, a->horizon,
                                                     a->renorm, a->transient, a->ode.options());
        std::ostringstream os;
        os.precision(17);
        os << "exponent " << e.exponent << "\nfit_error " << e.fit_error << "\nsaturated " << (e.saturated ? 1 : 0) << '\n';
        run().write("lyapunov.txt", os.str());
        run().summary["exponent"] = e.exponent;
        run().summary["fit_error"] = e.fit_error;
        run().summary["saturated"] = e.saturated;
        run().finish();
    });
}

void add_psd(CLI::App* parent) {
    auto* sub = parent->add_subcommand("psd", "Periodogram of one component along a trajectory");
    struct Args {
        FieldArgs field;
        OdeArgs ode;
        std::string ic;
        double t1 = 2000.0;
        double dt = 0.05;
        double transient = 100.0;
        int component = 0;
    };
    auto a = std::make_shared<Args>();
    a->field.add(sub);
    a->ode.add(sub);
    sub->add_option("--ic", a->ic, "initial state")->required();
    sub->add_option("--t1", a->t1, "record length after the transient")->capture_default_str();
    sub->add_option("--dt", a->dt, "sampling step")->capture_default_str();
    sub->add_option("--transient", a->transient, "discarded initial time")->capture_default_str();
    sub->add_option("--component", a->component, "state component")->capture_default_str();
    sub->callback([sub, a] {
        run().begin(*sub);
        const ReducedField field = a->field.build();
        OdeOptions o = a->ode.options();
        o.sample_dt = a->dt;
        RVec x = parse_state(a->ic, field.dim());
        if (a->transient > 0.0) {
            OdeOptions ot = o;
            ot.sample_dt = a->transient;
            const auto tr = integrate_reduced(field, x, 0.0, a->transient, ot);
            if (tr.status != Termination::completed) throw NumericalError("transient integration stopped: " + tr.message);
            x = tr.x.back();
        }
        const TrajectoryData tr = integrate_reduced(field, x, a->transient, a->transient + a->t1, o);
        if (tr.status != Termination::completed) throw NumericalError("integration stopped: " + tr.message);
        const Spectrum s = psd_estimate(tr, a->component);
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < s.frequency.size(); ++i) rows.push_back({s.frequency[i], s.power[i]});
        std::ostringstream os;
        write_table(os, {"frequency", "power"}, rows);
        run().write("psd.csv", os.str());
        const double pf = peak_fraction(s);
        run().summary["peak_fraction"] = pf;
        run().summary["broadband"] = pf <= 0.9;
        run().finish();
    });
}

}  // namespace

void register_analyze(CLI::App& app) {
    auto* sub = app.add_subcommand("analyze", "Reduced-dynamics analyses");
    sub->require_subcommand(1);
    add_integrate(sub);
    add_backbone(sub);
    add_frc(sub);
    add_poincare(sub);
    add_lyapunov(sub);
    add_psd(sub);
}

}  // namespace gssm::cli
