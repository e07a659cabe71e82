#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "cli_common.hpp"
#include "gssm/datadriven.hpp"
#include "gssm/error.hpp"

namespace gssm::cli {

namespace {

struct Dataset {
    std::vector<TrajectoryData> eta;
    std::vector<TrajectoryData> zeta;

    RMat inputs() const { return stack(eta); }
    RMat targets() const { return stack(zeta); }

    static RMat stack(const std::vector<TrajectoryData>& v) {
        std::size_t rows = 0;
        for (const auto& t : v) rows += t.size();
        const int d = v.empty() ? 0 : v.front().dim();
        RMat m(static_cast<Eigen::Index>(rows), d);
        Eigen::Index r = 0;
        for (const auto& t : v)
            for (const auto& x : t.x) m.row(r++) = x.transpose();
        return m;
    }
};

// Runs the seeded restarts on a small thread pool and keeps the lowest error.
RationalFit best_of_restarts(const RegressionProblem& prob, FitOptions opt, int restarts, int threads,
                             std::vector<nlohmann::ordered_json>& log) {
    std::vector<std::optional<RationalFit>> fits(static_cast<std::size_t>(restarts) + 1);
    std::vector<std::string> errors(fits.size());
    std::mutex m;
    std::size_t next = 0;
    auto worker = [&] {
        for (;;) {
            std::size_t k;
            {
                std::lock_guard lk(m);
                if (next >= fits.size()) return;
                k = next++;
            }
            FitOptions o = opt;
            o.seed = k == 0 ? opt.seed : opt.seed + k;
            try {
                fits[k] = fit_rational_field(prob, o);
            } catch (const NumericalError& e) {
                errors[k] = e.what();
            }
        }
    };
    const int nt = std::max(1, std::min<int>(threads, static_cast<int>(fits.size())));
    std::vector<std::thread> pool;
    for (int i = 1; i < nt; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::optional<RationalFit> best;
    for (std::size_t k = 0; k < fits.size(); ++k) {
        nlohmann::ordered_json j;
        j["seed"] = k == 0 ? opt.seed : opt.seed + k;
        if (fits[k]) {
            j["error"] = fits[k]->error;
            j["min_margin"] = fits[k]->min_margin;
            j["flagged"] = fits[k]->flagged;
            if (!best || fits[k]->error < best->error) best = fits[k];
        } else {
            j["failed"] = errors[k];
        }
        log.push_back(std::move(j));
    }
    if (!best) throw NumericalError("every restart failed: " + errors.front());
    return *best;
}

double rms(double sse, const RMat& targets) {
    const auto n = static_cast<double>(std::max<Eigen::Index>(1, targets.size()));
    return std::sqrt(sse / n);
}

void add_regress(CLI::App& app) {
    auto* sub = app.add_subcommand("regress", "Fit rational and polynomial reduced dynamics to trajectory data");
    struct Args {
        std::vector<std::string> data;
        int observable = 0;
        int delays = 0;
        int lag = 1;
        int dim = 2;
        bool reduced = false;
        int N = 5;
        int M = 5;
        bool select = false;
        int poly_order = 11;
        double delta = 1e-3;
        int smoothing = 0;
        bool unconstrained = false;
        std::uint64_t seed = 0;
        int restarts = 0;
        double init_scale = 0.5;
        int holdout = 0;
    };
    auto a = std::make_shared<Args>();
    sub->add_option("--data", a->data, "trajectory CSV files (time column first)")->required();
    sub->add_option("--observable", a->observable, "column used as the scalar observable")->capture_default_str();
    sub->add_option("--delays", a->delays, "embedding length q (0: use all state columns)")->capture_default_str();
    sub->add_option("--lag", a->lag, "embedding lag in samples")->capture_default_str();
    sub->add_option("-d,--dim", a->dim, "reduced dimension")->capture_default_str();
    sub->add_flag("--reduced", a->reduced, "data columns are already reduced coordinates");
    sub->add_option("--N", a->N, "numerator order")->capture_default_str();
    sub->add_option("--M", a->M, "denominator order")->capture_default_str();
    sub->add_flag("--select", a->select, "search N <= --N, M <= --M by held-out error");
    sub->add_option("--poly-order", a->poly_order, "order of the polynomial baseline (0: skip)")->capture_default_str();
    sub->add_option("--delta", a->delta, "denominator positivity margin")->capture_default_str();
    sub->add_option("--smoothing", a->smoothing, "Savitzky-Golay half-width for derivatives")->capture_default_str();
    sub->add_flag("--unconstrained", a->unconstrained, "drop the denominator positivity constraints");
    sub->add_option("--seed", a->seed, "seed of the first restart")->capture_default_str();
    sub->add_option("--restarts", a->restarts, "extra randomized restarts")->capture_default_str();
    sub->add_option("--init-scale", a->init_scale, "size of randomized starts")->capture_default_str();
    sub->add_option("--holdout", a->holdout, "trailing data files kept out of the fit")->capture_default_str();

    sub->callback([sub, a] {
        run().begin(*sub);
        if (a->holdout < 0 || a->holdout >= static_cast<int>(a->data.size()))
            throw ValidationError("--holdout must leave at least one training file");
        if (a->select && a->holdout == 0) throw ValidationError("--select needs --holdout");

        std::vector<TrajectoryData> raw;
        for (const auto& f : a->data) raw.push_back(load_csv(f));

        std::vector<TrajectoryData> coords;
        std::optional<ChartProjection> chart;
        EmbeddingConfig cfg;
        if (a->reduced) {
            for (const auto& r : raw)
                if (r.dim() != a->dim) throw ValidationError("reduced data must have exactly --dim state columns");
            coords = raw;
        } else {
            std::vector<TrajectoryData> emb;
            if (a->delays > 0) {
                cfg.delays = a->delays;
                cfg.lag = a->lag;
                cfg.observable = a->observable;
                cfg.manifold_dim = a->dim;
                cfg.validate();
                for (const auto& r : raw) emb.push_back(delay_embed(r, cfg));
            } else {
                cfg.delays = raw.front().dim();
                emb = raw;
            }
            const std::size_t train = raw.size() - static_cast<std::size_t>(a->holdout);
            chart = tangent_space_pca({emb.begin(), emb.begin() + static_cast<std::ptrdiff_t>(train)}, a->dim);
            for (const auto& e : emb) coords.push_back(project(*chart, e));
            std::ostringstream os;
            write_chart(os, *chart, cfg);
            run().write("chart.txt", os.str());
        }

        Dataset train, test;
        for (std::size_t j = 0; j < coords.size(); ++j) {
            Dataset& ds = j + static_cast<std::size_t>(a->holdout) < coords.size() ? train : test;
            ds.eta.push_back(coords[j]);
            ds.zeta.push_back(estimate_derivatives(coords[j], a->smoothing));
        }
        const RMat Xtr = train.inputs(), Ytr = train.targets();
        const RMat Xte = test.inputs(), Yte = test.targets();
        const int threads = resolve_threads(run().threads);

        FitOptions opt;
        opt.constrained = !a->unconstrained;
        opt.seed = a->seed;
        opt.init_scale = a->init_scale;

        auto fit_at = [&](int N, int M, std::vector<nlohmann::ordered_json>& log) {
            RegressionProblem prob;
            prob.inputs = Xtr;
            prob.targets = Ytr;
            prob.N = N;
            prob.M = M;
            prob.delta = a->delta;
            prob.validate();
            return best_of_restarts(prob, opt, a->restarts, threads, log);
        };

        int N = a->N, M = a->M;
        auto& s = run().summary;
        if (a->select) {
            double best = std::numeric_limits<double>::infinity();
            for (int n = 1; n <= a->N; ++n)
                for (int m = 0; m <= a->M; ++m) {
                    std::vector<nlohmann::ordered_json> log;
                    nlohmann::ordered_json j;
                    j["N"] = n;
                    j["M"] = m;
                    try {
                        const RationalFit f = fit_at(n, m, log);
                        const double e = rms(regression_error(f.map, Xte, Yte), Yte);
                        j["holdout_rms"] = e;
                        if (e < best) {
                            best = e;
                            N = n;
                            M = m;
                        }
                    } catch (const std::exception& e) {
                        j["failed"] = e.what();
                    }
                    s["selection"].push_back(std::move(j));
                }
            if (!std::isfinite(best)) throw NumericalError("no (N, M) candidate could be fitted");
        }

        std::vector<nlohmann::ordered_json> log;
        const RationalFit fit = fit_at(N, M, log);
        run().write("rational.txt", to_text(fit.map));

        std::ostringstream rep;
        rep.precision(10);
        rep << "samples " << Xtr.rows() << " train, " << Xte.rows() << " holdout\n";
        rep << "rational [" << N << '/' << M << "] " << (opt.constrained ? "constrained" : "unconstrained")
            << " error " << fit.error << " stage1 " << fit.stage1_error << " min_margin " << fit.min_margin
            << " active " << fit.active_constraints << (fit.flagged ? " flagged: " + fit.note : std::string()) << '\n';
        for (const auto& j : log) rep << "  restart " << j.dump() << '\n';

        s["N"] = N;
        s["M"] = M;
        s["rational_parameters"] = parameter_count(fit.map);
        s["rational_error"] = fit.error;
        s["rational_train_rms"] = rms(fit.error, Ytr);
        s["min_margin"] = fit.min_margin;
        s["flagged"] = fit.flagged;
        s["restarts"] = log;
        if (Xte.rows() > 0) s["rational_holdout_rms"] = rms(regression_error(fit.map, Xte, Yte), Yte);

        if (a->poly_order > 0) {
            const PolynomialFit pf = fit_polynomial_field(Xtr, Ytr, a->poly_order);
            run().write("polynomial.txt", to_text(pf.field));
            rep << "polynomial order " << a->poly_order << " error " << pf.error << " rank " << pf.rank
                << (pf.flagged ? " rank-deficient" : "") << '\n';
            s["polynomial_parameters"] = parameter_count(pf.field);
            s["polynomial_error"] = pf.error;
            s["polynomial_train_rms"] = rms(pf.error, Ytr);
            if (Xte.rows() > 0)
                s["polynomial_holdout_rms"] =
                    rms(regression_error(RationalMap::polynomial(pf.field), Xte, Yte), Yte);
        }
        run().write("report.txt", rep.str());
        run().finish();
    });
}

void add_predict(CLI::App& app) {
    auto* sub = app.add_subcommand("predict", "Forecast the observable from a window of measurements");
    struct Args {
        std::string chart;
        std::string rational;
        std::string polynomial;
        std::string window;
        int column = 0;
        double horizon = 10.0;
        double dt = 0.01;
    };
    auto a = std::make_shared<Args>();
    sub->add_option("--chart", a->chart, "chart file from regress")->required();
    sub->add_option("--rational", a->rational, "rational reduced field");
    sub->add_option("--polynomial", a->polynomial, "polynomial reduced field");
    sub->add_option("--window", a->window, "CSV with the most recent measurements")->required();
    sub->add_option("--column", a->column, "state column of the window file")->capture_default_str();
    sub->add_option("--horizon", a->horizon, "forecast length")->capture_default_str();
    sub->add_option("--dt", a->dt, "output spacing")->capture_default_str();
    sub->callback([sub, a] {
        run().begin(*sub);
        if (a->rational.empty() == a->polynomial.empty()) throw ValidationError("give exactly one of --rational or --polynomial");
        run().input(a->chart);
        EmbeddingConfig cfg;
        std::istringstream cs(slurp(a->chart));
        const ChartProjection chart = read_chart(cs, &cfg);
        const ReducedField field = a->rational.empty() ? ReducedField::from_polynomial(load_series(a->polynomial))
                                                       : ReducedField::from_rational(load_rational(a->rational));
        const TrajectoryData w = load_csv(a->window);
        if (a->column < 0 || a->column >= w.dim()) throw ValidationError("--column out of range");
        const Prediction p = predict(chart, cfg, field, w.component(a->column), a->horizon, a->dt);
        run().write("reduced.csv", to_text(p.reduced));
        run().write("forecast.csv", to_text(p.observable, {"t", "y"}));
        run().summary["termination"] = to_string(p.reduced.status);
        run().summary["samples"] = p.observable.size();
        run().finish();
    });
}

}  // namespace

void register_regress(CLI::App& app) {
    add_regress(app);
    add_predict(app);
}

}  // namespace gssm::cli
