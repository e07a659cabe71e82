#include <cmath>
#include <iomanip>
#include <sstream>

#include "cli_common.hpp"
#include "gssm/error.hpp"
#include "gssm/singularity.hpp"

namespace gssm::cli {

namespace {

struct Target {
    std::string name;
    MultiSeries series;
    EvaluationGrid grid;
};

std::string describe(const std::vector<cplx>& pt) {
    std::ostringstream os;
    os << std::setprecision(6) << '(';
    for (std::size_t i = 0; i < pt.size(); ++i) {
        os << (i ? ", " : "") << pt[i].real();
        if (pt[i].imag() != 0.0) os << (pt[i].imag() < 0 ? "-" : "+") << std::abs(pt[i].imag()) << 'i';
    }
    return os.str() + ')';
}

EvaluationGrid symmetric_box(int d, double r, int points) {
    std::vector<double> lo(static_cast<std::size_t>(d), -r), hi(static_cast<std::size_t>(d), r);
    std::vector<int> cnt(static_cast<std::size_t>(d), points);
    return EvaluationGrid::box(lo, hi, cnt);
}

}  // namespace

void register_pade(CLI::App& app) {
    auto* sub = app.add_subcommand("pade", "Pade approximants with denominator zero scan and fallback ladder");
    struct Args {
        std::string model;
        std::string series;
        int N = 5;
        int M = 5;
        bool shared = false;
        std::string targets = "W,R,polar";
        double radius = 0.0;
        int points = 41;
        int angles = 16;
        double floor = 1e-6;
    };
    auto a = std::make_shared<Args>();
    sub->add_option("--model", a->model, "SSM model file");
    sub->add_option("--series", a->series, "series file");
    sub->add_option("--N", a->N, "numerator order")->capture_default_str();
    sub->add_option("--M", a->M, "denominator order")->capture_default_str();
    sub->add_flag("--shared", a->shared, "one denominator shared by all components");
    sub->add_option("--targets", a->targets, "model targets: W, R, polar")->capture_default_str();
    sub->add_option("--scan-radius", a->radius, "zero-scan extent (0: twice the estimated convergence radius)")
        ->capture_default_str();
    sub->add_option("--scan-points", a->points, "scan points per axis (per radius for 2D models)")->capture_default_str();
    sub->add_option("--scan-angles", a->angles, "scan angles for conjugate-pair models")->capture_default_str();
    sub->add_option("--floor", a->floor, "relative |Q| floor for flags")->capture_default_str();

    sub->callback([sub, a] {
        run().begin(*sub);
        if (a->model.empty() == a->series.empty()) throw ValidationError("pade needs exactly one of --model or --series");
        if (a->points < 2) throw ValidationError("--scan-points must be at least 2");
        std::vector<Target> targets;
        if (!a->model.empty()) {
            const SSMModel model = load_model(a->model);
            const double r = a->radius > 0.0 ? a->radius : 2.0 * parametrization_radius(model);
            run().summary["scan_radius"] = r;
            const auto wanted = [&](const std::string& t) { return ("," + a->targets + ",").find("," + t + ",") != std::string::npos; };
            auto model_grid = [&] {
                if (model.d() == 1) return EvaluationGrid::interval(-r, r, a->points);
                return radial_grid(model, r / a->points, r, a->points, a->angles);
            };
            if (wanted("W")) targets.push_back({"W", model.W, model_grid()});
            if (wanted("R")) targets.push_back({"R", model.R, model_grid()});
            if (wanted("polar") && model.style == Style::normal_form && model.spectral.oscillatory_pair()) {
                const PolarNormalForm polar = extract_polar(model);
                const EvaluationGrid g = EvaluationGrid::interval(0.0, r, a->points);
                targets.push_back({"kappa", polar.kappa_series(), g});
                targets.push_back({"omega", polar.omega_series(), g});
            }
            if (targets.empty()) throw ValidationError("no applicable targets in '" + a->targets + "'");
        } else {
            const MultiSeries s = load_series(a->series);
            double r = a->radius;
            if (!(r > 0.0)) {
                r = 1.0;
                if (s.dim_in() == 1 && s.dim_out() == 1) {
                    try {
                        const RadiusEstimate est = estimate_radius(s);
                        if (!est.zero_radius && est.radius > 0.0) r = 2.0 * est.radius;
                    } catch (const ValidationError&) {
                    }
                }
            }
            if (s.dim_in() > 3) throw ValidationError("zero scan supports at most 3 variables");
            run().summary["scan_radius"] = r;
            targets.push_back({"series", s, symmetric_box(s.dim_in(), r, a->points)});
        }

        std::ostringstream report;
        bool all_clean = true;
        for (const auto& t : targets) {
            const LadderResult res = pade_ladder(t.series, a->N, a->M, t.grid, a->shared, a->floor);
            for (const auto& step : res.steps) {
                report << t.name << " [" << step.N << '/' << step.M << "] " << step.flags.size() << " flags\n";
                for (const auto& f : step.flags)
                    report << "  component " << f.component << " at " << describe(f.point) << " |Q| = " << std::abs(f.denominator)
                           << (f.sign_change ? " (sign change)" : "") << '\n';
            }
            nlohmann::ordered_json j;
            j["N"] = res.map.N;
            j["M"] = res.map.M;
            j["clean"] = res.clean;
            j["rungs_tried"] = res.steps.size();
            if (res.map.flagged) j["note"] = res.map.note;
            run().summary["approximants"][t.name] = j;
            if (res.clean) {
                run().write("pade_" + t.name + ".txt", to_text(res.map));
            } else {
                all_clean = false;
            }
        }
        run().write("zero_scan.txt", report.str());
        run().finish();
        if (!all_clean)
            throw NumericalError("no clean approximant on the fallback ladder; adjust N and M (see zero_scan.txt)");
    });
}

}  // namespace gssm::cli
