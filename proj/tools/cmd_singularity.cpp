#include <cmath>
#include <sstream>

#include "cli_common.hpp"
#include "gssm/error.hpp"
#include "gssm/singularity.hpp"

namespace gssm::cli {

namespace {

struct SeriesSource {
    std::string series;
    int component = 0;
    std::string polar;
    std::string model;
    std::string which = "omega";

    void add(CLI::App* app) {
        app->add_option("--series", series, "univariate series file");
        app->add_option("--component", component, "output component of the series")->capture_default_str();
        app->add_option("--polar", polar, "polar coefficient file");
        app->add_option("--model", model, "normal-form model file (polar coefficients are extracted)");
        app->add_option("--which", which, "kappa | omega, for --polar and --model")->capture_default_str();
    }

    MultiSeries load() const {
        const int given = !series.empty() + !polar.empty() + !model.empty();
        if (given != 1) throw ValidationError("give exactly one of --series, --polar or --model");
        if (!series.empty()) {
            const MultiSeries s = load_series(series);
            if (s.dim_in() != 1) throw ValidationError("singularity analysis needs a univariate series");
            if (component < 0 || component >= s.dim_out()) throw ValidationError("--component out of range");
            MultiSeries out(1, 1, s.order());
            for (const auto& [idx, c] : s.terms()) out.set(idx, 0, c[component]);
            return out;
        }
        PolarNormalForm p;
        if (!polar.empty()) {
            run().input(polar);
            std::istringstream is(slurp(polar));
            p = read_polar(is);
        } else {
            p = extract_polar(load_model(model));
        }
        if (which == "kappa") return p.kappa_series();
        if (which == "omega") return p.omega_series();
        throw ValidationError("--which must be kappa or omega");
    }
};

void add_radius(CLI::App* parent) {
    auto* sub = parent->add_subcommand("radius", "Convergence radius from coefficient ratios");
    auto src = std::make_shared<SeriesSource>();
    src->add(sub);
    sub->callback([sub, src] {
        run().begin(*sub);
        const RadiusEstimate e = estimate_radius(src->load());
        std::ostringstream os;
        os.precision(12);
        os << "radius " << e.radius << "\nzero_radius " << (e.zero_radius ? 1 : 0) << "\nstride " << e.stride
           << "\nfit_residual " << e.fit_residual << '\n';
        run().write("radius.txt", os.str());
        run().summary["radius"] = e.radius;
        run().summary["zero_radius"] = e.zero_radius;
        run().summary["stride"] = e.stride;
        run().finish();
    });
}

void add_pattern(CLI::App* parent) {
    auto* sub = parent->add_subcommand("pattern", "Locate the limiting singularity from coefficient signs");
    auto src = std::make_shared<SeriesSource>();
    src->add(sub);
    sub->callback([sub, src] {
        run().begin(*sub);
        const SingularityEstimate e = classify_sign_pattern(src->load());
        run().write("pattern.txt", e.summary() + "\n");
        run().summary["radius"] = e.radius;
        run().summary["theta"] = e.theta;
        run().summary["pattern"] = e.pattern;
        run().summary["confidence"] = e.confidence;
        run().finish();
    });
}

void add_scan(CLI::App* parent) {
    auto* sub = parent->add_subcommand("scan", "Scan rational denominators for zeros on a box");
    struct Args {
        std::string rational;
        std::string lo;
        std::string hi;
        std::string points = "41";
        double floor = 1e-6;
    };
    auto a = std::make_shared<Args>();
    sub->add_option("--rational", a->rational, "rational map file")->required();
    sub->add_option("--lo", a->lo, "lower bounds per input, e.g. -1,-1")->required();
    sub->add_option("--hi", a->hi, "upper bounds per input")->required();
    sub->add_option("--points", a->points, "points per axis (one value or one per axis)")->capture_default_str();
    sub->add_option("--floor", a->floor, "relative |Q| floor")->capture_default_str();
    sub->callback([sub, a] {
        run().begin(*sub);
        const RationalMap r = load_rational(a->rational);
        const auto lo = parse_list(a->lo);
        const auto hi = parse_list(a->hi);
        auto cnt = parse_int_list(a->points);
        const auto d = static_cast<std::size_t>(r.dim_in);
        if (lo.size() != d || hi.size() != d) throw ValidationError("--lo/--hi need " + std::to_string(d) + " entries");
        if (cnt.size() == 1) cnt.assign(d, cnt.front());
        if (cnt.size() != d) throw ValidationError("--points needs 1 or " + std::to_string(d) + " entries");
        const EvaluationGrid g = EvaluationGrid::box(lo, hi, cnt);
        const auto flags = denominator_zero_scan(r, g, a->floor);
        std::vector<std::vector<double>> rows;
        std::vector<std::string> head;
        for (std::size_t i = 0; i < d; ++i) head.push_back("z" + std::to_string(i + 1));
        for (const char* h : {"component", "abs_Q", "sign_change"}) head.emplace_back(h);
        for (const auto& f : flags) {
            std::vector<double> row;
            for (const auto& z : f.point) row.push_back(z.real());
            row.push_back(f.component);
            row.push_back(std::abs(f.denominator));
            row.push_back(f.sign_change ? 1.0 : 0.0);
            rows.push_back(std::move(row));
        }
        std::ostringstream os;
        write_table(os, head, rows);
        run().write("scan.csv", os.str());
        run().summary["grid_points"] = g.points.size();
        run().summary["flags"] = flags.size();
        run().finish();
    });
}

}  // namespace

void register_singularity(CLI::App& app) {
    auto* sub = app.add_subcommand("singularity", "Singularity diagnostics");
    sub->require_subcommand(1);
    add_radius(sub);
    add_pattern(sub);
    add_scan(sub);
}

}  // namespace gssm::cli
