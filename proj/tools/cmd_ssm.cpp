#include <iostream>
#include <sstream>

#include "cli_common.hpp"
#include "gssm/error.hpp"

namespace gssm::cli {

void register_systems(CLI::App& app) {
    auto* sub = app.add_subcommand("systems", "List built-in systems or export one as a system file");
    struct Args {
        std::string export_id;
        std::string params;
        std::string file = "system.txt";
    };
    auto args = std::make_shared<Args>();
    sub->add_option("--export", args->export_id, "system id to write as a system file");
    sub->add_option("--params", args->params, "parameters as name=value,...");
    sub->add_option("--file", args->file, "file name for --export")->capture_default_str();
    sub->callback([sub, args] {
        run().begin(*sub);
        if (args->export_id.empty()) {
            for (const auto& info : list_systems()) {
                std::cout << info.id << "  " << info.description;
                std::string sep = "  [";
                for (const auto& [k, v] : info.defaults) {
                    std::cout << sep << k << '=' << v;
                    sep = ", ";
                }
                if (!info.defaults.empty()) std::cout << ']';
                std::cout << '\n';
                run().summary["systems"].push_back(info.id);
            }
            std::cout << "custom  polynomial system read from a file (ssm --system-file)\n";
            return;
        }
        const NamedSystem ns = make_system(args->export_id, parse_parameters(args->params));
        std::ostringstream os;
        write_system(os, ns.system);
        run().write(args->file, os.str());
        run().finish();
    });
}

void register_ssm(CLI::App& app) {
    auto* sub = app.add_subcommand("ssm", "Compute (or import and validate) an SSM parametrization");
    struct Args {
        SystemArgs system;
        std::string import_path;
        int dim = 0;
        int order = 3;
        std::string style = "normal_form";
        std::string projection = "spectral";
        int coordinate = 0;
        std::string master;
        double resonance_tol = 1e-8;
        std::string name = "ssm";
    };
    auto a = std::make_shared<Args>();
    a->system.add(sub);
    sub->add_option("--import", a->import_path, "existing model file to validate and pass through");
    sub->add_option("-d,--dim", a->dim, "SSM dimension (0: system default)")->capture_default_str();
    sub->add_option("--order", a->order, "expansion order")->capture_default_str();
    sub->add_option("--style", a->style, "graph | normal_form")->capture_default_str();
    sub->add_option("--projection", a->projection, "graph-style projection: spectral | orthogonal | coordinate")
        ->capture_default_str();
    sub->add_option("--coordinate", a->coordinate, "ambient coordinate for the coordinate projection")
        ->capture_default_str();
    sub->add_option("--master", a->master, "explicit master eigenvalue indices, e.g. 0,1");
    sub->add_option("--resonance-tol", a->resonance_tol, "relative resonance tolerance")->capture_default_str();
    sub->add_option("--name", a->name, "output file prefix")->capture_default_str();

    sub->callback([sub, a] {
        run().begin(*sub);
        SSMModel model;
        std::optional<NamedSystem> ns;
        if (a->system.given()) ns = a->system.load();
        if (!a->import_path.empty()) {
            model = load_model(a->import_path);
        } else {
            if (!ns) throw ValidationError("ssm needs --system, --system-file or --import");
            const int d = a->dim > 0 ? a->dim : ns->default_dim;
            SpectralOptions sopt;
            sopt.master = a->master.empty() ? ns->default_master : parse_int_list(a->master);
            sopt.check_order = a->order;
            sopt.resonance_tol = a->resonance_tol;
            const SpectralData spec = spectral_analysis(ns->system, d, sopt);
            SSMOptions opt;
            opt.order = a->order;
            opt.style = parse_style(a->style);
            opt.projection = parse_projection(a->projection);
            opt.coordinate = a->coordinate;
            opt.resonance_tol = a->resonance_tol;
            model = compute_ssm(ns->system, spec, opt);
        }
        run().write(a->name + "_model.txt", to_text(model));
        auto& s = run().summary;
        s["n"] = model.n();
        s["d"] = model.d();
        s["order"] = model.order;
        s["style"] = to_string(model.style);
        for (const auto& l : model.spectral.master_eigenvalues()) s["master_eigenvalues"].push_back({l.real(), l.imag()});
        if (model.style == Style::normal_form && model.spectral.oscillatory_pair()) {
            const PolarNormalForm polar = extract_polar(model);
            std::ostringstream os;
            write_polar(os, polar);
            run().write(a->name + "_polar.txt", os.str());
            s["kappa"] = polar.kappa;
            s["omega"] = polar.omega;
            if (ns && ns->system.forcing.size() == model.n()) s["forcing_projection"] = forcing_projection(model, ns->system.forcing);
        }
        if (ns) {
            const ResidualStats rs = residual_sweep(ns->system, model);
            s["residual_slope"] = rs.slope;
            s["max_residual"] = rs.max_residual;
        }
        run().finish();
    });
}

}  // namespace gssm::cli
