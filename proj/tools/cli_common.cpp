#include "cli_common.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "gssm/error.hpp"

namespace gssm::cli {

Run& run() {
    static Run r;
    return r;
}

void Run::begin(const CLI::App& sub) {
    command = sub.get_name();
    for (const CLI::App* p = sub.get_parent(); p && p->get_parent(); p = p->get_parent()) command = p->get_name() + " " + command;
    outdir = resolve_output_dir(output_dir);
    manifest.command = command;
    for (const CLI::Option* opt : sub.get_options()) {
        if (opt->get_lnames().empty()) continue;
        const std::string& name = opt->get_lnames().front();
        if (name == "help") continue;
        std::string value;
        if (opt->count() > 0) {
            if (opt->get_expected_min() == 0) value = "true";
            for (const auto& r : opt->results())
                if (opt->get_expected_min() != 0) value += (value.empty() ? "" : ",") + r;
        } else {
            value = opt->get_expected_min() == 0 ? "false" : opt->get_default_str();
        }
        manifest.options[name] = value;
    }
    manifest.options["output-dir"] = outdir.string();
    summary["command"] = command;
}

std::filesystem::path Run::write(const std::string& name, const std::string& content) {
    const std::filesystem::path p = outdir / name;
    write_file(p, content);
    manifest.add_output(p);
    summary["outputs"].push_back(p.string());
    return p;
}

void Run::finish() {
    write_file(outdir / "manifest.json", manifest.to_json());
}

std::string slurp(const std::string& path) { return read_file(path); }

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::string cell;
    std::istringstream ss(text);
    while (std::getline(ss, cell, ',')) {
        if (cell.find_first_not_of(" \t") == std::string::npos) continue;
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(cell, &used);
        } catch (const std::exception&) {
            throw ValidationError("bad number '" + cell + "' in list '" + text + "'");
        }
        if (cell.find_first_not_of(" \t", used) != std::string::npos)
            throw ValidationError("bad number '" + cell + "' in list '" + text + "'");
        out.push_back(v);
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (double v : parse_list(text)) {
        if (v != static_cast<int>(v)) throw ValidationError("expected integers in '" + text + "'");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

void SystemArgs::add(CLI::App* app) {
    app->add_option("--system", id, "built-in system id");
    app->add_option("--system-file", file, "polynomial system file");
    app->add_option("--params", params, "parameters as name=value,...");
}

NamedSystem SystemArgs::load() const {
    if (!id.empty() && !file.empty()) throw ValidationError("give either --system or --system-file, not both");
    if (!file.empty()) {
        run().input(file);
        std::istringstream is(slurp(file));
        NamedSystem ns;
        ns.id = "custom";
        ns.system = read_system(is);
        ns.default_dim = 1;
        if (!params.empty()) throw ValidationError("--params applies to built-in systems only");
        return ns;
    }
    if (id.empty()) throw ValidationError("no system given (use --system or --system-file)");
    return make_system(id, parse_parameters(params));
}

SSMModel load_model(const std::string& path) {
    run().input(path);
    std::istringstream is(slurp(path));
    return read_model(is);
}

RationalMap load_rational(const std::string& path) {
    run().input(path);
    std::istringstream is(slurp(path));
    return read_rational(is);
}

MultiSeries load_series(const std::string& path) {
    run().input(path);
    std::istringstream is(slurp(path));
    return read_series(is);
}

TrajectoryData load_csv(const std::string& path) {
    run().input(path);
    std::istringstream is(slurp(path));
    return read_csv(is);
}

std::string to_text(const SSMModel& m) {
    std::ostringstream os;
    write_model(os, m);
    return os.str();
}

std::string to_text(const RationalMap& r) {
    std::ostringstream os;
    write_rational(os, r);
    return os.str();
}

std::string to_text(const MultiSeries& s) {
    std::ostringstream os;
    write_series(os, s);
    return os.str();
}

std::string to_text(const TrajectoryData& t, const std::vector<std::string>& names) {
    std::ostringstream os;
    write_csv(os, t, names);
    return os.str();
}

}  // namespace gssm::cli
