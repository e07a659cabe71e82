#pragma once

#include <CLI11.hpp>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "gssm/io.hpp"
#include "gssm/pade.hpp"
#include "gssm/reduced.hpp"
#include "gssm/ssm.hpp"
#include "gssm/systems.hpp"

namespace gssm::cli {

// Per-run state shared by all subcommands: output location, manifest and
// the machine-readable summary printed as the last line.
struct Run {
    std::string command;
    std::optional<std::string> output_dir;
    std::optional<int> threads;
    std::filesystem::path outdir;
    Manifest manifest;
    nlohmann::ordered_json summary = nlohmann::ordered_json::object();

    void begin(const CLI::App& sub);
    std::filesystem::path write(const std::string& name, const std::string& content);
    void input(const std::filesystem::path& p) { manifest.add_input(p); }
    void finish();
};

Run& run();

std::string slurp(const std::string& path);
std::vector<double> parse_list(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);

// System selection shared by ssm and analyze.
struct SystemArgs {
    std::string id;
    std::string file;
    std::string params;

    void add(CLI::App* app);
    bool given() const { return !id.empty() || !file.empty(); }
    NamedSystem load() const;
};

SSMModel load_model(const std::string& path);
RationalMap load_rational(const std::string& path);
MultiSeries load_series(const std::string& path);
TrajectoryData load_csv(const std::string& path);

std::string to_text(const SSMModel& m);
std::string to_text(const RationalMap& r);
std::string to_text(const MultiSeries& s);
std::string to_text(const TrajectoryData& t, const std::vector<std::string>& names = {});

void register_systems(CLI::App& app);
void register_ssm(CLI::App& app);
void register_pade(CLI::App& app);
void register_analyze(CLI::App& app);
void register_singularity(CLI::App& app);
void register_regress(CLI::App& app);

}  // namespace gssm::cli
