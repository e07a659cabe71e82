#pragma once

// Text file formats, hashing and run manifests.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gssm/datadriven.hpp"
#include "gssm/ode.hpp"
#include "gssm/ssm.hpp"
#include "gssm/systems.hpp"

namespace gssm {

// CSV with a header row; the first column is time.
void write_csv(std::ostream& os, const TrajectoryData& traj, const std::vector<std::string>& names = {});
TrajectoryData read_csv(std::istream& is, std::vector<std::string>* names = nullptr);

// Generic numeric table with a header row.
void write_table(std::ostream& os, const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

// Polynomial system:
//   system <n>
//   linear
//   <n rows>
//   forcing <epsilon> <Omega>      (optional)
//   <n entries>
//   nonlinearity
//   <series block>
void write_system(std::ostream& os, const PolySystem& sys);
PolySystem read_system(std::istream& is);

// Amplitude-dependent damping and frequency:
//   polar
//   KAPPA
//   <series block in rho>
//   OMEGA
//   <series block in rho>
void write_polar(std::ostream& os, const PolarNormalForm& p);
PolarNormalForm read_polar(std::istream& is);

// Linear chart with its embedding:
//   chart <q> <d> <lag> <observable>
//   center
//   <q entries>
//   basis
//   <q rows of d entries>
void write_chart(std::ostream& os, const ChartProjection& chart, const EmbeddingConfig& cfg);
ChartProjection read_chart(std::istream& is, EmbeddingConfig* cfg = nullptr);

// "k=3,c=0.003" -> map.
ParameterMap parse_parameters(const std::string& text);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
// Writes through a temporary file in the same directory.
void write_file(const std::filesystem::path& path, const std::string& content);

struct Manifest {
    std::string command;
    std::map<std::string, std::string> options;
    std::map<std::string, std::string> inputs;   // path -> sha256
    std::map<std::string, std::string> outputs;  // path -> sha256

    void add_input(const std::filesystem::path& p);
    void add_output(const std::filesystem::path& p);
    std::string to_json() const;
};

// Explicit value, else the environment variable, else the fallback.
std::filesystem::path resolve_output_dir(const std::optional<std::string>& flag, const std::string& fallback = ".");
int resolve_threads(const std::optional<int>& flag);

}  // namespace gssm
