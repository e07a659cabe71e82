#include "gssm/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "gssm/error.hpp"

namespace gssm {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, sep)) out.push_back(cell);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

double parse_double(const std::string& s, const std::string& where) {
    const std::string t = trim(s);
    if (t.empty()) throw ValidationError("empty number in " + where);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) throw ValidationError("bad number '" + t + "' in " + where);
    return v;
}

std::string expect_line(std::istream& is, const std::string& what) {
    std::string line;
    while (std::getline(is, line)) {
        line = trim(line);
        if (!line.empty() && line[0] != '#') return line;
    }
    throw ValidationError("unexpected end of input, expected " + what);
}

}  // namespace

void write_csv(std::ostream& os, const TrajectoryData& traj, const std::vector<std::string>& names) {
    const int n = traj.dim();
    if (!names.empty() && static_cast<int>(names.size()) != n + 1)
        throw ValidationError("CSV header needs one name per column including time");
    os << std::setprecision(17);
    if (names.empty()) {
        os << 't';
        for (int i = 0; i < n; ++i) os << ",x" << i + 1;
    } else {
        for (std::size_t i = 0; i < names.size(); ++i) os << (i ? "," : "") << names[i];
    }
    os << '\n';
    for (std::size_t k = 0; k < traj.size(); ++k) {
        os << traj.t[k];
        for (int i = 0; i < n; ++i) os << ',' << traj.x[k][i];
        os << '\n';
    }
}

TrajectoryData read_csv(std::istream& is, std::vector<std::string>* names) {
    std::string line;
    if (!std::getline(is, line)) throw ValidationError("empty CSV input");
    const auto header = split(trim(line), ',');
    if (header.size() < 2) throw ValidationError("CSV needs a time column and at least one data column");
    if (names) {
        names->clear();
        for (const auto& h : header) names->push_back(trim(h));
    }
    TrajectoryData out;
    std::size_t row = 1;
    while (std::getline(is, line)) {
        ++row;
        line = trim(line);
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != header.size())
            throw ValidationError("CSV row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                                  " columns, header has " + std::to_string(header.size()));
        const std::string where = "CSV row " + std::to_string(row);
        out.t.push_back(parse_double(cells[0], where));
        RVec x(static_cast<Eigen::Index>(cells.size() - 1));
        for (std::size_t i = 1; i < cells.size(); ++i) x[static_cast<Eigen::Index>(i - 1)] = parse_double(cells[i], where);
        out.x.push_back(std::move(x));
    }
    return out;
}

void write_table(std::ostream& os, const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
    os << std::setprecision(17);
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& r : rows) {
        if (r.size() != header.size()) throw ValidationError("table row width differs from the header");
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
        os << '\n';
    }
}

void write_system(std::ostream& os, const PolySystem& sys) {
    sys.validate();
    const int n = sys.dim();
    os << std::setprecision(17) << "system " << n << "\nlinear\n";
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) os << (j ? " " : "") << sys.linear(i, j);
        os << '\n';
    }
    if (sys.forcing.size() == n) {
        os << "forcing " << sys.epsilon << ' ' << sys.omega << '\n';
        for (int i = 0; i < n; ++i) os << (i ? " " : "") << sys.forcing[i];
        os << '\n';
    }
    os << "nonlinearity\n";
    write_series(os, sys.nonlinearity);
}

PolySystem read_system(std::istream& is) {
    std::istringstream head(expect_line(is, "system header"));
    std::string tag;
    int n = 0;
    if (!(head >> tag >> n) || tag != "system" || n < 1) throw ValidationError("bad system header");
    PolySystem sys;
    if (expect_line(is, "linear") != "linear") throw ValidationError("expected 'linear' block");
    sys.linear.resize(n, n);
    for (int i = 0; i < n; ++i) {
        std::istringstream row(expect_line(is, "linear row"));
        for (int j = 0; j < n; ++j)
            if (!(row >> sys.linear(i, j))) throw ValidationError("linear row " + std::to_string(i) + " is short");
    }
    std::string line = expect_line(is, "forcing or nonlinearity");
    if (line.rfind("forcing", 0) == 0) {
        std::istringstream fl(line);
        fl >> tag;
        if (!(fl >> sys.epsilon >> sys.omega)) throw ValidationError("bad forcing line");
        std::istringstream fv(expect_line(is, "forcing vector"));
        sys.forcing.resize(n);
        for (int i = 0; i < n; ++i)
            if (!(fv >> sys.forcing[i])) throw ValidationError("forcing vector is short");
        line = expect_line(is, "nonlinearity");
    }
    if (line != "nonlinearity") throw ValidationError("expected 'nonlinearity' block");
    sys.nonlinearity = read_series(is);
    sys.validate();
    return sys;
}

void write_polar(std::ostream& os, const PolarNormalForm& p) {
    os << "polar\nKAPPA\n";
    write_series(os, p.kappa_series());
    os << "OMEGA\n";
    write_series(os, p.omega_series());
}

namespace {

std::vector<double> even_coefficients(const MultiSeries& s, const std::string& what) {
    if (s.dim_in() != 1 || s.dim_out() != 1) throw ValidationError(what + " must be a scalar series in rho");
    std::vector<double> out(static_cast<std::size_t>(s.order() / 2 + 1), 0.0);
    for (const auto& [k, v] : s.terms()) {
        if (k[0] % 2 != 0) throw ValidationError(what + " has an odd power of rho");
        if (v[0].imag() != 0.0) throw ValidationError(what + " has a complex coefficient");
        out[static_cast<std::size_t>(k[0] / 2)] = v[0].real();
    }
    return out;
}

}  // namespace

PolarNormalForm read_polar(std::istream& is) {
    if (expect_line(is, "polar header") != "polar") throw ValidationError("expected 'polar' header");
    if (expect_line(is, "KAPPA") != "KAPPA") throw ValidationError("expected KAPPA block");
    PolarNormalForm p;
    p.kappa = even_coefficients(read_series(is), "kappa");
    if (expect_line(is, "OMEGA") != "OMEGA") throw ValidationError("expected OMEGA block");
    p.omega = even_coefficients(read_series(is), "omega");
    return p;
}

void write_chart(std::ostream& os, const ChartProjection& chart, const EmbeddingConfig& cfg) {
    chart.validate();
    if (cfg.delays != chart.ambient_dim()) throw ValidationError("embedding delay count differs from the chart");
    os << std::setprecision(17) << "chart " << chart.ambient_dim() << ' ' << chart.dim() << ' ' << cfg.lag << ' '
       << cfg.observable << "\ncenter\n";
    for (int i = 0; i < chart.ambient_dim(); ++i) os << (i ? " " : "") << chart.center[i];
    os << "\nbasis\n";
    for (int i = 0; i < chart.ambient_dim(); ++i) {
        for (int j = 0; j < chart.dim(); ++j) os << (j ? " " : "") << chart.basis(i, j);
        os << '\n';
    }
}

ChartProjection read_chart(std::istream& is, EmbeddingConfig* cfg) {
    std::istringstream head(expect_line(is, "chart header"));
    std::string tag;
    int q = 0, d = 0, lag = 0, obs = 0;
    if (!(head >> tag >> q >> d >> lag >> obs) || tag != "chart" || q < 1 || d < 1 || d > q)
        throw ValidationError("bad chart header");
    ChartProjection c;
    if (expect_line(is, "center") != "center") throw ValidationError("expected 'center' block");
    c.center.resize(q);
    std::istringstream cl(expect_line(is, "center values"));
    for (int i = 0; i < q; ++i)
        if (!(cl >> c.center[i])) throw ValidationError("chart center is short");
    if (expect_line(is, "basis") != "basis") throw ValidationError("expected 'basis' block");
    c.basis.resize(q, d);
    for (int i = 0; i < q; ++i) {
        std::istringstream row(expect_line(is, "basis row"));
        for (int j = 0; j < d; ++j)
            if (!(row >> c.basis(i, j))) throw ValidationError("chart basis row is short");
    }
    c.validate();
    if (cfg) {
        cfg->delays = q;
        cfg->lag = lag;
        cfg->observable = obs;
        cfg->manifold_dim = 0;
    }
    return c;
}

ParameterMap parse_parameters(const std::string& text) {
    ParameterMap out;
    for (const auto& item : split(text, ',')) {
        const std::string t = trim(item);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ValidationError("parameter '" + t + "' is not name=value");
        out[trim(t.substr(0, eq))] = parse_double(t.substr(eq + 1), "parameter " + t);
    }
    return out;
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw NumericalError("SHA-256 digest failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return os.str();
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw ValidationError("cannot write " + tmp.string());
        out << content;
        if (!out) throw ValidationError("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

void Manifest::add_input(const std::filesystem::path& p) { inputs[p.string()] = sha256_file(p); }
void Manifest::add_output(const std::filesystem::path& p) { outputs[p.string()] = sha256_file(p); }

std::string Manifest::to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["options"] = options;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    return j.dump(2) + "\n";
}

std::filesystem::path resolve_output_dir(const std::optional<std::string>& flag, const std::string& fallback) {
    if (flag && !flag->empty()) return *flag;
    if (const char* env = std::getenv("GSSM_OUTPUT_DIR"); env && *env) return env;
    return fallback;
}

int resolve_threads(const std::optional<int>& flag) {
    int n = 0;
    if (flag) {
        n = *flag;
    } else if (const char* env = std::getenv("GSSM_THREADS"); env && *env) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (*end != '\0') throw ValidationError("GSSM_THREADS must be an integer");
        n = static_cast<int>(v);
    }
    if (n < 0) throw ValidationError("thread count must be non-negative");
    if (n == 0) n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    return n;
}

}  // namespace gssm
