#include <iostream>

#include "cli_common.hpp"
#include "gssm/error.hpp"

namespace {

int report(const std::string& status, const std::string& message, int code) {
    auto& s = gssm::cli::run().summary;
    s["status"] = status;
    if (!message.empty()) s["message"] = message;
    std::cout << s.dump() << std::endl;
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace gssm::cli;
    CLI::App app{"Spectral submanifold reduction, Pade approximants and data-driven rational models"};
    app.require_subcommand(1);
    app.fallthrough();
    std::optional<std::string> outdir;
    std::optional<int> threads;
    app.add_option("-o,--output-dir", outdir, "output directory (default: $GSSM_OUTPUT_DIR or .)");
    app.add_option("--threads", threads, "worker threads (default: $GSSM_THREADS or all cores)");
    app.parse_complete_callback([&] {
        run().output_dir = outdir;
        run().threads = threads;
    });

    register_systems(app);
    register_ssm(app);
    register_pade(app);
    register_analyze(app);
    register_singularity(app);
    register_regress(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return report("validation_error", e.what(), 2);
    } catch (const gssm::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return report("validation_error", e.what(), 2);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return report("numerical_error", e.what(), 3);
    }
    return report("ok", "", 0);
}
