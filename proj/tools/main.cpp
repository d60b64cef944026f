// usc-qed: scenario runner and figure reproduction bundles.
#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "builtin_configs.hpp"
#include "runner.hpp"
#include "scenario.hpp"

namespace {

constexpr int kConfigFailure = 2;
constexpr int kRunFailure = 3;

int execute(const uscqed::cli::Config& config, const uscqed::cli::RunOptions& options) {
    const auto manifest = uscqed::cli::run(config, options);
    for (const auto& s : manifest["scenarios"]) {
        for (const auto& w : s["warnings"]) {
            std::cerr << "warning: " << s["panel"].get<std::string>() << "/" << s["series"].get<std::string>() << ": "
                      << w.get<std::string>() << "\n";
        }
    }
    std::cout << "wrote " << manifest["files"].size() << " files and manifest.json to " << options.out_dir.string()
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gauge-invariant dissipative cavity-QED simulator"};
    app.require_subcommand(1);

    uscqed::cli::RunOptions options;
    const char* env_out = std::getenv("USC_QED_OUT");
    std::string out = env_out && *env_out ? env_out : ".";
    int n_fock = 0, n_keep = 0;
    long seed = 0;
    app.add_option("--threads", options.threads, "Worker threads for independent scenarios")
        ->check(CLI::PositiveNumber);
    app.add_option("--n-fock", n_fock, "Override the Fock cutoff of every scenario")->check(CLI::PositiveNumber);
    app.add_option("--n-keep", n_keep, "Override the number of dressed states kept")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "Reserved; every computation is deterministic");
    app.add_option("--out", out, "Output directory (default: $USC_QED_OUT or .)");

    std::string config_path;
    auto* run = app.add_subcommand("run", "Run the scenarios of a TOML config");
    run->add_option("config", config_path, "Config file")->required();
    run->fallthrough();

    std::string figure;
    auto* reproduce = app.add_subcommand("reproduce", "Run a bundled figure config");
    std::string ids;
    for (const auto& [id, text] : uscqed::cli::builtin_configs()) ids += (ids.empty() ? "" : ", ") + id;
    reproduce->add_option("figure", figure, "One of: " + ids)->required();
    reproduce->fallthrough();

    CLI11_PARSE(app, argc, argv);
    options.out_dir = out;
    if (n_fock > 0) options.n_fock = n_fock;
    if (n_keep > 0) options.n_keep = n_keep;

    uscqed::cli::Config config;
    try {
        if (*run) {
            config = uscqed::cli::load_config(config_path);
            options.config_name = config_path;
        } else {
            const auto& all = uscqed::cli::builtin_configs();
            const auto it = all.find(figure);
            if (it == all.end()) {
                std::cerr << "error: unknown figure id '" << figure << "'; available: " << ids << "\n";
                return kConfigFailure;
            }
            config = uscqed::cli::parse_config(it->second, "configs/" + figure + ".toml");
            options.config_name = "configs/" + figure + ".toml";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigFailure;
    }

    try {
        return execute(config, options);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRunFailure;
    }
}
