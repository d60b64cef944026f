#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "scenario.hpp"

namespace uscqed::cli {

/// One CSV file: first column x, then one column per label.
struct Table {
    std::string name;  // <figure>_<panel>_<series>.csv
    std::string x_label;
    std::vector<std::string> labels;
    std::vector<double> x;
    std::vector<std::vector<double>> columns;
};

/// Per-scenario numbers that end up in the manifest rather than a CSV.
struct ScenarioReport {
    std::vector<std::string> warnings;
    std::optional<double> settle_time;  // 1/g
    std::optional<double> imag_residue;
    int g2_undefined = 0;
    int g2_clipped = 0;
};

struct RunOptions {
    std::filesystem::path out_dir = ".";
    int threads = 1;
    std::optional<int> n_fock;
    std::optional<int> n_keep;
    std::string config_name;
};

/// %.17g style; nan for undefined points.
std::string format_number(double v);
std::string format_csv(const Table& t);
std::string sha256_hex(std::string_view data);

/// Version string stamped into manifests.
std::string code_version();

/// Computes the tables of every scenario, in config order. `threads` > 1 runs
/// independent pieces (scenarios, eta points) concurrently; results do not depend on it.
std::vector<Table> compute(const Config& config, std::vector<ScenarioReport>* reports, int threads);

/// Runs all scenarios, writes the CSVs and manifest.json into out_dir and
/// returns the manifest.
nlohmann::json run(Config config, const RunOptions& options);

}  // namespace uscqed::cli
