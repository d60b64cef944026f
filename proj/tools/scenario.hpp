#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "uscqed/bloch_siegert.hpp"
#include "uscqed/correlations.hpp"
#include "uscqed/models.hpp"

namespace uscqed::cli {

/// Config problem, with the 1-based line it refers to (0 if unknown).
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& source, long line, const std::string& message);
    long line() const noexcept { return line_; }

private:
    long line_;
};

/// start, start + step, ... up to stop (inclusive within 1e-9 step).
struct Range {
    double start = 0.0;
    double stop = 0.0;
    double step = 0.0;

    std::vector<double> values() const;
};

/// Delays j * stride * h_s with h_s = T/samples, up to stop (in 1/g).
struct TauGrid {
    double stop = 0.0;
    int stride = 1;
};

enum class Output { eigenvalues, n_cav, strengths, spectrum, g2, bs_spectrum };

std::string to_string(Output o);

/// One simulation request. Rates and drive amplitudes are in g units, times in
/// 1/g, frequencies in omega0 units.
struct Scenario {
    std::string panel;
    std::string series;
    long line = 0;

    GaugeChoice gauge;
    std::vector<double> etas;  // one value, or the sweep
    bool sweep = false;
    double omega0 = 1.0;
    double omega_c = 1.0;
    double kappa = 0.0;
    double gamma = 0.0;
    PumpSpec pump;  // P_inc and Omega_d in g units
    BathKind bath = BathKind::flat;

    int n_fock = 50;
    int n_keep = 24;
    int samples = 20;
    double t_end = 1000.0;

    std::vector<Output> outputs;
    std::optional<Range> detuning;
    std::optional<TauGrid> tau;
    Normalization normalization = Normalization::unit_max;
    int levels = 6;
    std::optional<int> g2_phase;  // unset: period-averaged g2
    BsForm bs_form = BsForm::simplified;

    ModelParams params(double eta) const;
    bool wants(Output o) const;
    /// Canonical form used for hashing and the manifest.
    nlohmann::json to_json() const;
};

struct Config {
    std::string figure;
    std::vector<Scenario> scenarios;
};

/// Parses TOML text. `source` names the text in error messages.
Config parse_config(std::string_view text, const std::string& source);
Config load_config(const std::string& path);

}  // namespace uscqed::cli
