#include "runner.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include "uscqed/dressing.hpp"
#include "uscqed/dynamics.hpp"
#include "uscqed/errors.hpp"

#ifndef USCQED_VERSION
#define USCQED_VERSION "unknown"
#endif

namespace uscqed::cli {

std::string code_version() { return USCQED_VERSION; }

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string format_csv(const Table& t) {
    std::string out = t.x_label;
    for (const auto& l : t.labels) out += "," + l;
    out += "\n";
    for (size_t i = 0; i < t.x.size(); ++i) {
        out += format_number(t.x[i]);
        for (const auto& c : t.columns) out += "," + format_number(c[i]);
        out += "\n";
    }
    return out;
}

std::string sha256_hex(std::string_view data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

namespace {

// Transitions reported by the strengths output, as (upper, lower) labels of
// states followed continuously in eta.
struct Transition {
    const char* label;
    int upper;
    int lower;
};
constexpr Transition kTransitions[] = {{"I", 1, 0}, {"II", 3, 1}, {"III", 2, 0}};

struct Results {
    std::vector<std::vector<double>> energies;   // [eta][level]
    std::vector<std::vector<double>> strengths;  // [eta][transition]
    std::vector<double> n_cav;
    std::vector<double> spectrum;
    std::vector<double> tau;
    std::vector<double> g2;
    std::vector<double> bs;
    ScenarioReport report;
};

std::string file_name(const std::string& figure, const std::string& observable, const Scenario& s) {
    std::string panel = observable;
    if (!s.panel.empty()) panel += "-" + s.panel;
    return figure + "_" + panel + "_" + s.series + ".csv";
}

std::vector<double> unit_max(std::vector<double> v) {
    double top = 0.0;
    for (double x : v) top = std::max(top, x);
    if (top > 0.0) {
        for (double& x : v) x /= top;
    }
    return v;
}

void basis_sweep(const Scenario& s, Results& out) {
    const auto space = fock_space(s.n_fock);
    std::optional<DressedBasis> prev;
    std::vector<int> idx(static_cast<size_t>(s.n_keep));
    for (int i = 0; i < s.n_keep; ++i) idx[static_cast<size_t>(i)] = i;
    for (double eta : s.etas) {
        const ModelParams p = s.params(eta);
        DressedBasis b = diagonalize(system_hamiltonian(s.gauge, p, space), s.n_keep);
        if (s.wants(Output::eigenvalues)) {
            std::vector<double> e;
            for (int l = 0; l < s.levels; ++l) e.push_back(b.ground_energy + b.energies(l));
            out.energies.push_back(std::move(e));
        }
        if (s.wants(Output::strengths)) {
            if (prev) {
                const auto perm = track_states(*prev, b);
                for (int& i : idx) i = perm[static_cast<size_t>(i)];
            }
            const RealMatrix t = transition_strengths(b, quadrature_pi(s.gauge, p, space));
            std::vector<double> row;
            for (const auto& tr : kTransitions) {
                row.push_back(t(idx[static_cast<size_t>(tr.upper)], idx[static_cast<size_t>(tr.lower)]));
            }
            out.strengths.push_back(std::move(row));
            prev = std::move(b);
        }
    }
}

double steady_n_cav(const Scenario& s, double eta) {
    const ModelParams p = s.params(eta);
    DressedSystem sys = build_dressed_system(s.gauge, p, s.bath, s.n_fock, s.n_keep);
    if (p.pump.kind == PumpKind::coherent) {
        SimulationOptions o;
        o.samples = s.samples;
        o.t_end_g = s.t_end;
        return Simulation(std::move(sys), o).n_cav();
    }
    const Matrix rho = steady_state(*master_equation(sys));
    check_density_matrix(rho, 0, 0.0);
    return n_cav(rho, sys.xp());
}

std::vector<double> tau_grid(const Scenario& s, const Simulation& sim) {
    const double h = sim.propagator().sample_step() * sim.system().params.g();
    std::vector<double> tau;
    for (long j = 0;; j += s.tau->stride) {
        const double t = static_cast<double>(j) * h;
        if (t > s.tau->stop * (1.0 + 1e-12)) break;
        tau.push_back(t);
    }
    return tau;
}

void dynamics(const Scenario& s, Results& out) {
    const double eta = s.etas.front();
    const ModelParams p = s.params(eta);
    auto& rep = out.report;
    for (auto& w : p.warnings()) rep.warnings.push_back(w);

    if (s.wants(Output::bs_spectrum)) {
        const BsParams bp{eta, p.kappa, p.omega0, s.gauge.corrected, p.pump.P_inc / p.kappa};
        for (auto& w : bp.warnings()) rep.warnings.push_back(w);
        auto v = bs_spectrum(bp, s.detuning->values(), s.bs_form).values;
        out.bs = s.normalization == Normalization::unit_max ? unit_max(std::move(v)) : std::move(v);
    }
    if (!s.wants(Output::spectrum) && !s.wants(Output::g2)) return;

    SimulationOptions o;
    o.samples = s.samples;
    o.t_end_g = s.t_end;
    const Simulation sim(build_dressed_system(s.gauge, p, s.bath, s.n_fock, s.n_keep), o);
    rep.settle_time = sim.settle_time() * p.g();
    if (s.wants(Output::spectrum)) {
        const auto r = sim.spectrum(s.detuning->values(), s.normalization);
        out.spectrum = r.values;
        rep.imag_residue = r.imag_residue;
    }
    if (s.wants(Output::g2)) {
        out.tau = tau_grid(s, sim);
        const auto r = s.g2_phase ? sim.g2_t_tau(*s.g2_phase, out.tau) : sim.g2_averaged(out.tau);
        for (const auto& v : r.values) out.g2.push_back(v.real());
        rep.g2_undefined = r.undefined;
        rep.g2_clipped = r.clipped;
        if (r.clipped > 0) {
            rep.warnings.push_back(std::to_string(r.clipped) + " g2 values in [-1e-8, 0) clipped to 0");
        }
    }
}

void parallel_run(std::vector<std::function<void()>>& jobs, int threads) {
    std::vector<std::exception_ptr> errors(jobs.size());
    std::atomic<size_t> next{0};
    const auto worker = [&] {
        for (size_t i; (i = next++) < jobs.size();) {
            try {
                jobs[i]();
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int n = std::max(1, std::min<int>(threads, static_cast<int>(jobs.size())));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

std::function<void()> with_context(const Scenario& s, std::function<void()> f) {
    return [&s, f = std::move(f)] {
        try {
            f();
        } catch (const std::exception& e) {
            throw std::runtime_error("scenario at line " + std::to_string(s.line) + " (panel '" + s.panel +
                                     "', series '" + s.series + "'): " + e.what());
        }
    };
}

}  // namespace

std::vector<Table> compute(const Config& config, std::vector<ScenarioReport>* reports, int threads) {
    std::vector<Results> results(config.scenarios.size());
    std::vector<std::function<void()>> jobs;
    for (size_t i = 0; i < config.scenarios.size(); ++i) {
        const Scenario& s = config.scenarios[i];
        Results& r = results[i];
        if (s.wants(Output::eigenvalues) || s.wants(Output::strengths)) {
            jobs.push_back(with_context(s, [&s, &r] { basis_sweep(s, r); }));
        }
        if (s.wants(Output::n_cav)) {
            r.n_cav.assign(s.etas.size(), 0.0);
            for (size_t j = 0; j < s.etas.size(); ++j) {
                jobs.push_back(with_context(s, [&s, &r, j] { r.n_cav[j] = steady_n_cav(s, s.etas[j]); }));
            }
        }
        if (s.wants(Output::spectrum) || s.wants(Output::g2) || s.wants(Output::bs_spectrum)) {
            jobs.push_back(with_context(s, [&s, &r] { dynamics(s, r); }));
        }
    }
    parallel_run(jobs, threads);

    std::vector<Table> tables;
    for (size_t i = 0; i < config.scenarios.size(); ++i) {
        const Scenario& s = config.scenarios[i];
        Results& r = results[i];
        for (Output o : s.outputs) {
            Table t;
            switch (o) {
                case Output::eigenvalues:
                    t.name = file_name(config.figure, "eigenvalues", s);
                    t.x_label = "eta";
                    t.x = s.etas;
                    for (int l = 0; l < s.levels; ++l) {
                        t.labels.push_back("E" + std::to_string(l));
                        std::vector<double> c;
                        for (const auto& row : r.energies) c.push_back(row[static_cast<size_t>(l)]);
                        t.columns.push_back(std::move(c));
                    }
                    break;
                case Output::strengths:
                    t.name = file_name(config.figure, "strengths", s);
                    t.x_label = "eta";
                    t.x = s.etas;
                    for (size_t k = 0; k < std::size(kTransitions); ++k) {
                        t.labels.push_back(kTransitions[k].label);
                        std::vector<double> c;
                        for (const auto& row : r.strengths) c.push_back(row[k]);
                        t.columns.push_back(std::move(c));
                    }
                    break;
                case Output::n_cav:
                    t.name = file_name(config.figure, "ncav", s);
                    t.x_label = "eta";
                    t.x = s.etas;
                    t.labels = {s.series};
                    t.columns = {r.n_cav};
                    break;
                case Output::spectrum:
                    t.name = file_name(config.figure, "spectrum", s);
                    t.x_label = "omega_minus_omegaL_over_g";
                    t.x = s.detuning->values();
                    t.labels = {s.series};
                    t.columns = {r.spectrum};
                    break;
                case Output::bs_spectrum:
                    t.name = file_name(config.figure, "bs", s);
                    t.x_label = "omega_minus_omegaL_over_g";
                    t.x = s.detuning->values();
                    t.labels = {s.series};
                    t.columns = {r.bs};
                    break;
                case Output::g2:
                    t.name = file_name(config.figure, "g2", s);
                    t.x_label = "tau_g";
                    t.x = r.tau;
                    t.labels = {s.series};
                    t.columns = {r.g2};
                    break;
            }
            tables.push_back(std::move(t));
        }
        if (reports) reports->push_back(std::move(r.report));
    }
    return tables;
}

nlohmann::json run(Config config, const RunOptions& options) {
    for (auto& s : config.scenarios) {
        if (options.n_fock) s.n_fock = *options.n_fock;
        if (options.n_keep) s.n_keep = *options.n_keep;
        if (s.n_keep < 2 || s.n_keep > 2 * s.n_fock || s.levels > 2 * s.n_fock) {
            throw InvalidArgument("truncation override gives n_keep = " + std::to_string(s.n_keep) +
                                  " outside [2, 2 n_fock] for n_fock = " + std::to_string(s.n_fock));
        }
    }
    std::vector<ScenarioReport> reports;
    const auto tables = compute(config, &reports, options.threads);

    std::filesystem::create_directories(options.out_dir);
    nlohmann::json manifest;
    manifest["tool"] = "usc-qed";
    manifest["version"] = code_version();
    manifest["figure"] = config.figure;
    manifest["config"] = options.config_name;
    manifest["scenarios"] = nlohmann::json::array();
    manifest["files"] = nlohmann::json::array();

    size_t t = 0;
    for (size_t i = 0; i < config.scenarios.size(); ++i) {
        const Scenario& s = config.scenarios[i];
        const nlohmann::json canon = s.to_json();
        const std::string hash = sha256_hex(canon.dump() + "\n" + code_version());
        nlohmann::json entry{{"line", s.line}, {"panel", s.panel}, {"series", s.series}, {"hash", hash},
                             {"parameters", canon}, {"warnings", reports[i].warnings}};
        if (reports[i].settle_time) entry["settle_time_g"] = *reports[i].settle_time;
        if (reports[i].imag_residue) entry["imag_residue"] = *reports[i].imag_residue;
        if (s.wants(Output::g2)) {
            entry["g2_undefined"] = reports[i].g2_undefined;
            entry["g2_clipped"] = reports[i].g2_clipped;
        }
        auto& files = entry["files"] = nlohmann::json::array();
        for (size_t k = 0; k < s.outputs.size(); ++k, ++t) {
            const std::string body = format_csv(tables[t]);
            std::ofstream out(options.out_dir / tables[t].name, std::ios::binary);
            out << body;
            if (!out) throw std::runtime_error("cannot write " + (options.out_dir / tables[t].name).string());
            files.push_back(tables[t].name);
            manifest["files"].push_back({{"path", tables[t].name},
                                         {"sha256", sha256_hex(body)},
                                         {"bytes", body.size()},
                                         {"scenario_hash", hash}});
        }
        manifest["scenarios"].push_back(std::move(entry));
    }
    std::ofstream m(options.out_dir / "manifest.json", std::ios::binary);
    m << manifest.dump(2) << "\n";
    if (!m) throw std::runtime_error("cannot write " + (options.out_dir / "manifest.json").string());
    return manifest;
}

}  // namespace uscqed::cli
