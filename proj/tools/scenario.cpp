#include "scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "uscqed/errors.hpp"

namespace uscqed::cli {

ConfigError::ConfigError(const std::string& source, long line, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + message), line_(line) {}

std::vector<double> Range::values() const {
    std::vector<double> out;
    const double n = std::floor((stop - start) / step + 1e-9);
    for (long i = 0; i <= static_cast<long>(n); ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
}

std::string to_string(Output o) {
    switch (o) {
        case Output::eigenvalues: return "eigenvalues";
        case Output::n_cav: return "n_cav";
        case Output::strengths: return "strengths";
        case Output::spectrum: return "spectrum";
        case Output::g2: return "g2";
        case Output::bs_spectrum: return "bs_spectrum";
    }
    return "?";
}

ModelParams Scenario::params(double eta) const {
    PumpSpec p = pump;
    return ModelParams::from_g_units(eta, kappa, gamma, p, omega0, omega_c);
}

bool Scenario::wants(Output o) const { return std::find(outputs.begin(), outputs.end(), o) != outputs.end(); }

nlohmann::json Scenario::to_json() const {
    nlohmann::json j;
    j["panel"] = panel;
    j["series"] = series;
    j["gauge"] = to_string(gauge.gauge);
    j["corrected"] = gauge.corrected;
    j["eta"] = etas;
    j["sweep"] = sweep;
    j["omega0"] = omega0;
    j["omega_c"] = omega_c;
    j["kappa_g"] = kappa;
    j["gamma_g"] = gamma;
    const char* kinds[] = {"none", "incoherent", "coherent"};
    j["pump"] = {{"kind", kinds[static_cast<int>(pump.kind)]},
                 {"P_inc_g", pump.P_inc},
                 {"Omega_d_g", pump.Omega_d},
                 {"omega_L", pump.omega_L ? nlohmann::json(*pump.omega_L) : nlohmann::json(nullptr)},
                 {"rwa", pump.rwa_drive}};
    j["bath"] = bath == BathKind::flat ? "flat" : "ohmic";
    j["n_fock"] = n_fock;
    j["n_keep"] = n_keep;
    j["samples"] = samples;
    j["t_end_g"] = t_end;
    auto& outs = j["outputs"] = nlohmann::json::array();
    for (Output o : outputs) outs.push_back(to_string(o));
    if (detuning) j["detuning"] = {detuning->start, detuning->stop, detuning->step};
    if (tau) j["tau"] = {{"stop", tau->stop}, {"stride", tau->stride}};
    j["normalization"] = normalization == Normalization::raw ? "raw" : "unit_max";
    j["levels"] = levels;
    j["g2_phase"] = g2_phase ? nlohmann::json(*g2_phase) : nlohmann::json(nullptr);
    j["bs_form"] = bs_form == BsForm::simplified ? "simplified" : "exact";
    return j;
}

namespace {

const std::set<std::string> kTopKeys{"figure", "defaults", "scenario"};
const std::set<std::string> kScenarioKeys{"panel", "series", "outputs", "bs_form", "model",
                                          "bath",  "pump",   "grids",   "truncation", "solver"};
const std::set<std::string> kModelKeys{"gauge", "corrected", "eta", "omega0", "omega_c", "kappa", "gamma"};
const std::set<std::string> kBathKeys{"kind"};
const std::set<std::string> kPumpKeys{"kind", "P_inc", "Omega_d", "omega_L", "rwa"};
const std::set<std::string> kGridKeys{"detuning", "tau", "eta", "normalization", "levels", "g2_phase"};
const std::set<std::string> kTruncationKeys{"n_fock", "n_keep"};
const std::set<std::string> kSolverKeys{"samples", "t_end"};

class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const toml::node* node, long fallback, const std::string& msg) const {
        const long at = node ? static_cast<long>(node->source().begin.line) : 0;
        const long line = at > 0 ? at : fallback;
        throw ConfigError(source_, line, msg);
    }

    void check_keys(const toml::table& t, const std::set<std::string>& allowed, const std::string& where,
                    long fallback = 0) const {
        for (const auto& [k, v] : t) {
            if (!allowed.count(std::string(k.str()))) {
                fail(&v, fallback, "unknown key '" + std::string(k.str()) + "' in " + where);
            }
        }
    }

    const toml::table* table(const toml::table& t, const char* key, long line) const {
        const toml::node* n = t.get(key);
        if (!n) return nullptr;
        if (!n->is_table()) fail(n, line, std::string("'") + key + "' must be a table");
        return n->as_table();
    }

    template <class T>
    std::optional<T> get(const toml::table* t, const char* key, const char* what) const {
        if (!t) return std::nullopt;
        const toml::node* n = t->get(key);
        if (!n) return std::nullopt;
        if (auto v = n->value<T>()) return *v;
        fail(n, 0, std::string("'") + key + "' must be " + what);
    }

    double number(const toml::table* t, const char* key, double fallback) const {
        return get<double>(t, key, "a number").value_or(fallback);
    }

    Range range(const toml::table* grids, const char* key, long line) const {
        const toml::node* n = grids->get(key);
        if (!n->is_table()) fail(n, line, std::string("grid '") + key + "' must be a table {start, stop, step}");
        const toml::table& t = *n->as_table();
        check_keys(t, {"start", "stop", "step"}, std::string("grid '") + key + "'", line);
        Range r;
        const auto start = get<double>(&t, "start", "a number");
        const auto stop = get<double>(&t, "stop", "a number");
        const auto step = get<double>(&t, "step", "a number");
        if (!start || !stop || !step) fail(n, line, std::string("grid '") + key + "' needs start, stop and step");
        r.start = *start;
        r.stop = *stop;
        r.step = *step;
        if (!(r.step > 0.0) || !(r.stop >= r.start)) {
            fail(n, line, std::string("grid '") + key + "' must be nonempty and increasing (step > 0, stop >= start)");
        }
        if ((r.stop - r.start) / r.step > 1e7) fail(n, line, std::string("grid '") + key + "' has too many points");
        return r;
    }

    const std::string& source() const noexcept { return source_; }

private:
    std::string source_;
};

void merge_defaults(toml::table& into, const toml::table& defaults) {
    for (const auto& [k, v] : defaults) {
        toml::node* existing = into.get(k.str());
        if (!existing) {
            into.insert(k, v);
        } else if (existing->is_table() && v.is_table()) {
            merge_defaults(*existing->as_table(), *v.as_table());
        }
    }
}

bool valid_label(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+';
    });
}

Scenario parse_scenario(const Reader& r, const toml::table& t) {
    Scenario s;
    s.line = static_cast<long>(t.source().begin.line);
    const long line = s.line;
    r.check_keys(t, kScenarioKeys, "[[scenario]]", line);

    s.panel = r.get<std::string>(&t, "panel", "a string").value_or("");
    s.series = r.get<std::string>(&t, "series", "a string").value_or("");
    if (!valid_label(s.series)) r.fail(t.get("series"), line, "series label must be nonempty [A-Za-z0-9.+-]");
    if (!s.panel.empty() && !valid_label(s.panel)) r.fail(t.get("panel"), line, "panel label must be [A-Za-z0-9.+-]");

    const toml::node* outs = t.get("outputs");
    if (!outs || !outs->is_array()) r.fail(outs, line, "'outputs' must be an array of strings");
    for (const auto& o : *outs->as_array()) {
        const auto name = o.value<std::string>();
        const std::vector<Output> all{Output::eigenvalues, Output::n_cav, Output::strengths,
                                      Output::spectrum,    Output::g2,    Output::bs_spectrum};
        const auto it = std::find_if(all.begin(), all.end(), [&](Output x) { return name && to_string(x) == *name; });
        if (it == all.end()) {
            r.fail(&o, line, "unknown output '" + name.value_or("?") +
                                 "' (expected eigenvalues, n_cav, strengths, spectrum, g2, bs_spectrum)");
        }
        if (s.wants(*it)) r.fail(&o, line, "duplicate output '" + *name + "'");
        s.outputs.push_back(*it);
    }

    const toml::table* model = r.table(t, "model", line);
    if (!model) r.fail(nullptr, line, "missing [scenario.model]");
    r.check_keys(*model, kModelKeys, "model", line);
    const std::string gauge = r.get<std::string>(model, "gauge", "a string").value_or("dipole");
    try {
        s.gauge.gauge = gauge_from_string(gauge);
    } catch (const Error& e) {
        r.fail(model->get("gauge"), line, e.what());
    }
    s.gauge.corrected = r.get<bool>(model, "corrected", "true or false").value_or(true);
    try {
        s.gauge.validate();
    } catch (const Error& e) {
        r.fail(model->get("corrected"), line, e.what());
    }
    s.omega0 = r.number(model, "omega0", 1.0);
    s.omega_c = r.number(model, "omega_c", 1.0);
    s.kappa = r.number(model, "kappa", 0.0);
    s.gamma = r.number(model, "gamma", 0.0);

    const toml::table* grids = r.table(t, "grids", line);
    if (grids) r.check_keys(*grids, kGridKeys, "grids", line);
    const auto eta = r.get<double>(model, "eta", "a number");
    const bool has_sweep = grids && grids->get("eta");
    if (eta && has_sweep) r.fail(grids->get("eta"), line, "give either model.eta or grids.eta, not both");
    if (!eta && !has_sweep) r.fail(model, line, "missing model.eta (or a grids.eta sweep)");
    if (eta) {
        s.etas = {*eta};
    } else {
        s.etas = r.range(grids, "eta", line).values();
        s.sweep = true;
    }

    if (const toml::table* bath = r.table(t, "bath", line)) {
        r.check_keys(*bath, kBathKeys, "bath", line);
        const std::string kind = r.get<std::string>(bath, "kind", "a string").value_or("flat");
        if (kind == "flat") s.bath = BathKind::flat;
        else if (kind == "ohmic") s.bath = BathKind::ohmic;
        else r.fail(bath->get("kind"), line, "bath kind must be 'flat' or 'ohmic'");
    }

    if (const toml::table* pump = r.table(t, "pump", line)) {
        r.check_keys(*pump, kPumpKeys, "pump", line);
        const std::string kind = r.get<std::string>(pump, "kind", "a string").value_or("none");
        if (kind == "none") {
            s.pump = PumpSpec::none();
        } else if (kind == "incoherent") {
            const auto p = r.get<double>(pump, "P_inc", "a number");
            if (!p) r.fail(pump, line, "incoherent pump needs P_inc");
            s.pump = PumpSpec::incoherent(*p);
        } else if (kind == "coherent") {
            const auto d = r.get<double>(pump, "Omega_d", "a number");
            if (!d) r.fail(pump, line, "coherent pump needs Omega_d");
            s.pump = PumpSpec::coherent(*d, r.get<bool>(pump, "rwa", "true or false").value_or(true),
                                        r.get<double>(pump, "omega_L", "a number"));
        } else {
            r.fail(pump->get("kind"), line, "pump kind must be 'none', 'incoherent' or 'coherent'");
        }
    }

    if (const toml::table* tr = r.table(t, "truncation", line)) {
        r.check_keys(*tr, kTruncationKeys, "truncation", line);
        s.n_fock = static_cast<int>(r.get<int64_t>(tr, "n_fock", "an integer").value_or(s.n_fock));
        s.n_keep = static_cast<int>(r.get<int64_t>(tr, "n_keep", "an integer").value_or(s.n_keep));
    }
    if (const toml::table* so = r.table(t, "solver", line)) {
        r.check_keys(*so, kSolverKeys, "solver", line);
        s.samples = static_cast<int>(r.get<int64_t>(so, "samples", "an integer").value_or(s.samples));
        s.t_end = r.number(so, "t_end", s.t_end);
    }

    if (grids) {
        if (grids->get("detuning")) s.detuning = r.range(grids, "detuning", line);
        if (const toml::node* n = grids->get("tau")) {
            if (!n->is_table()) r.fail(n, line, "grid 'tau' must be a table {stop, stride}");
            r.check_keys(*n->as_table(), {"stop", "stride"}, "grid 'tau'", line);
            TauGrid g;
            g.stop = r.number(n->as_table(), "stop", 0.0);
            g.stride = static_cast<int>(r.get<int64_t>(n->as_table(), "stride", "an integer").value_or(1));
            if (!(g.stop > 0.0) || g.stride < 1) r.fail(n, line, "grid 'tau' needs stop > 0 and stride >= 1");
            s.tau = g;
        }
        const std::string norm = r.get<std::string>(grids, "normalization", "a string").value_or("unit_max");
        if (norm == "raw") s.normalization = Normalization::raw;
        else if (norm == "unit_max") s.normalization = Normalization::unit_max;
        else r.fail(grids->get("normalization"), line, "normalization must be 'raw' or 'unit_max'");
        s.levels = static_cast<int>(r.get<int64_t>(grids, "levels", "an integer").value_or(s.levels));
        if (auto k = r.get<int64_t>(grids, "g2_phase", "an integer")) s.g2_phase = static_cast<int>(*k);
    }
    if (auto form = r.get<std::string>(&t, "bs_form", "a string")) {
        if (*form == "simplified") s.bs_form = BsForm::simplified;
        else if (*form == "exact") s.bs_form = BsForm::exact;
        else r.fail(t.get("bs_form"), line, "bs_form must be 'simplified' or 'exact'");
    }

    // cross-field checks
    if (s.n_fock < 2) r.fail(nullptr, line, "n_fock must be >= 2");
    if (s.n_keep < 2 || s.n_keep > 2 * s.n_fock) r.fail(nullptr, line, "n_keep must lie in [2, 2 n_fock]");
    if (s.levels < 1 || s.levels > 2 * s.n_fock) r.fail(nullptr, line, "levels must lie in [1, 2 n_fock]");
    const bool dynamic = s.wants(Output::spectrum) || s.wants(Output::g2);
    if (s.sweep && (dynamic || s.wants(Output::bs_spectrum))) {
        r.fail(nullptr, line, "spectrum, g2 and bs_spectrum need a single model.eta, not a sweep");
    }
    if ((s.wants(Output::spectrum) || s.wants(Output::bs_spectrum)) && !s.detuning) {
        r.fail(nullptr, line, "spectrum outputs need grids.detuning");
    }
    if (s.wants(Output::g2) && !s.tau) r.fail(nullptr, line, "g2 needs grids.tau");
    if (s.g2_phase && (*s.g2_phase < 0 || *s.g2_phase >= s.samples)) {
        r.fail(nullptr, line, "g2_phase must lie in [0, samples)");
    }
    if (s.wants(Output::bs_spectrum) && s.pump.kind != PumpKind::incoherent) {
        r.fail(nullptr, line, "bs_spectrum needs an incoherent pump (E = P_inc / kappa)");
    }
    for (double e : s.etas) {
        try {
            s.params(e).validate();
            BathModel{s.bath, s.params(e).kappa, s.omega_c}.validate();
        } catch (const Error& err) {
            r.fail(nullptr, line, err.what());
        }
    }
    return s;
}

}  // namespace

Config parse_config(std::string_view text, const std::string& source) {
    toml::table root;
    try {
        root = toml::parse(text, source);
    } catch (const toml::parse_error& e) {
        throw ConfigError(source, static_cast<long>(e.source().begin.line), std::string(e.description()));
    }
    const Reader r(source);
    r.check_keys(root, kTopKeys, "the top level", 1);

    Config c;
    c.figure = r.get<std::string>(&root, "figure", "a string").value_or("run");
    if (!valid_label(c.figure)) r.fail(root.get("figure"), 1, "figure label must be [A-Za-z0-9.+-]");

    const toml::table* defaults = r.table(root, "defaults", 1);
    const toml::node* list = root.get("scenario");
    if (!list) return c;
    if (!list->is_array_of_tables()) r.fail(list, 1, "'scenario' must be an array of tables ([[scenario]])");
    std::set<std::string> names;
    for (auto& node : *root.get("scenario")->as_array()) {
        toml::table& t = *node.as_table();
        if (defaults) merge_defaults(t, *defaults);
        Scenario s = parse_scenario(r, t);
        for (Output o : s.outputs) {
            const std::string key = to_string(o) + "/" + s.panel + "/" + s.series;
            if (!names.insert(key).second) {
                throw ConfigError(source, s.line,
                                  "two scenarios write " + to_string(o) + " for panel '" + s.panel + "', series '" +
                                      s.series + "'");
            }
        }
        c.scenarios.push_back(std::move(s));
    }
    return c;
}

Config load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path, 0, "cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

}  // namespace uscqed::cli
