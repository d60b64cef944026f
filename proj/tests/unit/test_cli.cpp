#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "builtin_configs.hpp"
#include "runner.hpp"
#include "scenario.hpp"

using namespace uscqed;
using namespace uscqed::cli;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"(figure = "t"

[defaults.model]
kappa = 0.25
[defaults.truncation]
n_fock = 12
n_keep = 8

[[scenario]]
series = "DGC"
outputs = ["n_cav", "strengths", "eigenvalues"]
[scenario.model]
gauge = "dipole"
[scenario.pump]
kind = "incoherent"
P_inc = 0.01
[scenario.grids]
eta = { start = 0.05, stop = 0.15, step = 0.05 }
levels = 4

[[scenario]]
panel = "eta0.1"
series = "DG"
outputs = ["spectrum", "g2"]
[scenario.model]
gauge = "dipole"
corrected = false
eta = 0.1
[scenario.pump]
kind = "incoherent"
P_inc = 0.01
[scenario.grids]
detuning = { start = -2.0, stop = 2.0, step = 0.05 }
tau = { stop = 2.0, stride = 2 }

[[scenario]]
panel = "eta0.1"
series = "BSC"
outputs = ["bs_spectrum"]
[scenario.model]
eta = 0.1
[scenario.pump]
kind = "incoherent"
P_inc = 0.01
[scenario.grids]
detuning = { start = -2.0, stop = 2.0, step = 0.05 }
)";

long error_line(const std::string& text) {
    try {
        parse_config(text, "cfg");
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("usc_qed_cli_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("config parsing") {
    const Config c = parse_config(kSmall, "small");
    REQUIRE(c.scenarios.size() == 3);
    const Scenario& s = c.scenarios[0];
    CHECK(s.sweep);
    CHECK(s.etas.size() == 3);
    CHECK(s.n_fock == 12);
    CHECK(s.kappa == 0.25);
    CHECK(s.line == 9);
    CHECK(s.gauge.corrected);
    CHECK(c.scenarios[1].pump.kind == PumpKind::incoherent);
    CHECK(c.scenarios[1].params(0.1).pump.P_inc == doctest::Approx(0.001));

    CHECK(parse_config("figure = \"x\"\n", "e").scenarios.empty());

    const std::string head = "figure = \"x\"\n[[scenario]]\nseries = \"A\"\noutputs = [\"spectrum\"]\n[scenario.model]\n";
    CHECK(error_line(head + "eta = 0.1\nkapa = 1.0\n") == 7);                         // unknown key
    CHECK(error_line(head + "eta = 0.1\n") == 2);                                      // spectrum without grid
    CHECK(error_line(head + "eta = \"big\"\n") == 6);                                  // wrong type
    CHECK(error_line(head + "eta = 0.1\n[scenario.grids]\ndetuning = { start = 1.0, stop = 0.0, step = 0.1 }\n") == 8);
    CHECK(error_line(head + "eta = 0.1\n[scenario.truncation]\nn_fock = 4\nn_keep = 9\n") == 2);
    CHECK(error_line(head + "eta = 0.1\n[scenario.pump]\nkind = \"laser\"\n") == 8);
    CHECK(error_line("figure = \"x\"\n[[scenario]\n") == 2);                          // TOML syntax
    CHECK(error_line("figure = \"x\"\n[[scenario]]\nseries = \"A\"\noutputs = [\"n_cav\"]\n[scenario.model]\n"
                     "eta = 0.1\n[scenario.grids]\neta = { start = 0.1, stop = 0.2, step = 0.1 }\n") == 8);
    CHECK(error_line("figure = \"x\"\n[[scenario]]\nseries = \"A\"\noutputs = [\"g2\"]\n[scenario.model]\n"
                     "[scenario.grids]\neta = { start = 0.1, stop = 0.2, step = 0.1 }\n") == 2);
    // two scenarios writing the same file
    CHECK(error_line("figure = \"x\"\n[[scenario]]\nseries = \"A\"\noutputs = [\"n_cav\"]\n[scenario.model]\neta = 0.1\n"
                     "[[scenario]]\nseries = \"A\"\noutputs = [\"n_cav\"]\n[scenario.model]\neta = 0.2\n") == 7);
}

TEST_CASE("bundled figure configs") {
    std::set<std::string> ids;
    for (const auto& [id, text] : builtin_configs()) {
        ids.insert(id);
        const Config c = parse_config(text, id);
        CHECK(c.figure == id);
        CHECK(!c.scenarios.empty());
    }
    CHECK(ids == std::set<std::string>{"fig1", "fig2", "fig3", "figS2", "figS3", "figS4", "figS6"});

    const Config fig2 = parse_config(builtin_configs().at("fig2"), "fig2");
    CHECK(fig2.scenarios.size() == 8);
    const Config fig3 = parse_config(builtin_configs().at("fig3"), "fig3");
    std::set<std::string> combos;
    for (const auto& s : fig3.scenarios) {
        CHECK(s.wants(Output::spectrum));
        CHECK(s.wants(Output::g2));
        combos.insert(s.panel + "/" + to_string(s.gauge.gauge) + "/" + (s.gauge.corrected ? "c" : "u"));
    }
    CHECK(combos.size() == 8);
}

TEST_CASE("number formatting and hashing") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(-3.0) == "-3");
    CHECK(format_number(1e-20) == "9.9999999999999995e-21");
    Table t{"x.csv", "eta", {"A", "B"}, {0.5, 1.0}, {{1.0, 2.0}, {3.0, 4.0}}};
    CHECK(format_csv(t) == "eta,A,B\n0.5,1,3\n1,2,4\n");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("run: files, manifest and determinism") {
    const Config c = parse_config(kSmall, "small");
    RunOptions a;
    a.out_dir = scratch("a");
    a.threads = 1;
    const auto ma = run(c, a);
    RunOptions b = a;
    b.out_dir = scratch("b");
    b.threads = 3;
    const auto mb = run(c, b);

    const std::vector<std::string> expected{"t_ncav_DGC.csv",       "t_strengths_DGC.csv",     "t_eigenvalues_DGC.csv",
                                            "t_spectrum-eta0.1_DG.csv", "t_g2-eta0.1_DG.csv", "t_bs-eta0.1_BSC.csv"};
    REQUIRE(ma["files"].size() == expected.size());
    for (size_t i = 0; i < expected.size(); ++i) {
        const auto& f = ma["files"][i];
        CHECK(f["path"] == expected[i]);
        const std::string body = slurp(a.out_dir / expected[i]);
        CHECK(f["sha256"] == sha256_hex(body));
        CHECK(body == slurp(b.out_dir / expected[i]));
    }
    CHECK(slurp(a.out_dir / "manifest.json") == slurp(b.out_dir / "manifest.json"));
    CHECK(ma["scenarios"][0]["hash"] != ma["scenarios"][1]["hash"]);

    const std::string strengths = slurp(a.out_dir / "t_strengths_DGC.csv");
    CHECK(strengths.rfind("eta,I,II,III\n", 0) == 0);
    CHECK(slurp(a.out_dir / "t_spectrum-eta0.1_DG.csv").rfind("omega_minus_omegaL_over_g,DG\n", 0) == 0);
    const std::string g2 = slurp(a.out_dir / "t_g2-eta0.1_DG.csv");
    CHECK(g2.rfind("tau_g,DG\n0,", 0) == 0);
    CHECK(ma["scenarios"][1].contains("settle_time_g"));

    // truncation override changes the hash
    RunOptions o = a;
    o.out_dir = scratch("o");
    o.n_fock = 14;
    Config only{"t", {c.scenarios[2]}};
    const auto mo = run(only, o);
    CHECK(mo["scenarios"][0]["hash"] != ma["scenarios"][2]["hash"]);
    o.n_keep = 40;
    CHECK_THROWS(run(only, o));

    RunOptions e = a;
    e.out_dir = scratch("empty");
    const auto me = run(Config{"x", {}}, e);
    CHECK(me["files"].empty());
    CHECK(fs::exists(e.out_dir / "manifest.json"));
}
