#include "doctest.h"

#include <cmath>
#include <numbers>

#include "uscqed/analysis.hpp"
#include "uscqed/bloch_siegert.hpp"
#include "uscqed/correlations.hpp"

using namespace uscqed;

namespace {

const GaugeChoice kDGC{Gauge::dipole, true};
const GaugeChoice kDG{Gauge::dipole, false};
const GaugeChoice kCGC{Gauge::coulomb, true};

Simulation make(const GaugeChoice& gc, double eta, PumpSpec pump_g, BathKind bath = BathKind::flat, int n_fock = 40,
                int n_keep = 16) {
    return Simulation(build_dressed_system(gc, ModelParams::from_g_units(eta, 0.25, 0.0, pump_g), bath, n_fock, n_keep));
}

std::vector<double> grid(double lo, double hi, double step) {
    std::vector<double> out;
    for (long i = 0; lo + static_cast<double>(i) * step <= hi + 1e-12; ++i) out.push_back(lo + static_cast<double>(i) * step);
    return out;
}

std::vector<double> tau_grid(const Simulation& sim, int n, int stride = 1) {
    const double h = sim.propagator().sample_step() * sim.system().params.g();
    std::vector<double> out;
    for (int j = 0; j < n; ++j) out.push_back(static_cast<double>(j * stride) * h);
    return out;
}

std::vector<double> real_parts(const CorrelationResult& r) {
    std::vector<double> out;
    for (const auto& v : r.values) out.push_back(v.real());
    return out;
}

}  // namespace

TEST_CASE("n_cav and zero-delay g2 of single dressed states") {
    const auto s = build_dressed_system(kDGC, ModelParams::from_g_units(0.3, 0.25), BathKind::flat, 30, 12);
    Matrix rho = Matrix::Zero(12, 12);
    rho(0, 0) = 1.0;
    CHECK(n_cav(rho, s.xp()) == 0.0);
    CHECK(std::isnan(g2_zero_delay(rho, s.xp())));
    rho.setZero();
    rho(1, 1) = 1.0;
    CHECK(n_cav(rho, s.xp()) == doctest::Approx(std::norm(s.xp()(0, 1))).epsilon(1e-14));
    CHECK(g2_zero_delay(rho, s.xp()) == 0.0);
    CHECK_THROWS_AS(n_cav(Matrix::Zero(3, 3), s.xp()), DimensionMismatch);
}

TEST_CASE("undriven system: ground steady state, vanishing correlations") {
    const auto sim = make(kDGC, 0.5, PumpSpec::none());
    CHECK_FALSE(sim.driven());
    CHECK(sim.states()[0](0, 0).real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sim.n_cav() < 1e-14);
    const auto g = sim.g1(0, 50);
    for (const auto& v : g.values) CHECK(std::abs(v) < 1e-14);
    const auto g2 = sim.g2_averaged(tau_grid(sim, 5));
    CHECK(g2.undefined == 5);
    CHECK(sim.settle_time() == 0.0);
}

TEST_CASE("fourier_re matches the analytic transform of a damped exponential") {
    const double gamma = 0.05, w0 = 1.0, h = 2.0 * std::numbers::pi / 20.0;
    std::vector<cplx> g;
    for (int j = 0; j < 20000; ++j) g.push_back(std::exp(cplx(-gamma, -w0) * (h * j)));
    for (double w : {0.9, 1.0, 1.03}) {
        const double exact = (1.0 / cplx(gamma, -(w - w0))).real();
        CHECK(fourier_re(g, h, w) == doctest::Approx(exact).epsilon(1e-2));
    }
}

TEST_CASE("tau grids must sit on the sampling grid") {
    const auto sim = make(kDGC, 0.3, PumpSpec::incoherent(0.01));
    const auto ok = tau_grid(sim, 4, 3);
    CHECK(sim.tau_steps(ok) == std::vector<long>{0, 3, 6, 9});
    CHECK_THROWS_AS(sim.g1(0, std::vector<double>{0.0, ok[1] * 0.5}), InvalidArgument);
    CHECK_THROWS_AS(sim.g2_t_tau(0, std::vector<double>{-1.0}), InvalidArgument);
}

TEST_CASE("incoherent drive: mean-subtracted g1 decays to zero, g1(0) = <x_D^- x_D^+>") {
    const auto sim = make(kDGC, 0.5, PumpSpec::incoherent(0.01));
    const auto g = sim.g1(0, 4000);
    const Matrix& rho = sim.states()[0];
    const Matrix xp = sim.system().xp();
    const cplx mean = (xp * rho).trace();
    CHECK(std::abs(g.values[0] - (n_cav(rho, xp) - std::norm(mean))) < 1e-14);
    CHECK(std::abs(g.values.back()) < 1e-6 * std::abs(g.values[0]));
    const auto sub = sim.g1(0, std::vector<double>{g.tau[0], g.tau[17]});
    CHECK(sub.values[1] == g.values[17]);
}

TEST_CASE("Jaynes-Cummings limit: polariton correlations decay at kappa/4") {
    // Both polaritons carry |C|^2 = 1/2, so each coherence decays at Gamma/2
    // with Gamma = kappa/2 (the eta = 0 Bloch-Siegert rate).
    const double eta = 0.05;
    const auto sim = make(GaugeChoice{Gauge::jc, false}, eta, PumpSpec::incoherent(1e-5), BathKind::flat, 20, 12);
    const double kappa = sim.system().params.kappa;
    const auto [gp, gm] = bs_decay_rates(0.0, kappa, false);
    CHECK(gp == gm);
    // beat period pi/g is 200 samples at eta = 0.05
    const auto g = sim.g1(0, 1201);
    const double beat = 200 * sim.propagator().sample_step();
    for (int j : {0, 37, 150}) {
        for (int n : {1, 3, 5}) {
            const double ratio = std::abs(g.values[j + 200 * n]) / std::abs(g.values[j]);
            CHECK(ratio == doctest::Approx(std::exp(-0.5 * gp * beat * n)).epsilon(1e-2));
        }
    }
}

TEST_CASE("spectrum: peaks at dressed transition frequencies, real QRT residue") {
    const auto sim = make(kDGC, 0.5, PumpSpec::incoherent(0.01));
    const double step = 0.01;
    const auto x = grid(-2.5, 2.5, step);
    const auto sp = sim.spectrum(x);
    CHECK(sp.imag_residue < 1e-8);
    const auto e = sim.system().basis.kept_energies();
    const double g = sim.system().params.g();
    const auto peaks = find_peaks(x, sp.values, 1e-2);
    REQUIRE(peaks.size() == 3);
    const auto line = [&](int k, int j) { return (e(k) - e(j) - 1.0) / g; };
    // polaritons: 1 -> 0 (narrowed) and 3 -> 0 (broadened), each within one bin
    const auto near = [&](double w) {
        double best = 1e9;
        for (const auto& p : peaks) best = std::min(best, std::abs(p.position - w));
        return best;
    };
    CHECK(near(line(1, 0)) <= step);
    CHECK(near(line(3, 0)) <= step);
    // the 2 -> 1 line sits at omega ~ 0.8 omega0 and is pulled by its neighbours
    CHECK(e(2) - e(1) == doctest::Approx(0.8).epsilon(0.05));
    CHECK(near(line(2, 1)) < 0.05);
    CHECK(fwhm(x, sp.values, peaks[1].index) < fwhm(x, sp.values, peaks[0].index));

    const auto unit = sim.spectrum(x, Normalization::unit_max);
    CHECK(*std::max_element(unit.values.begin(), unit.values.end()) == 1.0);
    CHECK(relative_max_difference(unit.values, sp.values) > 0.0);
}

TEST_CASE("stationary g2: averaged equals single time, bunching, decorrelation") {
    const auto sim = make(kDGC, 0.5, PumpSpec::incoherent(0.01));
    const auto taus = tau_grid(sim, 60, 50);
    const auto avg = sim.g2_averaged(taus);
    const auto single = sim.g2_t_tau(0, taus);
    CHECK(avg.values == single.values);
    CHECK(avg.values[0].real() > 1.0);
    CHECK(std::abs(avg.values.back().real() - 1.0) < 0.05);
    CHECK(avg.values[0].real() == doctest::Approx(g2_zero_delay(sim.states()[0], sim.system().xp())).epsilon(1e-12));
}

TEST_CASE("gauge invariance of spectra and g2, incoherent and coherent") {
    const auto x = grid(-2.5, 2.5, 0.01);
    for (const PumpSpec& pump : {PumpSpec::incoherent(0.01), PumpSpec::coherent(0.1)}) {
        const auto d = make(kDGC, 0.5, pump);
        const auto c = make(kCGC, 0.5, pump);
        CHECK(d.driven() == (pump.kind == PumpKind::coherent));
        CHECK(relative_max_difference(c.spectrum(x).values, d.spectrum(x).values) < 1e-6);
        const auto taus = tau_grid(d, 40, 10);
        const auto gd = real_parts(d.g2_averaged(taus));
        const auto gc = real_parts(c.g2_averaged(taus));
        for (size_t i = 0; i < gd.size(); ++i) CHECK(std::abs(gd[i] - gc[i]) < 1e-6 * std::abs(gd[i]));
        CHECK(std::abs(d.n_cav() - c.n_cav()) < 1e-8 * d.n_cav());
    }
}

TEST_CASE("gauge invariance holds for an ohmic bath too") {
    const auto x = grid(-2.5, 2.5, 0.02);
    const auto d = make(kDGC, 0.5, PumpSpec::incoherent(0.01), BathKind::ohmic);
    const auto c = make(kCGC, 0.5, PumpSpec::incoherent(0.01), BathKind::ohmic);
    const auto flat = make(kDGC, 0.5, PumpSpec::incoherent(0.01));
    const auto sd = d.spectrum(x).values;
    CHECK(relative_max_difference(c.spectrum(x).values, sd) < 1e-6);
    CHECK(relative_max_difference(flat.spectrum(x).values, sd) > 1e-3);
}

TEST_CASE("corrected pipeline reduces bunching at eta = 0.5") {
    for (const PumpSpec& pump : {PumpSpec::incoherent(0.01), PumpSpec::coherent(0.1)}) {
        const auto c = make(kDGC, 0.5, pump);
        const auto u = make(kDG, 0.5, pump);
        const std::vector<double> zero{0.0};
        const double gc = c.g2_averaged(zero).values[0].real();
        const double gu = u.g2_averaged(zero).values[0].real();
        CHECK(gc > 1.0);
        CHECK(gu > gc);
    }
}

TEST_CASE("coherent drive: settle time, periodic states, t-resolved g2") {
    const auto sim = make(kDGC, 0.1, PumpSpec::coherent(0.1));
    CHECK(sim.driven());
    const double t1 = sim.settle_time() * sim.system().params.g();
    CHECK(t1 > 0.0);
    CHECK(t1 < 550.0);
    // states differ within the period but share N_cav to first order
    CHECK(max_abs_diff(sim.states()[0], sim.states()[5]) > 1e-8);
    const auto taus = tau_grid(sim, 10, 7);
    const auto avg = real_parts(sim.g2_averaged(taus));
    std::vector<double> manual(taus.size(), 0.0);
    for (int k = 0; k < 20; ++k) {
        const auto r = real_parts(sim.g2_t_tau(k, taus));
        for (size_t i = 0; i < r.size(); ++i) manual[i] += r[i] / 20.0;
    }
    for (size_t i = 0; i < avg.size(); ++i) CHECK(avg[i] == doctest::Approx(manual[i]).epsilon(1e-12));

    SimulationOptions tight;
    tight.t_end_g = 5.0;
    const Simulation short_budget(build_dressed_system(kDGC, ModelParams::from_g_units(0.1, 0.25, 0.0, PumpSpec::coherent(0.1)),
                                                       BathKind::flat, 40, 16),
                                  tight);
    CHECK_THROWS_AS(short_budget.settle_time(), PseudoSteadyStateNotReached);
}

TEST_CASE("RWA and cosine drives give nearly the same spectrum") {
    const auto x = grid(-2.5, 2.5, 0.01);
    const auto rwa = make(kDGC, 0.5, PumpSpec::coherent(0.1, true));
    const auto cosine = make(kDGC, 0.5, PumpSpec::coherent(0.1, false));
    const auto a = rwa.spectrum(x, Normalization::unit_max).values;
    const auto b = cosine.spectrum(x, Normalization::unit_max).values;
    const double diff = relative_l1_difference(x, b, a);
    CHECK(diff < 0.05);
    CHECK(diff > 0.0);
}
