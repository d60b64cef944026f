#include "doctest.h"

#include <set>

#include "oracles.hpp"
#include "uscqed/dressing.hpp"
#include "uscqed/models.hpp"

using namespace uscqed;

namespace {

ModelParams params_at(double eta) {
    ModelParams p;
    p.eta = eta;
    return p;
}

const GaugeChoice kDGC{Gauge::dipole, true};
const GaugeChoice kDG{Gauge::dipole, false};
const GaugeChoice kCGC{Gauge::coulomb, true};

}  // namespace

TEST_CASE("diagonalize: ordering, orthonormality, ground shift") {
    const auto s = fock_space(50);
    const auto b = diagonalize(build_dipole_qrm(params_at(0.5), s), 24);
    CHECK(b.n_keep == 24);
    CHECK(b.source_dim() == 100);
    CHECK(b.energies(0) == 0.0);
    for (int i = 1; i < b.energies.size(); ++i) CHECK(b.energies(i) > b.energies(i - 1));
    const Matrix gram = b.states.adjoint() * b.states;
    CHECK(max_abs_diff(gram, Matrix::Identity(100, 100)) < 1e-10);
    for (int j = 0; j < 100; ++j) {
        Eigen::Index idx;
        b.states.col(j).cwiseAbs().maxCoeff(&idx);
        CHECK(std::abs(b.states(idx, j).imag()) == 0.0);
        CHECK(b.states(idx, j).real() > 0.0);
    }
    CHECK_THROWS_AS(diagonalize(build_dipole_qrm(params_at(0.5), s), 101), InvalidArgument);
    CHECK_THROWS_AS(diagonalize(OperatorMatrix(s, annihilation(s).matrix()), 4), InvalidArgument);
}

TEST_CASE("diagonalize is deterministic") {
    const auto s = fock_space(30);
    const auto h = build_dipole_qrm(params_at(0.3), s);
    const auto b1 = diagonalize(h, 20);
    const auto b2 = diagonalize(h, 20);
    CHECK(b1.energies == b2.energies);
    CHECK(b1.states == b2.states);
}

TEST_CASE("uncoupled limit gives bare product states") {
    const auto s = fock_space(8);
    const auto b = diagonalize(build_dipole_qrm(params_at(0.0), s), 16);
    // ground |g,0>, then the degenerate pair {|g,1>, |e,0>} in index order
    CHECK(b.energies(1) == doctest::Approx(1.0));
    CHECK(b.energies(2) == doctest::Approx(1.0));
    CHECK(std::abs(b.states(s.index(0, 0), 0) - 1.0) < 1e-14);
    CHECK(std::abs(b.states(s.index(0, 1), 1) - 1.0) < 1e-14);
    CHECK(std::abs(b.states(s.index(1, 0), 2) - 1.0) < 1e-14);
    for (int j = 0; j < 16; ++j) CHECK(b.states.col(j).cwiseAbs().maxCoeff() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("energies agree with a high-truncation LAPACK oracle") {
    const auto ref = oracle::eigvalsh(oracle::dipole_qrm(200, 0.2));
    const auto b = diagonalize(build_dipole_qrm(params_at(0.2), fock_space(50)), 24);
    for (int i = 0; i < 10; ++i) CHECK(std::abs(b.energies(i) - (ref[i] - ref[0])) < 1e-9);
}

TEST_CASE("jump operator basics") {
    const auto s = fock_space(10);
    const auto p0 = params_at(0.0);
    const auto b0 = diagonalize(build_dipole_qrm(p0, s), 12);
    const auto x0 = jump_operator(b0, quadrature_pi(kDG, p0, s));
    // Only |g,1> (state 1) couples to the ground state, with |C| = 1.
    CHECK(std::abs(std::abs(x0.matrix(0, 1)) - 1.0) < 1e-14);
    for (int k = 2; k < 12; ++k) CHECK(x0.matrix(0, k) == cplx(0.0));

    const auto p = params_at(0.5);
    const auto b = diagonalize(build_dipole_qrm(p, fock_space(50)), 24);
    const auto x = jump_operator(b, quadrature_pi(kDGC, p, fock_space(50)));
    CHECK(x.direction == JumpDirection::lowering);
    for (int j = 0; j < 24; ++j)
        for (int k = 0; k <= j; ++k) CHECK(x.matrix(j, k) == cplx(0.0));
    Vector ground = Vector::Zero(24);
    ground(0) = 1.0;
    CHECK((x.matrix * ground).norm() == 0.0);
    const auto xm = x.conjugate();
    CHECK(xm.direction == JumpDirection::raising);
    CHECK(xm.matrix == x.matrix.adjoint());
    CHECK_THROWS_AS(jump_operator(b, quadrature_pi(kDGC, p, fock_space(40))), DimensionMismatch);
}

TEST_CASE("diagonal matrix elements vanish by parity") {
    for (double eta : {0.1, 0.5}) {
        const auto s = fock_space(50);
        const auto p = params_at(eta);
        for (const GaugeChoice& gc : {kDGC, kDG, kCGC, GaugeChoice{Gauge::coulomb, false}, GaugeChoice{Gauge::jc, false}}) {
            const auto b = diagonalize(system_hamiltonian(gc, p, s), 24);
            const Matrix v = b.kept_states();
            const Matrix raw = v.adjoint() * quadrature_pi(gc, p, s).matrix() * v;
            CHECK(raw.diagonal().cwiseAbs().maxCoeff() < 1e-10);
        }
    }
}

TEST_CASE("gauge covariance of jump operators and strengths") {
    const auto s = fock_space(60);
    const auto p = params_at(0.5);
    const auto bd = diagonalize(build_dipole_qrm(p, s), 24);
    const auto bc = diagonalize(build_coulomb_qrm(p, s), 24);
    const auto xd = jump_operator(bd, quadrature_pi(kDGC, p, s));
    const auto xc = jump_operator(bc, quadrature_pi(kCGC, p, s));
    const Matrix u = gauge_unitary(p, s).matrix();
    const Matrix lhs = to_full_space(bd, xd.matrix).matrix();
    const Matrix rhs = u * to_full_space(bc, xc.matrix).matrix() * u.adjoint();
    CHECK(max_abs_diff(lhs, rhs) < 1e-9);

    for (int i = 0; i < 24; ++i) CHECK(std::abs(bd.energies(i) - bc.energies(i)) < 1e-8);
    CHECK(max_abs_diff(xd.matrix.cwiseAbs().cast<cplx>(), xc.matrix.cwiseAbs().cast<cplx>()) < 1e-9);
    const RealMatrix sd = transition_strengths(bd, quadrature_pi(kDGC, p, s));
    const RealMatrix sc = transition_strengths(bc, quadrature_pi(kCGC, p, s));
    CHECK((sd - sc).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("frequency-resolved jumps partition x+") {
    const auto s = fock_space(50);
    for (double eta : {0.0, 0.5}) {
        const auto p = params_at(eta);
        const auto b = diagonalize(build_dipole_qrm(p, s), 24);
        const auto pi = quadrature_pi(kDGC, p, s);
        const auto comps = frequency_resolved_jumps(b, pi);
        Matrix sum = Matrix::Zero(24, 24);
        for (size_t i = 0; i < comps.size(); ++i) {
            sum += comps[i].xplus;
            CHECK(comps[i].omega > 0.0);
            if (i > 0) CHECK(comps[i].omega - comps[i - 1].omega > kFrequencyBinTolerance);
        }
        CHECK(sum == jump_operator(b, pi).matrix);

        if (eta == 0.0) {
            // bare gaps are integers when omega_c = omega0
            for (const auto& c : comps) CHECK(std::abs(c.omega - std::round(c.omega)) < 1e-12);
            CHECK(comps.front().omega == doctest::Approx(1.0));
        } else {
            // one bin per distinct transition frequency among allowed pairs
            const Matrix x = jump_operator(b, pi).matrix;
            std::vector<double> w;
            for (int j = 0; j < 24; ++j)
                for (int k = j + 1; k < 24; ++k)
                    if (x(j, k) != cplx(0.0)) w.push_back(b.energies(k) - b.energies(j));
            std::sort(w.begin(), w.end());
            size_t distinct = w.empty() ? 0 : 1;
            for (size_t i = 1; i < w.size(); ++i)
                if (w[i] - w[i - 1] > kFrequencyBinTolerance) ++distinct;
            CHECK(comps.size() == distinct);
            CHECK(w.size() >= comps.size());
        }
    }
}

TEST_CASE("transition strengths at small eta follow the first-order formulas") {
    const auto s = fock_space(40);
    {
        const auto p = params_at(1e-6);
        const auto b = diagonalize(build_dipole_qrm(p, s), 12);
        const RealMatrix t = transition_strengths(b, quadrature_pi(kDGC, p, s));
        CHECK(t(0, 1) == doctest::Approx(0.25).epsilon(1e-5));
        CHECK(t(1, 0) == t(0, 1));
        CHECK(t(0, 0) == 0.0);
    }
    const auto p = params_at(0.1);
    const auto b = diagonalize(build_dipole_qrm(p, s), 12);
    const RealMatrix tc = transition_strengths(b, quadrature_pi(kDGC, p, s));
    const RealMatrix tu = transition_strengths(b, quadrature_pi(kDG, p, s));
    // O(eta^2) corrections allowed
    CHECK(std::abs(tc(0, 1) - 0.1875) < 0.02);
    CHECK(std::abs(tu(0, 1) - 0.2875) < 0.02);
    CHECK(tc(0, 1) < 0.25);
    CHECK(tu(0, 1) > 0.25);
}

TEST_CASE("sum rule in the dipole gauge") {
    const auto s = fock_space(50);
    const auto p = params_at(0.4);
    const auto b = diagonalize(build_dipole_qrm(p, s), 24);
    const Matrix a = annihilation(s).matrix();
    const Matrix sx = pauli(s, Pauli::x).matrix();
    const Matrix v = b.kept_states().leftCols(10);
    const Matrix lhs = v.adjoint() * (a.adjoint() - a - 2.0 * I * p.eta_c() * sx) * v;
    const Matrix rhs_op = v.adjoint() * (a.adjoint() + a) * v;
    double worst = 0.0;
    for (int k = 0; k < 10; ++k)
        for (int j = 0; j < 10; ++j) {
            const double wkj = b.energies(k) - b.energies(j);
            worst = std::max(worst, std::abs(lhs(k, j) - wkj / p.omega_c * rhs_op(k, j)));
        }
    CHECK(worst < 1e-8);
}

TEST_CASE("state tracking follows the 2/3 crossing") {
    const auto s = fock_space(50);
    const auto before = diagonalize(build_dipole_qrm(params_at(0.42), s), 8);
    const auto after = diagonalize(build_dipole_qrm(params_at(0.45), s), 8);
    const auto perm = track_states(before, after);
    std::set<int> seen(perm.begin(), perm.end());
    CHECK(seen.size() == 8);
    CHECK(perm[0] == 0);
    CHECK(perm[1] == 1);
    CHECK(perm[2] == 3);
    CHECK(perm[3] == 2);
}
