#include "uscqed/bloch_siegert.hpp"

#include <cmath>
#include <sstream>

namespace uscqed {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw InvalidArgument(msg);
}

}  // namespace

void BsParams::validate() const {
    require(std::isfinite(eta) && eta >= 0.0, "BS: eta must be >= 0");
    require(std::isfinite(kappa) && kappa > 0.0, "BS: kappa must be > 0");
    require(std::isfinite(omega0) && omega0 > 0.0, "BS: omega0 must be > 0");
    require(std::isfinite(E_weak) && E_weak >= 0.0, "BS: E_weak must be >= 0");
}

std::vector<std::string> BsParams::warnings() const {
    std::vector<std::string> out;
    if (E_weak >= 0.05) out.push_back("E_weak = " + std::to_string(E_weak) + " is not small; weak excitation is questionable");
    if (eta >= 0.15) out.push_back("eta = " + std::to_string(eta) + " is outside the perturbative range");
    if (g() <= 2.0 * kappa) out.push_back("g/kappa <= 2: the simplified two-Lorentzian form needs strong coupling");
    return out;
}

OperatorMatrix bs_hamiltonian(const ModelParams& params, const SpaceDescriptor& space) {
    params.validate();
    const double e2 = params.eta * params.eta;
    const Matrix a = annihilation(space).matrix();
    const Matrix sp = pauli(space, Pauli::plus).matrix();
    const Matrix sm = pauli(space, Pauli::minus).matrix();
    Matrix h = params.omega0 * (1.0 + 0.5 * e2) * sp * sm + params.omega0 * (1.0 - 0.5 * e2) * number(space).matrix() +
               I * params.g() * (a.adjoint() * sm - a * sp);
    h = 0.5 * (h + h.adjoint()).eval();
    return {space, std::move(h), true};
}

BsPolaritons bs_polariton_states(double eta) {
    require(eta >= 0.0, "BS: eta must be >= 0");
    const double r = 1.0 / std::sqrt(2.0);
    const double q = eta / 4.0;
    return {r * (1.0 + q), I * r * (1.0 - q), r * (1.0 - q), -I * r * (1.0 + q)};
}

std::pair<double, double> bs_matrix_elements(double eta, bool corrected) {
    require(eta >= 0.0, "BS: eta must be >= 0");
    const double s = corrected ? 2.5 * eta : -1.5 * eta;
    return {0.25 * (1.0 + s), 0.25 * (1.0 - s)};
}

std::pair<double, double> bs_decay_rates(double eta, double kappa, bool corrected) {
    require(kappa > 0.0, "BS: kappa must be > 0");
    const auto [pp, pm] = bs_matrix_elements(eta, corrected);
    const double gp = 2.0 * kappa * pp;
    const double gm = 2.0 * kappa * pm;
    if (!(gp > 0.0) || !(gm > 0.0)) {
        std::ostringstream os;
        os << "BS decay rates (" << gp << ", " << gm << ") at eta = " << eta << " are not positive";
        throw OutOfValidity(os.str());
    }
    return {gp, gm};
}

double bs_peak_area_ratio(double eta, bool corrected) {
    require(eta >= 0.0, "BS: eta must be >= 0");
    const double r = corrected ? 1.0 + 5.0 * eta : 1.0 - 3.0 * eta;
    if (!(r > 0.0)) throw OutOfValidity("BS peak-area ratio is not positive at eta = " + std::to_string(eta));
    return r;
}

SpectrumResult bs_spectrum(const BsParams& params, const std::vector<double>& detuning_g, BsForm form) {
    params.validate();
    const double g = params.g();
    require(g > 0.0, "BS spectrum needs eta > 0");
    const auto [gp, gm] = bs_decay_rates(params.eta, params.kappa, params.corrected);
    SpectrumResult out;
    out.detuning = detuning_g;
    out.values.reserve(detuning_g.size());
    if (form == BsForm::simplified) {
        for (double d : detuning_g) {
            const double w = d * g;  // omega - omega0
            out.values.push_back(gp * gp / ((w - g) * (w - g) + 0.25 * gp * gp) +
                                 gm * gm / ((w + g) * (w + g) + 0.25 * gm * gm));
        }
        return out;
    }
    const double gc = params.kappa / 4.0;
    const cplx big_g = std::sqrt(cplx(g * g - gc * gc, -g * (gp - gm) / 2.0));
    const double sp = std::sqrt(gp), sm = std::sqrt(gm);
    const double e = params.E_weak > 0.0 ? params.E_weak : 1.0;
    for (double d : detuning_g) {
        const double w = d * g;  // omega - omega0
        const cplx den = (I * (big_g - w) + gc) * (I * (-big_g - w) + gc);
        const cplx chi_p = e * (-gc * sm + sp * (I * (-g - w) + gm / 2.0)) / den;
        const cplx chi_m = -e * (-gc * sp + sm * (I * (g - w) + gp / 2.0)) / den;
        out.values.push_back((sp * chi_p - sm * chi_m).real());
    }
    return out;
}

}  // namespace uscqed
