#pragma once

#include <string>
#include <utility>
#include <vector>

#include "uscqed/correlations.hpp"
#include "uscqed/hilbert.hpp"
#include "uscqed/models.hpp"

namespace uscqed {

/// Inputs of the weak-excitation Bloch-Siegert model. Rates in omega0 units.
struct BsParams {
    double eta = 0.0;
    double kappa = 0.0;
    double omega0 = 1.0;
    bool corrected = true;
    double E_weak = 0.0;  // P_inc / kappa

    double g() const noexcept { return eta * omega0; }
    void validate() const;
    std::vector<std::string> warnings() const;
};

/// omega0 (1 + eta^2/2) sigma+ sigma- + omega0 (1 - eta^2/2) a^dag a + i g (a^dag sigma- - a sigma+)
OperatorMatrix bs_hamiltonian(const ModelParams& params, const SpaceDescriptor& space);

/// First-order polaritons in the {|e,0>, |g,1>} basis.
struct BsPolaritons {
    cplx plus_e0, plus_g1;
    cplx minus_e0, minus_g1;
};
BsPolaritons bs_polariton_states(double eta);

/// (|P_{+G}|^2, |P_{-G}|^2) to first order in eta.
std::pair<double, double> bs_matrix_elements(double eta, bool corrected);

/// (Gamma_+, Gamma_-) = 2 kappa (|P_{+G}|^2, |P_{-G}|^2); throws OutOfValidity
/// when a rate is not positive.
std::pair<double, double> bs_decay_rates(double eta, double kappa, bool corrected);

/// A_+/A_- = 1 + 5 eta (corrected) or 1 - 3 eta (uncorrected).
double bs_peak_area_ratio(double eta, bool corrected);

enum class BsForm { simplified, exact };

/// Weak-excitation spectrum on detuning_g = (omega - omega0)/g.
/// simplified: sum of Gamma^2 / ((omega - omega0 -+ g)^2 + Gamma^2/4);
/// exact: the chi-form with complex G. Neither is normalized.
SpectrumResult bs_spectrum(const BsParams& params, const std::vector<double>& detuning_g,
                           BsForm form = BsForm::simplified);

}  // namespace uscqed
