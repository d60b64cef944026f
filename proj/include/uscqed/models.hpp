#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uscqed/hilbert.hpp"

namespace uscqed {

enum class PumpKind { none, incoherent, coherent };

/// Excitation settings. Rates and frequencies are in omega0 units here;
/// ModelParams::from_g_units converts caption-style values.
struct PumpSpec {
    PumpKind kind = PumpKind::none;
    double P_inc = 0.0;
    double Omega_d = 0.0;
    std::optional<double> omega_L;  // unset -> omega_c
    bool rwa_drive = true;

    static PumpSpec none() { return {}; }
    static PumpSpec incoherent(double P_inc) { return {PumpKind::incoherent, P_inc, 0.0, std::nullopt, true}; }
    static PumpSpec coherent(double Omega_d, bool rwa = true, std::optional<double> omega_L = std::nullopt) {
        return {PumpKind::coherent, 0.0, Omega_d, omega_L, rwa};
    }
};

struct ModelParams {
    double omega0 = 1.0;
    double omega_c = 1.0;
    double eta = 0.0;
    double kappa = 0.0;
    double gamma = 0.0;
    PumpSpec pump;

    double g() const noexcept { return eta * omega0; }
    double g_coulomb() const noexcept { return g() * omega0 / omega_c; }
    /// Exponent scale of the projected gauge unitary, g / omega_c.
    double eta_c() const noexcept { return g() / omega_c; }
    double laser_frequency() const noexcept { return pump.omega_L.value_or(omega_c); }

    /// Throws InvalidArgument on any violated constraint.
    void validate() const;
    /// Advisory messages (currently: strong coherent drive).
    std::vector<std::string> warnings() const;

    /// kappa, gamma, P_inc and Omega_d given in units of g = eta * omega0;
    /// omega_L (if set) in omega0 units.
    static ModelParams from_g_units(double eta, double kappa_g, double gamma_g = 0.0, PumpSpec pump_g = {},
                                    double omega0 = 1.0, double omega_c = 1.0);
};

enum class Gauge { dipole, coulomb, coulomb_naive, jc };

struct GaugeChoice {
    Gauge gauge = Gauge::dipole;
    bool corrected = true;

    void validate() const;
    /// Short label: DG, DGC, CG, CGC, CGN, JC.
    std::string label() const;
};

std::string to_string(Gauge g);
Gauge gauge_from_string(const std::string& name);

/// omega_c a^dag a + (omega0/2) sigma_z + i g (a^dag - a) sigma_x
OperatorMatrix build_dipole_qrm(const ModelParams& params, const SpaceDescriptor& space);
/// omega_c a^dag a + (omega0/2) [sigma_z cos(2 eta_c X) + sigma_y sin(2 eta_c X)], X = a + a^dag
OperatorMatrix build_coulomb_qrm(const ModelParams& params, const SpaceDescriptor& space);
/// omega_c a^dag a + (omega0/2) sigma_z + g_C (a + a^dag) sigma_y
OperatorMatrix build_coulomb_naive(const ModelParams& params, const SpaceDescriptor& space);
/// omega_c a^dag a + (omega0/2) sigma_z + i g (a^dag sigma^- - a sigma^+)
OperatorMatrix build_jc(const ModelParams& params, const SpaceDescriptor& space);
/// Uncoupled omega_c a^dag a + (omega0/2) sigma_z.
OperatorMatrix build_bare(const ModelParams& params, const SpaceDescriptor& space);

/// U = exp(-i eta_c (a + a^dag) sigma_x), so that U^dag H_D U = H_C up to a
/// constant shift of -eta_c^2 omega_c.
OperatorMatrix gauge_unitary(const ModelParams& params, const SpaceDescriptor& space);

/// Pi_C = i(a^dag - a) or Pi_D = Pi_C + 2 eta_c sigma_x (dipole, corrected).
OperatorMatrix quadrature_pi(const GaugeChoice& gauge, const ModelParams& params, const SpaceDescriptor& space);

/// Hamiltonian paired with a gauge choice. Coulomb without correction (and
/// coulomb_naive) uses build_coulomb_naive.
OperatorMatrix system_hamiltonian(const GaugeChoice& gauge, const ModelParams& params, const SpaceDescriptor& space);

}  // namespace uscqed
