#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "uscqed/dressing.hpp"
#include "uscqed/dynamics.hpp"
#include "uscqed/models.hpp"

namespace uscqed {

/// Everything the dynamics needs from one (gauge, parameters, truncation) choice.
struct DressedSystem {
    GaugeChoice gauge;
    ModelParams params;
    BathModel bath;
    int n_fock = 50;
    int n_keep = 24;

    DressedBasis basis;
    JumpOperator xplus;                         // from the gauge's quadrature
    std::vector<FrequencyComponent> components;  // X+(omega) of the same quadrature
    std::optional<JumpOperator> tls_jump;       // dressed sigma_x lowering part, when gamma > 0

    const Matrix& xp() const noexcept { return xplus.matrix; }
    Matrix xm() const { return xplus.matrix.adjoint(); }
};

DressedSystem build_dressed_system(const GaugeChoice& gauge, const ModelParams& params,
                                   BathKind bath = BathKind::flat, int n_fock = 50, int n_keep = 24);

/// Master equation of a dressed system: cavity dissipator (generalized for an
/// ohmic bath, Lindblad for a flat one), optional TLS decay, and the pump.
std::shared_ptr<const MasterEquation> master_equation(const DressedSystem& system);

/// N_cav = <x^- x^+>, clipped at 0 within 1e-10.
double n_cav(const Matrix& rho, const Matrix& xplus);

/// <x^- x^- x^+ x^+> / <x^- x^+>^2 for one state; NaN below kG2Floor.
double g2_zero_delay(const Matrix& rho, const Matrix& xplus);

/// Floor below which g2 denominators are treated as zero.
inline constexpr double kG2Floor = 1e-14;

enum class Normalization { raw, unit_max };
enum class CorrelationKind { g1, g2_t_tau, g2_averaged };

struct SpectrumResult {
    std::vector<double> detuning;  // (omega - omega_L) / g
    std::vector<double> values;
    Normalization normalization = Normalization::raw;
    /// |Im G(0)| / |G(0)| of the period-averaged first-order correlation.
    double imag_residue = 0.0;
    double tau_max = 0.0;  // in 1/omega0
};

struct CorrelationResult {
    std::vector<double> tau;  // in 1/g
    std::vector<cplx> values;
    CorrelationKind kind = CorrelationKind::g1;
    int undefined = 0;  // points below the denominator floor (stored as NaN)
    int clipped = 0;    // g2 points clipped from [-1e-8, 0) to 0
};


/// Solver settings shared by every correlation computed from one Simulation.
struct SimulationOptions {
    int samples = 20;                 // per drive period
    double t_end_g = 1000.0;          // transient budget, in 1/g
    double transient_tol = 1e-6;      // pseudo-steady criterion
    double decay_tol = 1e-6;          // |G(tau_max)| / |G(0)| target for spectra
    double tau_cap_kappa = 400.0;     // hard cap on tau_max, in 1/kappa
};

/// One scenario: dressed system, period propagator and its (pseudo-)steady
/// states. The sampling grid is t_k = k T / samples with T = 2 pi / omega_L;
/// without a laser, omega_L = omega_c sets the grid and the spectral origin.
class Simulation {
public:
    Simulation(DressedSystem system, SimulationOptions options = {});

    const DressedSystem& system() const noexcept { return system_; }
    const PeriodPropagator& propagator() const noexcept { return *prop_; }
    const SimulationOptions& options() const noexcept { return options_; }
    double omega_L() const noexcept { return omega_L_; }
    bool driven() const noexcept { return prop_->periodic(); }
    /// rho(t_k), k = 0..samples-1, of the (pseudo-)steady state.
    const std::vector<Matrix>& states() const noexcept { return states_; }

    /// Earliest sampled time (1/omega0) after which the evolution from the
    /// dressed ground state is within transient_tol of the asymptotic state.
    /// Throws PseudoSteadyStateNotReached past t_end_g.
    double settle_time() const;

    /// Period-averaged N_cav.
    double n_cav() const;

    /// <x_D^-(t_k) x_D^+(t_k + tau)> on tau = j h_s, j = 0..n_tau-1.
    CorrelationResult g1(int k, int n_tau) const;
    /// Same on a caller grid (1/g); every point must be a multiple of h_s.
    CorrelationResult g1(int k, const std::vector<double>& tau_g) const;

    /// Incoherent cavity spectrum on detuning_g = (omega - omega_L)/g.
    SpectrumResult spectrum(const std::vector<double>& detuning_g, Normalization norm = Normalization::raw) const;

    CorrelationResult g2_t_tau(int k, const std::vector<double>& tau_g) const;
    CorrelationResult g2_averaged(const std::vector<double>& tau_g) const;

    /// tau-steps (multiples of h_s) of a grid in 1/g; throws if misaligned.
    std::vector<long> tau_steps(const std::vector<double>& tau_g) const;

private:
    /// out[k][j] = Tr{O Phi(t_k + j h_s, t_k) sources[k]} for j < n_steps,
    /// for every k with a source; with `stop_tol`, n_steps grows period by
    /// period until the last period's block max drops below stop_tol |out(0)|.
    std::vector<std::vector<cplx>> regress(const std::vector<Matrix>& sources, const Matrix& observable, long n_steps,
                                           double stop_tol = 0.0) const;

    DressedSystem system_;
    SimulationOptions options_;
    std::shared_ptr<const MasterEquation> eq_;
    std::unique_ptr<PeriodPropagator> prop_;
    double omega_L_;
    std::vector<Matrix> states_;
};

/// Trapezoidal Re int_0^tau_max dtau e^{i omega tau} G(tau) for G sampled at step h.
double fourier_re(const std::vector<cplx>& g, double h, double omega);

}  // namespace uscqed
