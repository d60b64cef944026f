#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "uscqed/dressing.hpp"
#include "uscqed/models.hpp"

namespace uscqed {

enum class BathKind { flat, ohmic };

/// Cavity bath: Gamma(omega) = kappa (flat) or kappa * omega / omega_c (ohmic).
struct BathModel {
    BathKind kind = BathKind::flat;
    double kappa = 0.0;
    double omega_c = 1.0;

    double rate(double omega) const;
    void validate() const;
};

/// One term c * L rho R^dagger of a superoperator.
struct Sandwich {
    Matrix left;
    Matrix right;
    double coeff;
};

/// rho -> sum_i c_i L_i rho R_i^dagger - K rho - rho K^dagger.
///
/// Every Lindblad-type generator used here fits this shape; the Hamiltonian
/// part is added by MasterEquation.
class Superoperator {
public:
    explicit Superoperator(int dim);

    int dim() const noexcept { return dim_; }
    const std::vector<Sandwich>& terms() const noexcept { return terms_; }
    const Matrix& k() const noexcept { return k_; }

    void add_sandwich(Matrix left, Matrix right, double coeff);
    void add_k(const Matrix& k);

    Matrix apply(const Matrix& rho) const;
    /// Dense d^2 x d^2 matrix acting on column-major vec(rho).
    Matrix matrix() const;

    Superoperator& operator+=(const Superoperator& other);

private:
    int dim_;
    std::vector<Sandwich> terms_;
    Matrix k_;
};

/// (rate/2) D[L] with D[O]rho = 2 O rho O^dag - rho O^dag O - O^dag O rho.
Superoperator lindblad_dissipator(const JumpOperator& L, double rate);
Superoperator lindblad_dissipator(const Matrix& L, double rate);

/// Frequency-resolved dissipator with rates Gamma(omega) (all cross terms kept).
Superoperator generalized_dissipator(const std::vector<FrequencyComponent>& jumps, const BathModel& bath);

/// (P_inc/2) D[x^-].
Superoperator incoherent_pump(const JumpOperator& xminus, double P_inc);

/// Coherent laser drive in the dressed basis.
struct DriveTerm {
    Matrix xplus;
    double Omega_d = 0.0;
    double omega_L = 1.0;
    bool rwa = true;

    /// RWA: (Omega_d/2)(x^- e^{-i w t} + x^+ e^{i w t}); full: Omega_d cos(w t)(x^- + x^+).
    Matrix at(double t) const;
};

/// H_drive(t) for a coherent pump (pump.kind must be coherent).
Matrix coherent_drive(const JumpOperator& xplus, const PumpSpec& pump, double omega_c, double t);

/// d rho/dt = -i[H(t), rho] + D rho, with H(t) = diag(E) + H_drive(t).
class MasterEquation {
public:
    MasterEquation(RealVector energies, Superoperator dissipator, std::optional<DriveTerm> drive = std::nullopt);

    int dim() const noexcept { return static_cast<int>(energies_.size()); }
    const RealVector& energies() const noexcept { return energies_; }
    const Superoperator& dissipator() const noexcept { return dissipator_; }
    const std::optional<DriveTerm>& drive() const noexcept { return drive_; }
    bool time_dependent() const noexcept { return drive_.has_value() && drive_->Omega_d != 0.0; }
    /// Largest transition frequency among the retained levels.
    double max_frequency() const;

    Matrix apply(double t, const Matrix& rho) const;
    void apply_into(double t, const Matrix& rho, Matrix& out, Matrix& scratch) const;
    /// Applies the generator at time t to every matrix of a batch.
    void apply_batch(double t, const std::vector<Matrix>& in, std::vector<Matrix>& out) const;

    /// Dense generator at time t (d^2 x d^2, column-major vec).
    Matrix liouvillian(double t = 0.0) const;

private:
    Matrix effective_hamiltonian(double t) const;  // diag(E) + H_drive(t) - iK

    RealVector energies_;
    Superoperator dissipator_;
    std::optional<DriveTerm> drive_;
};

/// One classical RK4 step of size h from time t, in place.
void rk4_step(const MasterEquation& eq, double t, double h, Matrix& rho);
void rk4_step_batch(const MasterEquation& eq, double t, double h, std::vector<Matrix>& rhos);

struct Trajectory {
    std::vector<double> times;
    std::vector<Matrix> states;
};

struct EvolutionSpec {
    std::shared_ptr<const MasterEquation> equation;
    double t0 = 0.0;
    double t_end = 0.0;
    double dt = 0.0;
    int store_every = 1;  // store one state per this many steps
    bool check_invariants = true;

    /// Throws InvalidArgument if t_end <= t0, dt <= 0, or dt does not resolve
    /// the fastest transition (dt > (2 pi / omega_max) / 20).
    void validate() const;
};

/// Density-matrix tolerances checked at every stored point.
inline constexpr double kTraceTolerance = 1e-8;
inline constexpr double kHermiticityTolerance = 1e-9;
inline constexpr double kPositivityTolerance = 1e-8;

/// Reports the first violated invariant (trace, hermiticity, positivity).
void check_density_matrix(const Matrix& rho, long step, double time);

/// Fixed-step RK4 integration; throws InvariantViolation on a bad stored state.
Trajectory evolve(const EvolutionSpec& spec, const Matrix& rho0);

/// Null vector of a time-independent generator with unit trace.
Matrix steady_state(const MasterEquation& eq);
/// Same, from a dense generator acting on column-major vec(rho).
Matrix steady_state(const Matrix& liouvillian, int dim);

/// Earliest stored time t1 such that ||rho(t + period) - rho(t)||_max < tol for
/// all stored t in [t1, t1 + period]. With `reference`, the criterion is
/// instead the trace distance to it (undriven case). Throws
/// PseudoSteadyStateNotReached.
double detect_pseudo_steady_state(const Trajectory& traj, double period, double tol = 1e-6,
                                  const std::optional<Matrix>& reference = std::nullopt);

/// Trace distance (1/2)||a - b||_1 for Hermitian a - b.
double trace_distance(const Matrix& a, const Matrix& b);

/// Sampled propagators of a master equation on the grid t_k = k h_s,
/// h_s = T / samples, T = 2 pi / omega_L. Every sample interval is covered by
/// m = ceil(omega_max / omega_L) RK4 steps, so dt = h_s / m.
///
/// For autonomous generators the RK4 step map is formed from the dense
/// generator and raised to powers; for periodic ones the basis matrices are
/// stepped through one period and every S_k is stored.
class PeriodPropagator {
public:
    PeriodPropagator(std::shared_ptr<const MasterEquation> eq, double omega_L, int samples = 20);

    const MasterEquation& equation() const noexcept { return *eq_; }
    int samples() const noexcept { return samples_; }
    int substeps() const noexcept { return substeps_; }
    double period_length() const noexcept { return period_length_; }
    double sample_step() const noexcept { return period_length_ / samples_; }
    double dt() const noexcept { return sample_step() / substeps_; }
    bool periodic() const noexcept { return eq_->time_dependent(); }

    /// S_k v, S_k = propagator from 0 to t_k (k = 0..samples).
    Vector phase_apply(int k, const Vector& v) const;
    /// S_k^T v (used to pull observables back: Tr[O S_k x] = (S_k^T vec(O^T)) . vec(x)).
    Vector phase_apply_transpose(int k, const Vector& v) const;
    /// P = S_samples.
    const Matrix& period_map() const noexcept { return period_; }

    /// rho_k for k = 0..samples-1, with P rho_0 = rho_0 and unit trace.
    std::vector<Matrix> periodic_states() const;

    /// RK4 propagation of x from sample k0 to sample k1 >= k0 (k1 may exceed
    /// samples; the generator is periodic).
    Matrix propagate(const Matrix& x, int k0, int k1) const;

private:
    std::shared_ptr<const MasterEquation> eq_;
    int samples_;
    int substeps_;
    double period_length_;
    Matrix sample_map_;         // autonomous: one sample interval
    std::vector<Matrix> maps_;  // periodic: maps_[k-1] = S_k
    Matrix period_;
};

/// Column-major vec and its inverse.
Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, int dim);

}  // namespace uscqed
