#include "uscqed/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include <Eigen/LU>

namespace uscqed {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw InvalidArgument(msg);
}

void check_square(const Matrix& m, int dim, const char* what) {
    if (m.rows() != dim || m.cols() != dim) {
        throw DimensionMismatch(std::string(what) + ": expected " + std::to_string(dim) + "x" + std::to_string(dim));
    }
}

// out += c * (A (x) B), the Kronecker product acting on column-major vec.
void add_kron(Matrix& out, const Matrix& a, const Matrix& b, cplx c) {
    const Eigen::Index n = b.rows();
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            const cplx s = c * a(i, j);
            if (s == cplx(0.0)) continue;
            out.block(i * n, j * n, n, n) += s * b;
        }
    }
}

// out += c * (1 (x) B)
void add_kron_identity_left(Matrix& out, const Matrix& b, cplx c) {
    const Eigen::Index n = b.rows();
    for (Eigen::Index i = 0; i < n; ++i) out.block(i * n, i * n, n, n) += c * b;
}

// Unit-trace solution of M v = 0, with the first row replaced by the trace.
Matrix unit_trace_null_vector(Matrix m, int dim, const char* what) {
    const Eigen::Index n = m.rows();
    m.row(0).setZero();
    for (int a = 0; a < dim; ++a) m(0, a + a * dim) = 1.0;
    Vector rhs = Vector::Zero(n);
    rhs(0) = 1.0;
    Eigen::FullPivLU<Matrix> lu(m);
    lu.setThreshold(1e-13);
    if (lu.rank() < n) {
        std::ostringstream os;
        os << what << ": stationary state is not unique (rank " << lu.rank() << " of " << n << ")";
        throw DegenerateSteadyState(os.str());
    }
    Matrix rho = unvec(lu.solve(rhs), dim);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();
    return rho;
}

Matrix matrix_power(const Matrix& base, int p) {
    Matrix result = Matrix::Identity(base.rows(), base.cols());
    Matrix b = base;
    bool first = true;
    while (p > 0) {
        if (p & 1) {
            if (first) {
                result = b;
                first = false;
            } else {
                result = (result * b).eval();
            }
        }
        p >>= 1;
        if (p > 0) b = (b * b).eval();
    }
    return result;
}

}  // namespace

Vector vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Matrix unvec(const Vector& v, int dim) {
    if (v.size() != static_cast<Eigen::Index>(dim) * dim) throw DimensionMismatch("unvec: size mismatch");
    return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

// ---------------------------------------------------------------------------

double BathModel::rate(double omega) const {
    switch (kind) {
        case BathKind::flat: return kappa;
        case BathKind::ohmic: return kappa * omega / omega_c;
    }
    return kappa;
}

void BathModel::validate() const {
    require(std::isfinite(kappa) && kappa >= 0.0, "bath kappa must be >= 0");
    require(std::isfinite(omega_c) && omega_c > 0.0, "bath omega_c must be > 0");
}

Superoperator::Superoperator(int dim) : dim_(dim), k_(Matrix::Zero(dim, dim)) {
    require(dim >= 1, "Superoperator: dimension must be positive");
}

void Superoperator::add_sandwich(Matrix left, Matrix right, double coeff) {
    check_square(left, dim_, "add_sandwich");
    check_square(right, dim_, "add_sandwich");
    if (coeff == 0.0) return;
    terms_.push_back({std::move(left), std::move(right), coeff});
}

void Superoperator::add_k(const Matrix& k) {
    check_square(k, dim_, "add_k");
    k_ += k;
}

Matrix Superoperator::apply(const Matrix& rho) const {
    check_square(rho, dim_, "Superoperator::apply");
    Matrix out = -(k_ * rho) - rho * k_.adjoint();
    for (const auto& t : terms_) out.noalias() += t.coeff * (t.left * rho) * t.right.adjoint();
    return out;
}

Matrix Superoperator::matrix() const {
    const int d = dim_;
    Matrix out = Matrix::Zero(d * d, d * d);
    add_kron_identity_left(out, k_, -1.0);
    add_kron(out, k_.conjugate(), Matrix::Identity(d, d), -1.0);
    for (const auto& t : terms_) add_kron(out, t.right.conjugate(), t.left, t.coeff);
    return out;
}

Superoperator& Superoperator::operator+=(const Superoperator& other) {
    if (other.dim_ != dim_) throw DimensionMismatch("Superoperator +=: dimensions differ");
    for (const auto& t : other.terms_) terms_.push_back(t);
    k_ += other.k_;
    return *this;
}

Superoperator lindblad_dissipator(const Matrix& L, double rate) {
    require(L.rows() == L.cols(), "lindblad_dissipator: jump operator must be square");
    require(std::isfinite(rate) && rate >= 0.0, "lindblad_dissipator: rate must be >= 0");
    Superoperator s(static_cast<int>(L.rows()));
    if (rate == 0.0) return s;
    s.add_sandwich(L, L, rate);
    s.add_k(0.5 * rate * L.adjoint() * L);
    return s;
}

Superoperator lindblad_dissipator(const JumpOperator& L, double rate) { return lindblad_dissipator(L.matrix, rate); }

Superoperator generalized_dissipator(const std::vector<FrequencyComponent>& jumps, const BathModel& bath) {
    bath.validate();
    require(!jumps.empty(), "generalized_dissipator: no jump components");
    const Eigen::Index d = jumps.front().xplus.rows();
    Matrix x = Matrix::Zero(d, d);
    Matrix x_gamma = Matrix::Zero(d, d);
    for (const auto& c : jumps) {
        check_square(c.xplus, static_cast<int>(d), "generalized_dissipator");
        const double g = bath.rate(c.omega);
        if (!(g >= 0.0)) throw InvalidArgument("generalized_dissipator: negative rate at omega = " + std::to_string(c.omega));
        x += c.xplus;
        x_gamma += g * c.xplus;
    }
    // (1/2) sum_{w,w'} G(w)[X(w) rho X(w')^dag - X(w')^dag X(w) rho]
    //                + G(w')[X(w) rho X(w')^dag - rho X(w')^dag X(w)]
    Superoperator s(static_cast<int>(d));
    s.add_sandwich(x_gamma, x, 0.5);
    s.add_sandwich(x, x_gamma, 0.5);
    s.add_k(0.5 * x.adjoint() * x_gamma);
    return s;
}

Superoperator incoherent_pump(const JumpOperator& xminus, double P_inc) {
    require(std::isfinite(P_inc) && P_inc >= 0.0, "incoherent_pump: P_inc must be >= 0");
    return lindblad_dissipator(xminus.matrix, P_inc);
}

Matrix DriveTerm::at(double t) const {
    const Matrix xm = xplus.adjoint();
    if (rwa) {
        const cplx e = std::exp(cplx(0.0, -omega_L * t));
        return 0.5 * Omega_d * (e * xm + std::conj(e) * xplus);
    }
    return Omega_d * std::cos(omega_L * t) * (xm + xplus);
}

Matrix coherent_drive(const JumpOperator& xplus, const PumpSpec& pump, double omega_c, double t) {
    require(pump.kind == PumpKind::coherent, "coherent_drive: pump is not coherent");
    const Matrix& xp = xplus.direction == JumpDirection::lowering ? xplus.matrix : Matrix(xplus.matrix.adjoint());
    DriveTerm d{xp, pump.Omega_d, pump.omega_L.value_or(omega_c), pump.rwa_drive};
    return d.at(t);
}

// ---------------------------------------------------------------------------

MasterEquation::MasterEquation(RealVector energies, Superoperator dissipator, std::optional<DriveTerm> drive)
    : energies_(std::move(energies)), dissipator_(std::move(dissipator)), drive_(std::move(drive)) {
    if (dissipator_.dim() != dim()) throw DimensionMismatch("MasterEquation: dissipator dimension differs");
    if (drive_) {
        check_square(drive_->xplus, dim(), "MasterEquation drive");
        require(drive_->omega_L > 0.0, "MasterEquation: drive frequency must be > 0");
    }
}

double MasterEquation::max_frequency() const { return energies_.maxCoeff() - energies_.minCoeff(); }

Matrix MasterEquation::effective_hamiltonian(double t) const {
    Matrix a = -I * dissipator_.k();
    a.diagonal() += energies_.cast<cplx>();
    if (time_dependent()) a += drive_->at(t);
    return a;
}

void MasterEquation::apply_into(double t, const Matrix& rho, Matrix& out, Matrix& scratch) const {
    const Matrix a = effective_hamiltonian(t);
    out.noalias() = a * rho;
    out.noalias() -= rho * a.adjoint();
    out *= -I;
    for (const auto& term : dissipator_.terms()) {
        scratch.noalias() = term.left * rho;
        out.noalias() += term.coeff * scratch * term.right.adjoint();
    }
}

Matrix MasterEquation::apply(double t, const Matrix& rho) const {
    check_square(rho, dim(), "MasterEquation::apply");
    Matrix out(dim(), dim()), scratch(dim(), dim());
    apply_into(t, rho, out, scratch);
    return out;
}

void MasterEquation::apply_batch(double t, const std::vector<Matrix>& in, std::vector<Matrix>& out) const {
    const Matrix a = effective_hamiltonian(t);
    const Matrix a_adj = a.adjoint();
    std::vector<Matrix> right_adj;
    right_adj.reserve(dissipator_.terms().size());
    for (const auto& term : dissipator_.terms()) right_adj.push_back(term.coeff * term.right.adjoint());
    Matrix scratch(dim(), dim());
    out.resize(in.size());
    for (size_t i = 0; i < in.size(); ++i) {
        const Matrix& rho = in[i];
        Matrix& o = out[i];
        o.resize(dim(), dim());
        o.noalias() = a * rho;
        o.noalias() -= rho * a_adj;
        o *= -I;
        for (size_t j = 0; j < right_adj.size(); ++j) {
            scratch.noalias() = dissipator_.terms()[j].left * rho;
            o.noalias() += scratch * right_adj[j];
        }
    }
}

Matrix MasterEquation::liouvillian(double t) const {
    const int d = dim();
    const Matrix a = effective_hamiltonian(t);
    Matrix out = Matrix::Zero(d * d, d * d);
    add_kron_identity_left(out, a, -I);
    add_kron(out, a.conjugate(), Matrix::Identity(d, d), I);
    for (const auto& term : dissipator_.terms()) add_kron(out, term.right.conjugate(), term.left, term.coeff);
    return out;
}

void rk4_step(const MasterEquation& eq, double t, double h, Matrix& rho) {
    const int d = eq.dim();
    Matrix k(d, d), acc(d, d), stage(d, d), scratch(d, d);
    eq.apply_into(t, rho, k, scratch);
    acc = k;
    stage = rho + (0.5 * h) * k;
    eq.apply_into(t + 0.5 * h, stage, k, scratch);
    acc += 2.0 * k;
    stage = rho + (0.5 * h) * k;
    eq.apply_into(t + 0.5 * h, stage, k, scratch);
    acc += 2.0 * k;
    stage = rho + h * k;
    eq.apply_into(t + h, stage, k, scratch);
    acc += k;
    rho += (h / 6.0) * acc;
}

void rk4_step_batch(const MasterEquation& eq, double t, double h, std::vector<Matrix>& rhos) {
    const size_t n = rhos.size();
    std::vector<Matrix> k, acc(n), stage(n);
    eq.apply_batch(t, rhos, k);
    for (size_t i = 0; i < n; ++i) {
        acc[i] = k[i];
        stage[i] = rhos[i] + (0.5 * h) * k[i];
    }
    eq.apply_batch(t + 0.5 * h, stage, k);
    for (size_t i = 0; i < n; ++i) {
        acc[i] += 2.0 * k[i];
        stage[i] = rhos[i] + (0.5 * h) * k[i];
    }
    eq.apply_batch(t + 0.5 * h, stage, k);
    for (size_t i = 0; i < n; ++i) {
        acc[i] += 2.0 * k[i];
        stage[i] = rhos[i] + h * k[i];
    }
    eq.apply_batch(t + h, stage, k);
    for (size_t i = 0; i < n; ++i) {
        acc[i] += k[i];
        rhos[i] += (h / 6.0) * acc[i];
    }
}

// ---------------------------------------------------------------------------

void EvolutionSpec::validate() const {
    require(equation != nullptr, "EvolutionSpec: no master equation");
    require(std::isfinite(t0) && std::isfinite(t_end) && t_end > t0, "EvolutionSpec: need t_end > t0");
    require(std::isfinite(dt) && dt > 0.0, "EvolutionSpec: dt must be > 0");
    require(store_every >= 1, "EvolutionSpec: store_every must be >= 1");
    const double w = equation->max_frequency();
    if (w > 0.0) {
        const double bound = (2.0 * std::numbers::pi / w) / 20.0;
        if (dt > bound * (1.0 + 1e-12)) {
            std::ostringstream os;
            os << "EvolutionSpec: dt = " << dt << " exceeds (2 pi / omega_max) / 20 = " << bound;
            throw InvalidArgument(os.str());
        }
    }
}

void check_density_matrix(const Matrix& rho, long step, double time) {
    const double tr = std::abs(rho.trace() - cplx(1.0));
    if (!(tr < kTraceTolerance)) throw InvariantViolation(step, time, "trace", tr);
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (!(herm < kHermiticityTolerance)) throw InvariantViolation(step, time, "hermiticity", herm);
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    if (!(lo > -kPositivityTolerance)) throw InvariantViolation(step, time, "positivity", lo);
}

Trajectory evolve(const EvolutionSpec& spec, const Matrix& rho0) {
    spec.validate();
    const MasterEquation& eq = *spec.equation;
    check_square(rho0, eq.dim(), "evolve");
    if (spec.check_invariants) check_density_matrix(rho0, 0, spec.t0);

    const double span = spec.t_end - spec.t0;
    const long n_steps = static_cast<long>(std::ceil(span / spec.dt - 1e-9));
    Trajectory traj;
    traj.times.push_back(spec.t0);
    traj.states.push_back(rho0);
    Matrix rho = rho0;
    for (long s = 1; s <= n_steps; ++s) {
        const double t = spec.t0 + static_cast<double>(s - 1) * spec.dt;
        const double h = (s == n_steps) ? spec.t_end - t : spec.dt;
        rk4_step(eq, t, h, rho);
        if (s % spec.store_every == 0 || s == n_steps) {
            const double ts = (s == n_steps) ? spec.t_end : spec.t0 + static_cast<double>(s) * spec.dt;
            if (spec.check_invariants) check_density_matrix(rho, s, ts);
            traj.times.push_back(ts);
            traj.states.push_back(rho);
        }
    }
    return traj;
}

Matrix steady_state(const Matrix& liouvillian, int dim) {
    if (liouvillian.rows() != static_cast<Eigen::Index>(dim) * dim || liouvillian.cols() != liouvillian.rows()) {
        throw DimensionMismatch("steady_state: generator is not d^2 x d^2");
    }
    return unit_trace_null_vector(liouvillian, dim, "steady_state");
}

Matrix steady_state(const MasterEquation& eq) {
    if (eq.time_dependent()) throw InvalidArgument("steady_state: generator is time dependent");
    return steady_state(eq.liouvillian(), eq.dim());
}

double trace_distance(const Matrix& a, const Matrix& b) {
    const Matrix d = a - b;
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double detect_pseudo_steady_state(const Trajectory& traj, double period, double tol,
                                  const std::optional<Matrix>& reference) {
    const size_t n = traj.times.size();
    require(n >= 2 && traj.states.size() == n, "detect_pseudo_steady_state: trajectory too short");
    if (reference) {
        for (size_t i = 0; i < n; ++i) {
            if (trace_distance(traj.states[i], *reference) < tol) return traj.times[i];
        }
        throw PseudoSteadyStateNotReached("stationary state not reached by t = " + std::to_string(traj.times.back()) +
                                          "; increase t_end");
    }
    require(period > 0.0, "detect_pseudo_steady_state: period must be > 0");
    const double h = traj.times[1] - traj.times[0];
    const long p = std::lround(period / h);
    require(p >= 1 && std::abs(static_cast<double>(p) * h - period) < 1e-9 * period,
            "detect_pseudo_steady_state: period is not a multiple of the sampling interval");
    require(static_cast<long>(n) >= 2 * p + 1, "detect_pseudo_steady_state: trajectory shorter than two periods");

    // ok[j]: ||rho(t_j + T) - rho(t_j)||_max < tol
    std::vector<char> ok(n - p);
    for (size_t j = 0; j + p < n; ++j) {
        ok[j] = (traj.states[j + p] - traj.states[j]).cwiseAbs().maxCoeff() < tol;
    }
    long run = 0;
    for (size_t j = 0; j < ok.size(); ++j) {
        run = ok[j] ? run + 1 : 0;
        if (run == p + 1) return traj.times[j - p];
    }
    throw PseudoSteadyStateNotReached("pseudo-steady state not reached by t = " + std::to_string(traj.times.back()) +
                                      "; increase t_end");
}

// ---------------------------------------------------------------------------

PeriodPropagator::PeriodPropagator(std::shared_ptr<const MasterEquation> eq, double omega_L, int samples)
    : eq_(std::move(eq)), samples_(samples) {
    require(eq_ != nullptr, "PeriodPropagator: no master equation");
    require(std::isfinite(omega_L) && omega_L > 0.0, "PeriodPropagator: omega_L must be > 0");
    require(samples >= 1, "PeriodPropagator: samples must be >= 1");
    if (eq_->time_dependent()) {
        require(std::abs(eq_->drive()->omega_L - omega_L) < 1e-12 * omega_L,
                "PeriodPropagator: sampling frequency differs from the drive frequency");
    }
    period_length_ = 2.0 * std::numbers::pi / omega_L;
    substeps_ = std::max(1, static_cast<int>(std::ceil(eq_->max_frequency() / omega_L - 1e-12)));

    const int d = eq_->dim();
    const double h = dt();
    if (!periodic()) {
        const Matrix m = h * eq_->liouvillian();
        const Matrix id = Matrix::Identity(m.rows(), m.cols());
        Matrix r = id + 0.25 * m;
        r = id + (1.0 / 3.0) * (m * r);
        r = id + 0.5 * (m * r);
        r = id + m * r;
        sample_map_ = matrix_power(r, substeps_);
        period_ = matrix_power(sample_map_, samples_);
        return;
    }

    std::vector<Matrix> basis;
    std::vector<std::pair<int, int>> index;
    for (int b = 0; b < d; ++b) {
        for (int a = 0; a <= b; ++a) {
            Matrix e = Matrix::Zero(d, d);
            e(a, b) = 1.0;
            basis.push_back(std::move(e));
            index.emplace_back(a, b);
        }
    }
    maps_.reserve(samples_);
    for (int k = 1; k <= samples_; ++k) {
        for (int s = 0; s < substeps_; ++s) {
            const double t = static_cast<double>((k - 1) * substeps_ + s) * h;
            rk4_step_batch(*eq_, t, h, basis);
        }
        Matrix map(d * d, d * d);
        for (size_t p = 0; p < basis.size(); ++p) {
            const auto [a, b] = index[p];
            map.col(a + b * d) = vec(basis[p]);
            if (a != b) map.col(b + a * d) = vec(basis[p].adjoint());
        }
        maps_.push_back(std::move(map));
    }
    period_ = maps_.back();
}

Vector PeriodPropagator::phase_apply(int k, const Vector& v) const {
    require(k >= 0 && k <= samples_, "phase_apply: phase index out of range");
    if (k == 0) return v;
    if (periodic()) return maps_[k - 1] * v;
    Vector out = v;
    for (int i = 0; i < k; ++i) out = (sample_map_ * out).eval();
    return out;
}

Vector PeriodPropagator::phase_apply_transpose(int k, const Vector& v) const {
    require(k >= 0 && k <= samples_, "phase_apply_transpose: phase index out of range");
    if (k == 0) return v;
    if (periodic()) return maps_[k - 1].transpose() * v;
    Vector out = v;
    for (int i = 0; i < k; ++i) out = (sample_map_.transpose() * out).eval();
    return out;
}

std::vector<Matrix> PeriodPropagator::periodic_states() const {
    const int d = eq_->dim();
    if (!periodic()) {
        const Matrix rho = steady_state(*eq_);
        return std::vector<Matrix>(samples_, rho);
    }
    Matrix m = period_ - Matrix::Identity(period_.rows(), period_.cols());
    std::vector<Matrix> out;
    out.reserve(samples_);
    out.push_back(unit_trace_null_vector(std::move(m), d, "periodic_states"));
    const Vector v0 = vec(out.front());
    for (int k = 1; k < samples_; ++k) {
        Matrix rho = unvec(maps_[k - 1] * v0, d);
        out.push_back(0.5 * (rho + rho.adjoint()));
    }
    return out;
}

Matrix PeriodPropagator::propagate(const Matrix& x, int k0, int k1) const {
    require(k0 >= 0 && k1 >= k0, "propagate: need 0 <= k0 <= k1");
    Matrix out = x;
    const double h = dt();
    for (long k = k0; k < k1; ++k) {
        const long phase = k % samples_;
        for (int s = 0; s < substeps_; ++s) {
            const double t = static_cast<double>(phase * substeps_ + s) * h;
            rk4_step(*eq_, t, h, out);
        }
    }
    return out;
}

}  // namespace uscqed
