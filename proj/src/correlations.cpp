#include "uscqed/correlations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

namespace uscqed {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw InvalidArgument(msg);
}

// Row vector r with r . vec(X) = Tr(O X).
Vector trace_row(const Matrix& observable) { return vec(observable.transpose()); }

Matrix ground_projector(int dim) {
    Matrix p = Matrix::Zero(dim, dim);
    p(0, 0) = 1.0;
    return p;
}

}  // namespace

DressedSystem build_dressed_system(const GaugeChoice& gauge, const ModelParams& params, BathKind bath, int n_fock,
                                   int n_keep) {
    gauge.validate();
    params.validate();
    require(n_keep >= 2 && n_keep <= 2 * n_fock, "n_keep must be in [2, 2 n_fock]");
    DressedSystem s;
    s.gauge = gauge;
    s.params = params;
    s.bath = BathModel{bath, params.kappa, params.omega_c};
    s.n_fock = n_fock;
    s.n_keep = n_keep;
    const SpaceDescriptor space = fock_space(n_fock);
    s.basis = diagonalize(system_hamiltonian(gauge, params, space), n_keep);
    const OperatorMatrix pi = quadrature_pi(gauge, params, space);
    s.xplus = jump_operator(s.basis, pi);
    s.components = frequency_resolved_jumps(s.basis, pi);
    if (params.gamma > 0.0) {
        const OperatorMatrix sx(space, pauli(space, Pauli::x).matrix(), true);
        s.tls_jump = jump_operator(s.basis, sx);
    }
    return s;
}

std::shared_ptr<const MasterEquation> master_equation(const DressedSystem& s) {
    const int d = s.n_keep;
    Superoperator diss(d);
    if (s.params.kappa > 0.0) {
        if (s.bath.kind == BathKind::flat) {
            diss += lindblad_dissipator(s.xplus, s.params.kappa);
        } else if (!s.components.empty()) {
            diss += generalized_dissipator(s.components, s.bath);
        }
    }
    if (s.tls_jump) diss += lindblad_dissipator(*s.tls_jump, s.params.gamma);
    std::optional<DriveTerm> drive;
    switch (s.params.pump.kind) {
        case PumpKind::none: break;
        case PumpKind::incoherent: diss += incoherent_pump(s.xplus.conjugate(), s.params.pump.P_inc); break;
        case PumpKind::coherent:
            drive = DriveTerm{s.xplus.matrix, s.params.pump.Omega_d, s.params.laser_frequency(), s.params.pump.rwa_drive};
            break;
    }
    return std::make_shared<MasterEquation>(s.basis.kept_energies(), std::move(diss), std::move(drive));
}

double n_cav(const Matrix& rho, const Matrix& xplus) {
    if (rho.rows() != xplus.rows() || rho.cols() != xplus.cols()) throw DimensionMismatch("n_cav: size mismatch");
    const double n = (xplus * rho * xplus.adjoint()).trace().real();
    return n < 0.0 && n > -1e-10 ? 0.0 : n;
}

double g2_zero_delay(const Matrix& rho, const Matrix& xplus) {
    const double n = n_cav(rho, xplus);
    if (!(n * n > kG2Floor)) return std::numeric_limits<double>::quiet_NaN();
    const Matrix xx = xplus * xplus;
    return (xx * rho * xx.adjoint()).trace().real() / (n * n);
}

double fourier_re(const std::vector<cplx>& g, double h, double omega) {
    const size_t n = g.size();
    if (n < 2) return 0.0;
    double acc = 0.5 * g.front().real();
    for (size_t j = 1; j + 1 < n; ++j) acc += (g[j] * std::polar(1.0, omega * h * static_cast<double>(j))).real();
    acc += 0.5 * (g.back() * std::polar(1.0, omega * h * static_cast<double>(n - 1))).real();
    return h * acc;
}

// ---------------------------------------------------------------------------

Simulation::Simulation(DressedSystem system, SimulationOptions options)
    : system_(std::move(system)), options_(options) {
    require(options_.samples >= 2, "Simulation: samples must be >= 2");
    require(options_.t_end_g > 0.0, "Simulation: t_end must be > 0");
    eq_ = master_equation(system_);
    omega_L_ = system_.params.laser_frequency();
    prop_ = std::make_unique<PeriodPropagator>(eq_, omega_L_, options_.samples);
    states_ = prop_->periodic_states();
    for (size_t k = 0; k < states_.size(); ++k) {
        check_density_matrix(states_[k], static_cast<long>(k), static_cast<double>(k) * prop_->sample_step());
    }
}

double Simulation::settle_time() const {
    const int d = eq_->dim();
    const int s = options_.samples;
    const double h = prop_->sample_step();
    const double t_end = options_.t_end_g / system_.params.g();
    const auto not_reached = [&] {
        std::ostringstream os;
        os << "pseudo-steady state not reached by t = " << options_.t_end_g << "/g (tolerance "
           << options_.transient_tol << "); increase t_end";
        return PseudoSteadyStateNotReached(os.str());
    };

    Vector v = vec(ground_projector(d));
    if (!driven()) {
        const Matrix& ref = states_.front();
        for (long j = 0; static_cast<double>(j) * h <= t_end; ++j) {
            if (trace_distance(unvec(v, d), ref) < options_.transient_tol) return static_cast<double>(j) * h;
            v = prop_->phase_apply(1, v);
        }
        throw not_reached();
    }

    // Coarse pass on period boundaries, then an exact sample-level run count
    // from the period before the first passing boundary.
    const Matrix& p = prop_->period_map();
    const auto ok_at = [&](const Vector& diff, int k) {
        return prop_->phase_apply(k, diff).cwiseAbs().maxCoeff() < options_.transient_tol;
    };
    const long max_periods = static_cast<long>(std::ceil(t_end / prop_->period_length()));
    std::vector<Vector> history;  // v_{p-1}, v_p
    long first = -1;
    for (long q = 0; q <= max_periods; ++q) {
        Vector next = p * v;
        history.push_back(v);
        if (history.size() > 2) history.erase(history.begin());
        if ((next - v).cwiseAbs().maxCoeff() < options_.transient_tol) {
            first = q;
            break;
        }
        v = std::move(next);
    }
    if (first < 0) throw not_reached();

    long q = std::max(0L, first - 1);
    Vector cur = history.front();
    if (q == first) cur = history.back();
    long run = 0;
    long start = 0;
    for (; q <= max_periods + 1; ++q) {
        const Vector next = p * cur;
        const Vector diff = next - cur;
        for (int k = 0; k < s; ++k) {
            const long idx = q * s + k;
            if (ok_at(diff, k)) {
                if (run == 0) start = idx;
                if (++run == s + 1) {
                    const double t1 = static_cast<double>(start) * h;
                    if (t1 > t_end) throw not_reached();
                    return t1;
                }
            } else {
                run = 0;
            }
        }
        cur = next;
    }
    throw not_reached();
}

double Simulation::n_cav() const {
    double acc = 0.0;
    for (const auto& rho : states_) acc += uscqed::n_cav(rho, system_.xp());
    return acc / static_cast<double>(states_.size());
}

std::vector<long> Simulation::tau_steps(const std::vector<double>& tau_g) const {
    const double h = prop_->sample_step();
    const double g = system_.params.g();
    std::vector<long> out;
    out.reserve(tau_g.size());
    for (double t : tau_g) {
        require(std::isfinite(t) && t >= 0.0, "tau grid must be finite and >= 0");
        const double steps = t / g / h;
        const long j = std::lround(steps);
        if (std::abs(steps - static_cast<double>(j)) > 1e-6) {
            std::ostringstream os;
            os << "tau = " << t << "/g is not a multiple of the sampling step " << h * g << "/g";
            throw InvalidArgument(os.str());
        }
        out.push_back(j);
    }
    return out;
}

std::vector<std::vector<cplx>> Simulation::regress(const std::vector<Matrix>& sources, const Matrix& observable,
                                                   long n_steps, double stop_tol) const {
    const int s = options_.samples;
    const int d = eq_->dim();
    const Vector row = trace_row(observable);
    const auto value = [&](const Matrix& x) { return (observable * x).trace(); };

    std::vector<int> active;
    for (int k = 0; k < static_cast<int>(sources.size()); ++k)
        if (sources[k].size() > 0) active.push_back(k);
    std::vector<std::vector<cplx>> out(sources.size());
    if (active.empty()) return out;

    double scale = 0.0;
    const auto below = [&](double block_max) { return stop_tol > 0.0 && block_max < stop_tol * scale; };

    if (!driven()) {
        Matrix u(d * d, static_cast<Eigen::Index>(active.size()));
        for (size_t i = 0; i < active.size(); ++i) u.col(static_cast<Eigen::Index>(i)) = vec(sources[active[i]]);
        Eigen::Matrix<cplx, 1, Eigen::Dynamic> vals = row.transpose() * u;
        for (size_t i = 0; i < active.size(); ++i) {
            out[active[i]].push_back(vals(static_cast<Eigen::Index>(i)));
            scale = std::max(scale, std::abs(vals(static_cast<Eigen::Index>(i))));
        }
        double block_max = 0.0;
        for (long j = 1; j < n_steps; ++j) {
            for (Eigen::Index c = 0; c < u.cols(); ++c) u.col(c) = prop_->phase_apply(1, u.col(c));
            vals = row.transpose() * u;
            for (size_t i = 0; i < active.size(); ++i) {
                out[active[i]].push_back(vals(static_cast<Eigen::Index>(i)));
                block_max = std::max(block_max, std::abs(vals(static_cast<Eigen::Index>(i))));
            }
            if (j % s == 0) {
                if (below(block_max)) break;
                block_max = 0.0;
            }
        }
        return out;
    }

    // First partial period: step every source directly up to t = T.
    Matrix u(d * d, static_cast<Eigen::Index>(active.size()));
    for (size_t i = 0; i < active.size(); ++i) {
        const int k = active[i];
        Matrix x = sources[k];
        out[k].push_back(value(x));
        scale = std::max(scale, std::abs(out[k].back()));
        for (int ph = k; ph < s; ++ph) {
            x = prop_->propagate(x, ph, ph + 1);
            out[k].push_back(value(x));
        }
        u.col(static_cast<Eigen::Index>(i)) = vec(x);
    }

    // Whole periods: values at phases 1..s of each period via w_r = S_r^T row.
    Matrix w(d * d, s);
    for (int r = 1; r <= s; ++r) w.col(r - 1) = prop_->phase_apply_transpose(r, row);
    const Matrix& p = prop_->period_map();
    const auto done = [&] {
        long shortest = std::numeric_limits<long>::max();
        for (int k : active) shortest = std::min(shortest, static_cast<long>(out[k].size()));
        return shortest >= n_steps;
    };
    while (!done()) {
        const Matrix block = w.transpose() * u;  // s x active
        double block_max = block.cwiseAbs().maxCoeff();
        for (size_t i = 0; i < active.size(); ++i)
            for (int r = 0; r < s; ++r) out[active[i]].push_back(block(r, static_cast<Eigen::Index>(i)));
        if (below(block_max)) break;
        u = (p * u).eval();
    }
    long common = std::numeric_limits<long>::max();
    for (int k : active) common = std::min(common, static_cast<long>(out[k].size()));
    common = std::min(common, n_steps);
    for (int k : active) out[k].resize(static_cast<size_t>(common));
    return out;
}

CorrelationResult Simulation::g1(int k, int n_tau) const {
    require(k >= 0 && k < options_.samples, "g1: phase index out of range");
    require(n_tau >= 1, "g1: need at least one delay");
    const Matrix& rho = states_[k];
    const Matrix xm = system_.xm();
    const cplx mean = (xm * rho).trace();
    std::vector<Matrix> sources(options_.samples);
    sources[k] = rho * xm - mean * rho;
    const auto g = regress(sources, system_.xp(), n_tau);
    CorrelationResult r;
    r.kind = CorrelationKind::g1;
    r.values = g[k];
    const double h = prop_->sample_step() * system_.params.g();
    for (size_t j = 0; j < r.values.size(); ++j) r.tau.push_back(static_cast<double>(j) * h);
    return r;
}

CorrelationResult Simulation::g1(int k, const std::vector<double>& tau_g) const {
    const auto steps = tau_steps(tau_g);
    require(!steps.empty(), "g1: empty tau grid");
    const auto full = g1(k, static_cast<int>(*std::max_element(steps.begin(), steps.end()) + 1));
    CorrelationResult r;
    r.kind = CorrelationKind::g1;
    r.tau = tau_g;
    for (long j : steps) r.values.push_back(full.values[static_cast<size_t>(j)]);
    return r;
}

SpectrumResult Simulation::spectrum(const std::vector<double>& detuning_g, Normalization norm) const {
    require(!detuning_g.empty(), "spectrum: empty frequency grid");
    require(system_.params.kappa > 0.0, "spectrum: kappa must be > 0 for a decaying correlation");
    const int s = options_.samples;
    const Matrix xm = system_.xm();
    std::vector<Matrix> sources(s);
    const int n_src = driven() ? s : 1;
    for (int k = 0; k < n_src; ++k) {
        const Matrix& rho = states_[k];
        sources[k] = rho * xm - (xm * rho).trace() * rho;
    }
    const double h = prop_->sample_step();
    const long cap = static_cast<long>(std::ceil(options_.tau_cap_kappa / system_.params.kappa / h)) + 1;
    const auto g = regress(sources, system_.xp(), cap, options_.decay_tol);

    std::vector<cplx> avg(g[0].size(), cplx(0.0));
    for (int k = 0; k < n_src; ++k)
        for (size_t j = 0; j < avg.size(); ++j) avg[j] += g[k][j];
    for (auto& v : avg) v /= static_cast<double>(n_src);

    SpectrumResult out;
    out.detuning = detuning_g;
    out.normalization = norm;
    out.tau_max = h * static_cast<double>(avg.size() - 1);
    out.imag_residue = std::abs(avg.front()) > 0.0 ? std::abs(avg.front().imag()) / std::abs(avg.front()) : 0.0;
    const double gg = system_.params.g();
    out.values.reserve(detuning_g.size());
    for (double dlt : detuning_g) out.values.push_back(fourier_re(avg, h, omega_L_ + dlt * gg));
    if (norm == Normalization::unit_max) {
        const double peak = *std::max_element(out.values.begin(), out.values.end());
        if (peak > 0.0)
            for (auto& v : out.values) v /= peak;
    }
    return out;
}

CorrelationResult Simulation::g2_t_tau(int k, const std::vector<double>& tau_g) const {
    require(k >= 0 && k < options_.samples, "g2_t_tau: phase index out of range");
    const auto steps = tau_steps(tau_g);
    require(!steps.empty(), "g2_t_tau: empty tau grid");
    const int s = options_.samples;
    const Matrix& xp = system_.xp();
    const Matrix xm = system_.xm();
    const Matrix n_op = xm * xp;
    std::vector<double> n_k(s);
    for (int i = 0; i < s; ++i) n_k[i] = uscqed::n_cav(states_[i], xp);

    std::vector<Matrix> sources(s);
    sources[k] = xp * states_[k] * xm;
    const long n_steps = *std::max_element(steps.begin(), steps.end()) + 1;
    const auto num = regress(sources, n_op, n_steps);

    CorrelationResult r;
    r.kind = CorrelationKind::g2_t_tau;
    r.tau = tau_g;
    for (long j : steps) {
        const double den = n_k[k] * n_k[static_cast<size_t>((k + j) % s)];
        if (!(den > kG2Floor)) {
            r.values.emplace_back(std::numeric_limits<double>::quiet_NaN(), 0.0);
            ++r.undefined;
            continue;
        }
        double v = num[k][static_cast<size_t>(j)].real() / den;
        if (v < 0.0 && v >= -1e-8) {
            v = 0.0;
            ++r.clipped;
        }
        r.values.emplace_back(v, 0.0);
    }
    return r;
}

CorrelationResult Simulation::g2_averaged(const std::vector<double>& tau_g) const {
    const auto steps = tau_steps(tau_g);
    require(!steps.empty(), "g2_averaged: empty tau grid");
    const int s = options_.samples;
    const int n_src = driven() ? s : 1;
    const Matrix& xp = system_.xp();
    const Matrix xm = system_.xm();
    const Matrix n_op = xm * xp;
    std::vector<double> n_k(s);
    for (int i = 0; i < s; ++i) n_k[i] = uscqed::n_cav(states_[i], xp);

    std::vector<Matrix> sources(s);
    for (int k = 0; k < n_src; ++k) sources[k] = xp * states_[k] * xm;
    const long n_steps = *std::max_element(steps.begin(), steps.end()) + 1;
    const auto num = regress(sources, n_op, n_steps);

    CorrelationResult r;
    r.kind = CorrelationKind::g2_averaged;
    r.tau = tau_g;
    for (long j : steps) {
        double acc = 0.0;
        bool defined = true;
        for (int k = 0; k < n_src; ++k) {
            const double den = n_k[k] * n_k[static_cast<size_t>((k + j) % s)];
            if (!(den > kG2Floor)) {
                defined = false;
                break;
            }
            acc += num[k][static_cast<size_t>(j)].real() / den;
        }
        if (!defined) {
            r.values.emplace_back(std::numeric_limits<double>::quiet_NaN(), 0.0);
            ++r.undefined;
            continue;
        }
        double v = acc / static_cast<double>(n_src);
        if (v < 0.0 && v >= -1e-8) {
            v = 0.0;
            ++r.clipped;
        }
        r.values.emplace_back(v, 0.0);
    }
    return r;
}

}  // namespace uscqed
