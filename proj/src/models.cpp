#include "uscqed/models.hpp"

#include <cmath>
#include <sstream>

namespace uscqed {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw InvalidArgument(msg);
}

bool finite(double x) { return std::isfinite(x); }

OperatorMatrix hermitian_part(const SpaceDescriptor& space, const Matrix& m) {
    return {space, 0.5 * (m + m.adjoint()), true};
}

Matrix position(const SpaceDescriptor& space) {
    const Matrix a = extract_photon(annihilation(space));
    return a + a.adjoint();
}

}  // namespace

void ModelParams::validate() const {
    require(finite(omega0) && omega0 > 0.0, "omega0 must be > 0");
    require(finite(omega_c) && omega_c > 0.0, "omega_c must be > 0");
    require(finite(eta) && eta >= 0.0, "eta must be >= 0");
    require(finite(kappa) && kappa >= 0.0, "kappa must be >= 0");
    require(finite(gamma) && gamma >= 0.0, "gamma must be >= 0");
    require(finite(pump.P_inc) && pump.P_inc >= 0.0, "P_inc must be >= 0");
    require(finite(pump.Omega_d) && pump.Omega_d >= 0.0, "Omega_d must be >= 0");
    if (pump.omega_L) require(finite(*pump.omega_L) && *pump.omega_L > 0.0, "omega_L must be > 0");
    switch (pump.kind) {
        case PumpKind::none:
            require(pump.P_inc == 0.0 && pump.Omega_d == 0.0, "pump kind 'none' with nonzero strength");
            break;
        case PumpKind::incoherent:
            require(pump.Omega_d == 0.0, "incoherent pump with nonzero Omega_d");
            break;
        case PumpKind::coherent:
            require(pump.P_inc == 0.0, "coherent pump with nonzero P_inc");
            break;
    }
}

std::vector<std::string> ModelParams::warnings() const {
    std::vector<std::string> out;
    if (pump.kind == PumpKind::coherent && pump.Omega_d >= g()) {
        std::ostringstream os;
        os << "Omega_d = " << pump.Omega_d << " >= g = " << g()
           << ": drive is no longer weak compared with the coupling";
        out.push_back(os.str());
    }
    return out;
}

ModelParams ModelParams::from_g_units(double eta, double kappa_g, double gamma_g, PumpSpec pump_g, double omega0,
                                      double omega_c) {
    ModelParams p;
    p.omega0 = omega0;
    p.omega_c = omega_c;
    p.eta = eta;
    const double g = eta * omega0;
    p.kappa = kappa_g * g;
    p.gamma = gamma_g * g;
    p.pump = pump_g;
    p.pump.P_inc *= g;
    p.pump.Omega_d *= g;
    p.validate();
    return p;
}

void GaugeChoice::validate() const {
    if (gauge == Gauge::coulomb_naive && corrected) {
        throw InvalidArgument("coulomb_naive has no gauge-corrected form");
    }
}

std::string GaugeChoice::label() const {
    switch (gauge) {
        case Gauge::dipole: return corrected ? "DGC" : "DG";
        case Gauge::coulomb: return corrected ? "CGC" : "CG";
        case Gauge::coulomb_naive: return "CGN";
        case Gauge::jc: return "JC";
    }
    return "?";
}

std::string to_string(Gauge g) {
    switch (g) {
        case Gauge::dipole: return "dipole";
        case Gauge::coulomb: return "coulomb";
        case Gauge::coulomb_naive: return "coulomb_naive";
        case Gauge::jc: return "jc";
    }
    return "?";
}

Gauge gauge_from_string(const std::string& name) {
    if (name == "dipole") return Gauge::dipole;
    if (name == "coulomb") return Gauge::coulomb;
    if (name == "coulomb_naive") return Gauge::coulomb_naive;
    if (name == "jc") return Gauge::jc;
    throw InvalidArgument("unknown gauge '" + name + "' (expected dipole, coulomb, coulomb_naive, jc)");
}

OperatorMatrix build_bare(const ModelParams& params, const SpaceDescriptor& space) {
    params.validate();
    Matrix h = params.omega_c * number(space).matrix() + 0.5 * params.omega0 * pauli(space, Pauli::z).matrix();
    return {space, std::move(h), true};
}

OperatorMatrix build_dipole_qrm(const ModelParams& params, const SpaceDescriptor& space) {
    const Matrix a = annihilation(space).matrix();
    const Matrix coupling = I * params.g() * (a.adjoint() - a) * pauli(space, Pauli::x).matrix();
    return hermitian_part(space, build_bare(params, space).matrix() + coupling);
}

OperatorMatrix build_coulomb_qrm(const ModelParams& params, const SpaceDescriptor& space) {
    const double s = 2.0 * params.eta_c();
    const Matrix x = position(space);
    const Matrix cos_x = hermitian_function(x, [s](double v) { return std::cos(s * v); });
    const Matrix sin_x = hermitian_function(x, [s](double v) { return std::sin(s * v); });
    const Matrix tls = 0.5 * params.omega0 *
                       (embed_tls(space, tls_matrix(Pauli::z)).matrix() * embed_photon(space, cos_x).matrix() +
                        embed_tls(space, tls_matrix(Pauli::y)).matrix() * embed_photon(space, sin_x).matrix());
    params.validate();
    return hermitian_part(space, params.omega_c * number(space).matrix() + tls);
}

OperatorMatrix build_coulomb_naive(const ModelParams& params, const SpaceDescriptor& space) {
    const Matrix x = embed_photon(space, position(space)).matrix();
    const Matrix coupling = params.g_coulomb() * x * pauli(space, Pauli::y).matrix();
    return hermitian_part(space, build_bare(params, space).matrix() + coupling);
}

OperatorMatrix build_jc(const ModelParams& params, const SpaceDescriptor& space) {
    const Matrix a = annihilation(space).matrix();
    const Matrix sp = pauli(space, Pauli::plus).matrix();
    const Matrix sm = pauli(space, Pauli::minus).matrix();
    const Matrix coupling = I * params.g() * (a.adjoint() * sm - a * sp);
    return hermitian_part(space, build_bare(params, space).matrix() + coupling);
}

OperatorMatrix gauge_unitary(const ModelParams& params, const SpaceDescriptor& space) {
    params.validate();
    // sigma_x has eigenvalues +-1 on |+->, so exp(-i s X sigma_x) splits into
    // cos(s X) (x) 1 - i sin(s X) (x) sigma_x.
    const double s = params.eta_c();
    const Matrix x = position(space);
    const Matrix c = hermitian_function(x, [s](double v) { return std::cos(s * v); });
    const Matrix sn = hermitian_function(x, [s](double v) { return std::sin(s * v); });
    Matrix u = embed_photon(space, c).matrix() -
               I * embed_photon(space, sn).matrix() * pauli(space, Pauli::x).matrix();
    return {space, std::move(u), false};
}

OperatorMatrix quadrature_pi(const GaugeChoice& gauge, const ModelParams& params, const SpaceDescriptor& space) {
    gauge.validate();
    params.validate();
    const Matrix a = annihilation(space).matrix();
    Matrix pi = I * (a.adjoint() - a);
    if (gauge.gauge == Gauge::dipole && gauge.corrected) {
        pi += 2.0 * params.eta_c() * pauli(space, Pauli::x).matrix();
    }
    return hermitian_part(space, pi);
}

OperatorMatrix system_hamiltonian(const GaugeChoice& gauge, const ModelParams& params, const SpaceDescriptor& space) {
    gauge.validate();
    switch (gauge.gauge) {
        case Gauge::dipole: return build_dipole_qrm(params, space);
        case Gauge::coulomb:
            return gauge.corrected ? build_coulomb_qrm(params, space) : build_coulomb_naive(params, space);
        case Gauge::coulomb_naive: return build_coulomb_naive(params, space);
        case Gauge::jc: return build_jc(params, space);
    }
    throw InvalidArgument("system_hamiltonian: unknown gauge");
}

}  // namespace uscqed
