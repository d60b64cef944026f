// Python bindings for the core operations.
#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "uscqed/bloch_siegert.hpp"
#include "uscqed/correlations.hpp"
#include "uscqed/dressing.hpp"
#include "uscqed/errors.hpp"
#include "uscqed/models.hpp"

namespace py = pybind11;
using namespace uscqed;

namespace {

std::vector<double> real_parts(const CorrelationResult& r) {
    std::vector<double> out;
    for (const auto& v : r.values) out.push_back(v.real());
    return out;
}

DressedBasis basis_for(const GaugeChoice& gauge, const ModelParams& p, int n_fock, int n_keep) {
    return diagonalize(system_hamiltonian(gauge, p, fock_space(n_fock)), n_keep);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Gauge-invariant dissipative cavity-QED simulator";

    auto error = py::register_exception<Error>(m, "UscQedError");
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<DimensionMismatch>(m, "DimensionMismatch", error.ptr());
    py::register_exception<InvariantViolation>(m, "InvariantViolation", error.ptr());
    py::register_exception<DegenerateSteadyState>(m, "DegenerateSteadyState", error.ptr());
    py::register_exception<PseudoSteadyStateNotReached>(m, "PseudoSteadyStateNotReached", error.ptr());
    py::register_exception<OutOfValidity>(m, "OutOfValidity", error.ptr());

    py::enum_<Gauge>(m, "Gauge")
        .value("dipole", Gauge::dipole)
        .value("coulomb", Gauge::coulomb)
        .value("coulomb_naive", Gauge::coulomb_naive)
        .value("jc", Gauge::jc);

    py::enum_<BathKind>(m, "BathKind").value("flat", BathKind::flat).value("ohmic", BathKind::ohmic);
    py::enum_<PumpKind>(m, "PumpKind")
        .value("none", PumpKind::none)
        .value("incoherent", PumpKind::incoherent)
        .value("coherent", PumpKind::coherent);

    py::class_<GaugeChoice>(m, "GaugeChoice")
        .def(py::init([](Gauge g, bool corrected) {
                 GaugeChoice c{g, corrected};
                 c.validate();
                 return c;
             }),
             py::arg("gauge"), py::arg("corrected") = true)
        .def_readonly("gauge", &GaugeChoice::gauge)
        .def_readonly("corrected", &GaugeChoice::corrected)
        .def_property_readonly("label", &GaugeChoice::label)
        .def("__repr__", [](const GaugeChoice& g) { return "GaugeChoice(" + g.label() + ")"; });

    py::class_<PumpSpec>(m, "PumpSpec")
        .def_static("none", &PumpSpec::none)
        .def_static("incoherent", &PumpSpec::incoherent, py::arg("P_inc"))
        .def_static("coherent", &PumpSpec::coherent, py::arg("Omega_d"), py::arg("rwa") = true,
                    py::arg("omega_L") = std::nullopt)
        .def_readonly("kind", &PumpSpec::kind)
        .def_readonly("P_inc", &PumpSpec::P_inc)
        .def_readonly("Omega_d", &PumpSpec::Omega_d)
        .def_readonly("omega_L", &PumpSpec::omega_L)
        .def_readonly("rwa_drive", &PumpSpec::rwa_drive);

    py::class_<ModelParams>(m, "ModelParams")
        .def_static("from_g_units", &ModelParams::from_g_units, py::arg("eta"), py::arg("kappa_g"),
                    py::arg("gamma_g") = 0.0, py::arg("pump_g") = PumpSpec{}, py::arg("omega0") = 1.0,
                    py::arg("omega_c") = 1.0, "Rates and drive amplitudes in units of g = eta omega0.")
        .def_readonly("omega0", &ModelParams::omega0)
        .def_readonly("omega_c", &ModelParams::omega_c)
        .def_readonly("eta", &ModelParams::eta)
        .def_readonly("kappa", &ModelParams::kappa)
        .def_readonly("gamma", &ModelParams::gamma)
        .def_readonly("pump", &ModelParams::pump)
        .def_property_readonly("g", &ModelParams::g)
        .def("warnings", &ModelParams::warnings);

    m.def(
        "eigenvalues",
        [](const GaugeChoice& gauge, const ModelParams& p, int n_fock, int n_levels) {
            const DressedBasis b = basis_for(gauge, p, n_fock, n_levels);
            RealVector e = b.energies.head(n_levels).array() + b.ground_energy;
            return e;
        },
        py::arg("gauge"), py::arg("params"), py::arg("n_fock") = 50, py::arg("n_levels") = 6,
        "Lowest eigenvalues of the gauge's Hamiltonian (omega0 units).");

    m.def(
        "transition_strengths",
        [](const GaugeChoice& gauge, const ModelParams& p, int n_fock, int n_keep) {
            const auto space = fock_space(n_fock);
            return transition_strengths(diagonalize(system_hamiltonian(gauge, p, space), n_keep),
                                        quadrature_pi(gauge, p, space));
        },
        py::arg("gauge"), py::arg("params"), py::arg("n_fock") = 50, py::arg("n_keep") = 24,
        "|P_jk|^2 = |C_jk|^2 / 2 between energy-ordered dressed states.");

    m.def(
        "steady_n_cav",
        [](const GaugeChoice& gauge, const ModelParams& p, BathKind bath, int n_fock, int n_keep) {
            const auto sys = build_dressed_system(gauge, p, bath, n_fock, n_keep);
            return n_cav(steady_state(*master_equation(sys)), sys.xp());
        },
        py::arg("gauge"), py::arg("params"), py::arg("bath") = BathKind::flat, py::arg("n_fock") = 50,
        py::arg("n_keep") = 24, "Steady-state N_cav of an undriven or incoherently pumped system.");

    py::class_<Simulation>(m, "Simulation")
        .def(py::init([](const GaugeChoice& gauge, const ModelParams& p, BathKind bath, int n_fock, int n_keep,
                         int samples, double t_end_g) {
                 SimulationOptions o;
                 o.samples = samples;
                 o.t_end_g = t_end_g;
                 py::gil_scoped_release release;
                 return std::make_unique<Simulation>(build_dressed_system(gauge, p, bath, n_fock, n_keep), o);
             }),
             py::arg("gauge"), py::arg("params"), py::arg("bath") = BathKind::flat, py::arg("n_fock") = 50,
             py::arg("n_keep") = 24, py::arg("samples") = 20, py::arg("t_end_g") = 1000.0)
        .def_property_readonly("driven", &Simulation::driven)
        .def_property_readonly("omega_L", &Simulation::omega_L)
        .def_property_readonly("sample_step_g",
                               [](const Simulation& s) {
                                   return s.propagator().sample_step() * s.system().params.g();
                               })
        .def_property_readonly("states", &Simulation::states)
        .def("n_cav", &Simulation::n_cav)
        .def("settle_time", &Simulation::settle_time, py::call_guard<py::gil_scoped_release>(),
             "Transient length in 1/omega0.")
        .def(
            "spectrum",
            [](const Simulation& s, const std::vector<double>& detuning_g, bool unit_max) {
                py::gil_scoped_release release;
                return s.spectrum(detuning_g, unit_max ? Normalization::unit_max : Normalization::raw).values;
            },
            py::arg("detuning_g"), py::arg("unit_max") = false)
        .def(
            "g2",
            [](const Simulation& s, const std::vector<double>& tau_g, std::optional<int> phase) {
                py::gil_scoped_release release;
                return real_parts(phase ? s.g2_t_tau(*phase, tau_g) : s.g2_averaged(tau_g));
            },
            py::arg("tau_g"), py::arg("phase") = std::nullopt,
            "Period-averaged g2(tau), or g2(t_k, tau) for a phase index.")
        .def(
            "g1",
            [](const Simulation& s, int k, const std::vector<double>& tau_g) { return s.g1(k, tau_g).values; },
            py::arg("phase"), py::arg("tau_g"));

    m.def(
        "bs_spectrum",
        [](double eta, double kappa_g, double P_inc_g, bool corrected, const std::vector<double>& detuning_g,
           bool exact) {
            const double g = eta;
            const BsParams p{eta, kappa_g * g, 1.0, corrected, P_inc_g / kappa_g};
            return bs_spectrum(p, detuning_g, exact ? BsForm::exact : BsForm::simplified).values;
        },
        py::arg("eta"), py::arg("kappa_g"), py::arg("P_inc_g"), py::arg("corrected"), py::arg("detuning_g"),
        py::arg("exact") = false, "Weak-excitation Bloch-Siegert spectrum (omega0 = 1).");
    m.def("bs_peak_area_ratio", &bs_peak_area_ratio, py::arg("eta"), py::arg("corrected"));
}
