#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dimer/commands.hpp"
#include "dimer/config.hpp"
#include "dimer/observables.hpp"
#include "dimer/semiclassical.hpp"
#include "dimer/stats.hpp"
#include "dimer/trajectory.hpp"

namespace py = pybind11;
using namespace dimer;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Open Bose-Hubbard dimer: quantum trajectories and semiclassical analysis";

    py::class_<PhysicalParams>(m, "PhysicalParams")
        .def(py::init<>())
        .def_readwrite("J", &PhysicalParams::J)
        .def_readwrite("Delta", &PhysicalParams::Delta)
        .def_readwrite("U", &PhysicalParams::U)
        .def_readwrite("gamma", &PhysicalParams::gamma)
        .def_readwrite("F", &PhysicalParams::F)
        .def_readwrite("mu", &PhysicalParams::mu);

    py::class_<ModeTruncation>(m, "ModeTruncation")
        .def_readonly("n_max_1", &ModeTruncation::n_max_1)
        .def_readonly("n_max_2", &ModeTruncation::n_max_2)
        .def_readonly("dim", &ModeTruncation::dim);

    m.def("make_truncation", &make_truncation, py::arg("n_max_1"), py::arg("n_max_2"));
    m.def("apply_mu_scaling", &apply_mu_scaling);
    m.def("drive_for_f", &drive_for_f, py::arg("params"), py::arg("f"));
    m.def("f_for_drive", &f_for_drive, py::arg("params"), py::arg("F"));
    m.def("suggest_n_max", &suggest_n_max, py::arg("n_peak"));

    py::class_<RampSchedule>(m, "RampSchedule")
        .def(py::init<>())
        .def_readwrite("rate", &RampSchedule::rate)
        .def_readwrite("F_start", &RampSchedule::F_start);

    py::class_<TrajectoryConfig>(m, "TrajectoryConfig")
        .def(py::init<>())
        .def_readwrite("params", &TrajectoryConfig::params)
        .def_readwrite("trunc", &TrajectoryConfig::trunc)
        .def_readwrite("t_final", &TrajectoryConfig::t_final)
        .def_readwrite("dt", &TrajectoryConfig::dt)
        .def_readwrite("sample_interval", &TrajectoryConfig::sample_interval)
        .def_readwrite("jump_time_tol", &TrajectoryConfig::jump_time_tol)
        .def_readwrite("edge_tol", &TrajectoryConfig::edge_tol)
        .def_readwrite("seed", &TrajectoryConfig::seed)
        .def_readwrite("ramp", &TrajectoryConfig::ramp)
        .def_readwrite("compute_entropy", &TrajectoryConfig::compute_entropy)
        .def_readwrite("swap_channels", &TrajectoryConfig::swap_channels);

    py::class_<SampleRow>(m, "SampleRow")
        .def_readonly("t", &SampleRow::t)
        .def_readonly("n1", &SampleRow::n1)
        .def_readonly("n2", &SampleRow::n2)
        .def_readonly("O", &SampleRow::O)
        .def_readonly("g2m1", &SampleRow::g2m1)
        .def_readonly("g2m2", &SampleRow::g2m2)
        .def_readonly("entropy", &SampleRow::entropy)
        .def_readonly("F", &SampleRow::F);

    py::class_<JumpEvent>(m, "JumpEvent")
        .def_readonly("t", &JumpEvent::t)
        .def_readonly("channel", &JumpEvent::channel);

    py::class_<TrajectoryRecord>(m, "TrajectoryRecord")
        .def_readonly("samples", &TrajectoryRecord::samples)
        .def_readonly("jumps", &TrajectoryRecord::jumps)
        .def_readonly("seed", &TrajectoryRecord::seed)
        .def_readonly("dt_used", &TrajectoryRecord::dt_used)
        .def_readonly("steps_per_sample", &TrajectoryRecord::steps_per_sample)
        .def_readonly("max_edge_population", &TrajectoryRecord::max_edge_population);

    m.def("run_trajectory", &run_trajectory, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());

    py::class_<EnsembleResult>(m, "EnsembleResult")
        .def_readonly("records", &EnsembleResult::records)
        .def_readonly("mean", &EnsembleResult::mean);

    m.def("run_ensemble", &run_ensemble, py::arg("config"), py::arg("n_traj"),
          py::arg("base_seed"), py::arg("threads") = 1,
          py::call_guard<py::gil_scoped_release>());

    py::class_<ScaledParams>(m, "ScaledParams")
        .def(py::init<>())
        .def_readwrite("delta", &ScaledParams::delta)
        .def_readwrite("kappa", &ScaledParams::kappa)
        .def_readwrite("f", &ScaledParams::f)
        .def_readwrite("xi", &ScaledParams::xi);

    m.def("scaled_params", &scaled_params, py::arg("params"));

    py::class_<SemiState>(m, "SemiState")
        .def(py::init<>())
        .def_readwrite("A", &SemiState::A)
        .def_readwrite("B", &SemiState::B)
        .def("int_A", &SemiState::int_A)
        .def("int_B", &SemiState::int_B);

    m.def("symmetric_equilibria", &symmetric_equilibria, py::arg("f"), py::arg("q"));
    m.def("pitchfork_test", &pitchfork_test, py::arg("x"), py::arg("q"));

    py::enum_<Stability>(m, "Stability")
        .value("stable", Stability::stable)
        .value("saddle_1", Stability::saddle_1)
        .value("saddle_2p", Stability::saddle_2p)
        .value("marginal", Stability::marginal);

    py::class_<BranchPoint>(m, "BranchPoint")
        .def_readonly("f", &BranchPoint::f)
        .def_readonly("state", &BranchPoint::state)
        .def_readonly("stability", &BranchPoint::stability)
        .def_readonly("symmetric", &BranchPoint::symmetric);

    py::class_<BranchRecord>(m, "BranchRecord")
        .def_readonly("points", &BranchRecord::points)
        .def_readonly("terminated_by_failure", &BranchRecord::terminated_by_failure)
        .def_readonly("termination", &BranchRecord::termination);

    py::enum_<BifKind>(m, "BifKind")
        .value("pitchfork", BifKind::pitchfork)
        .value("hopf", BifKind::hopf)
        .value("saddle_node", BifKind::saddle_node);

    py::class_<BifurcationPoint>(m, "BifurcationPoint")
        .def_readonly("kind", &BifurcationPoint::kind)
        .def_readonly("f", &BifurcationPoint::f)
        .def_readonly("state", &BifurcationPoint::state)
        .def_readonly("flagged", &BifurcationPoint::flagged);

    py::class_<LimitCycle>(m, "LimitCycle")
        .def_readonly("found", &LimitCycle::found)
        .def_readonly("f", &LimitCycle::f)
        .def_readonly("period", &LimitCycle::period)
        .def_readonly("frequency", &LimitCycle::frequency)
        .def_readonly("max_int_A", &LimitCycle::max_int_A)
        .def_readonly("max_int_B", &LimitCycle::max_int_B);

    py::class_<SweepResult>(m, "SweepResult")
        .def_readonly("symmetric_branch", &SweepResult::symmetric_branch)
        .def_readonly("asymmetric_branches", &SweepResult::asymmetric_branches)
        .def_readonly("bifurcations", &SweepResult::bifurcations)
        .def_readonly("cycles", &SweepResult::cycles);

    m.def("run_sweep", &run_sweep, py::arg("q"), py::arg("f_lo"), py::arg("f_hi"),
          py::arg("cycle_samples") = 10, py::call_guard<py::gil_scoped_release>());

    py::class_<PowerSpectrum>(m, "PowerSpectrum")
        .def_readonly("freq", &PowerSpectrum::freq)
        .def_readonly("mag", &PowerSpectrum::mag);

    m.def("power_spectrum", &power_spectrum, py::arg("series"), py::arg("dt"),
          py::arg("hann") = false);
    m.def("dominant_frequency", &dominant_frequency, py::arg("spectrum"), py::arg("f_lo"),
          py::arg("f_hi"));
    m.def("count_switches", &count_switches, py::arg("d_series"), py::arg("h"));

    py::class_<Histogram2D>(m, "Histogram2D")
        .def_readonly("x_lo", &Histogram2D::x_lo)
        .def_readonly("x_hi", &Histogram2D::x_hi)
        .def_readonly("y_lo", &Histogram2D::y_lo)
        .def_readonly("y_hi", &Histogram2D::y_hi)
        .def_readonly("nx", &Histogram2D::nx)
        .def_readonly("ny", &Histogram2D::ny)
        .def_readonly("counts", &Histogram2D::counts)
        .def_readonly("total", &Histogram2D::total)
        .def_readonly("overflow", &Histogram2D::overflow);

    m.def("histogram2d", &histogram2d, py::arg("points"), py::arg("x_lo"), py::arg("x_hi"),
          py::arg("y_lo"), py::arg("y_hi"), py::arg("nx"), py::arg("ny"));
    m.def("symmetrize_points", &symmetrize_points, py::arg("points"));

    m.attr("__version__") = kVersion;
}
