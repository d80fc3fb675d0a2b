#include "qcaforge/engine.hpp"
#include "qcaforge/layout.hpp"
#include "qcaforge/render.hpp"
#include "qcaforge/stdcells.hpp"
#include "qcaforge/verify.hpp"

#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace qcaforge;

namespace
{

template <typename Fn>
std::string to_text(Fn&& fn)
{
    std::ostringstream out;
    fn(out);
    return out.str();
}

}  // namespace

PYBIND11_MODULE(_qcaforge, m)
{
    m.doc() = "QCA cell-level simulation, metrics and verification";

    py::register_exception<layout_error>(m, "LayoutError", PyExc_ValueError);
    py::register_exception<table_error>(m, "TableError", PyExc_ValueError);
    py::register_exception<simulation_error>(m, "SimulationError", PyExc_RuntimeError);

    // -- layout ------------------------------------------------------------------------------------------

    py::enum_<cell_kind>(m, "CellKind")
        .value("normal", cell_kind::normal)
        .value("input", cell_kind::input)
        .value("output", cell_kind::output)
        .value("fixed", cell_kind::fixed);

    py::class_<cell>(m, "Cell")
        .def_readwrite("x_nm", &cell::x_nm)
        .def_readwrite("y_nm", &cell::y_nm)
        .def_readwrite("zone", &cell::zone)
        .def_readwrite("kind", &cell::kind)
        .def_readwrite("label", &cell::label)
        .def_readwrite("polarization", &cell::polarization)
        .def_static("normal", &cell::make_normal, py::arg("x"), py::arg("y"), py::arg("zone"))
        .def_static("input", &cell::make_input, py::arg("x"), py::arg("y"), py::arg("zone"), py::arg("label"))
        .def_static("output", &cell::make_output, py::arg("x"), py::arg("y"), py::arg("zone"), py::arg("label"))
        .def_static("fixed", &cell::make_fixed, py::arg("x"), py::arg("y"), py::arg("zone"),
                    py::arg("polarization"))
        .def(py::self == py::self)
        .def("__repr__",
             [](const cell& c)
             {
                 std::ostringstream s;
                 s << "Cell(" << c.x_nm << ", " << c.y_nm << ", zone=" << c.zone;
                 if (!c.label.empty())
                 {
                     s << ", label='" << c.label << "'";
                 }
                 s << ")";
                 return s.str();
             });

    py::class_<layout>(m, "Layout")
        .def(py::init<>())
        .def_readwrite("name", &layout::name)
        .def_readwrite("cells", &layout::cells)
        .def_readwrite("inputs", &layout::inputs)
        .def_readwrite("outputs", &layout::outputs)
        .def("add", &layout::add, py::return_value_policy::reference_internal)
        .def("find_label", &layout::find_label)
        .def("translated", &layout::translated, py::arg("dx"), py::arg("dy"))
        .def("mirrored_x", &layout::mirrored_x)
        .def("rotated_90", &layout::rotated_90)
        .def(py::self == py::self)
        .def("__len__", [](const layout& l) { return l.cells.size(); });

    py::class_<validation_result>(m, "ValidationResult")
        .def_readonly("violations", &validation_result::violations)
        .def("ok", &validation_result::ok)
        .def("__bool__", &validation_result::ok);

    py::class_<metrics_report>(m, "Metrics")
        .def_readonly("cell_count", &metrics_report::cell_count)
        .def_readonly("area_um2", &metrics_report::area_um2)
        .def_readonly("clock_phases", &metrics_report::clock_phases)
        .def_readonly("has_set_reset", &metrics_report::has_set_reset)
        .def(py::self == py::self);

    m.def("validate_layout", &validate_layout);
    m.def("cell_count", &cell_count);
    m.def("bounding_area", &bounding_area);
    m.def("rounded_area", &rounded_area);
    m.def("clock_phase_latency", &clock_phase_latency, py::arg("layout"), py::arg("input"), py::arg("output"));
    m.def("compute_metrics", &compute_metrics);
    m.def("parse_layout", &parse_layout);
    m.def("load_layout", &load_layout);
    m.def("serialize_layout", &serialize_layout);
    m.def("save_layout", &save_layout);

    // -- engine ------------------------------------------------------------------------------------------

    py::class_<sim_config>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("epsilon_r", &sim_config::epsilon_r)
        .def_readwrite("gamma_high", &sim_config::gamma_high)
        .def_readwrite("gamma_low", &sim_config::gamma_low)
        .def_readwrite("radius_of_effect", &sim_config::radius_of_effect)
        .def_readwrite("convergence_tolerance", &sim_config::convergence_tolerance)
        .def_readwrite("max_iterations_per_sample", &sim_config::max_iterations_per_sample)
        .def_readwrite("relaxation_factor", &sim_config::relaxation_factor)
        .def_readwrite("samples_per_cycle", &sim_config::samples_per_cycle)
        .def_readwrite("dot_offset", &sim_config::dot_offset)
        .def("validate", &sim_config::validate);

    py::class_<trace>(m, "Trace")
        .def_property_readonly("sample_count", &trace::sample_count)
        .def_property_readonly("cell_count", &trace::cell_count)
        .def_property_readonly("samples_per_cycle", &trace::samples_per_cycle)
        .def_property_readonly("vector_count", &trace::vector_count)
        .def("polarization", &trace::polarization, py::arg("sample"), py::arg("cell"))
        .def("polarizations",
             [](const trace& t, std::size_t s)
             {
                 if (s >= t.sample_count())
                 {
                     throw py::index_error("sample out of range");
                 }
                 const auto p = t.polarizations(s);
                 return std::vector<double>(p.begin(), p.end());
             })
        .def("gammas", &trace::gammas)
        .def("vector_index", &trace::vector_index)
        .def("converged", &trace::converged)
        .def("unconverged_samples", &trace::unconverged_samples)
        .def(py::self == py::self);

    m.def("kink_energy", &kink_energy, py::arg("a"), py::arg("b"), py::arg("config") = sim_config{});
    m.def("response", &response);
    m.def("simulate", &simulate, py::arg("layout"), py::arg("vectors"), py::arg("config") = sim_config{},
          py::arg("threads") = 1, py::call_guard<py::gil_scoped_release>());
    m.def("trace_csv", [](const trace& t, const layout& l)
          { return to_text([&](std::ostream& o) { write_trace_csv(o, t, l); }); });

    // -- verification ------------------------------------------------------------------------------------

    py::enum_<row_outcome>(m, "RowOutcome")
        .value("passed", row_outcome::pass)
        .value("failed", row_outcome::fail)
        .value("undecodable", row_outcome::undecodable);

    py::class_<truth_table>(m, "TruthTable")
        .def_readonly("inputs", &truth_table::inputs)
        .def_readonly("clock", &truth_table::clock)
        .def_readonly("output", &truth_table::output)
        .def_property_readonly("row_count", [](const truth_table& t) { return t.rows.size(); })
        .def(py::self == py::self);

    py::class_<row_result>(m, "RowResult")
        .def_readonly("row", &row_result::row)
        .def_readonly("outcome", &row_result::outcome)
        .def_readonly("stimuli", &row_result::stimuli);

    py::class_<verification_report>(m, "VerificationReport")
        .def_readonly("circuit", &verification_report::circuit)
        .def_readonly("output", &verification_report::output)
        .def_readonly("latency_vectors", &verification_report::latency_vectors)
        .def_readonly("rows", &verification_report::rows)
        .def_readonly("unconverged_samples", &verification_report::unconverged_samples)
        .def_readonly("passed", &verification_report::passed)
        .def("count", &verification_report::count)
        .def_property_readonly("stimulus_count", [](const verification_report& r) { return r.stimuli.size(); })
        .def(py::self == py::self);

    m.def("parse_truth_table", &parse_truth_table);
    m.def("load_truth_table", &load_truth_table);
    m.def("serialize_truth_table", &serialize_truth_table);
    m.def("parse_vectors", &parse_vectors, py::arg("text"), py::arg("layout"));
    m.def("exhaustive_vectors", &exhaustive_vectors);
    m.def("decode_output", &decode_output, py::arg("trace"), py::arg("label"), py::arg("layout"));
    m.def("measure_latency", &measure_latency, py::arg("layout"), py::arg("output"),
          py::arg("config") = sim_config{}, py::arg("max_latency") = 4, py::arg("threads") = 1,
          py::call_guard<py::gil_scoped_release>());
    m.def("check_truth_table", &check_truth_table, py::arg("layout"), py::arg("table"),
          py::arg("config") = sim_config{}, py::arg("threads") = 1, py::call_guard<py::gil_scoped_release>());
    m.def("report_text", [](const verification_report& r, const truth_table& t)
          { return to_text([&](std::ostream& o) { write_report_text(o, r, t); }); });
    m.def("report_csv", [](const verification_report& r, const truth_table& t)
          { return to_text([&](std::ostream& o) { write_report_csv(o, r, t); }); });
    m.def("improvement_percent", &improvement_percent);
    m.def("compare_text", [](const layout& latch, const layout& ff)
          { return to_text([&](std::ostream& o) { write_comparison_text(o, compare_with_references(latch, ff)); }); });
    m.def("compare_matches_published",
          [](const layout& latch, const layout& ff) { return compare_with_references(latch, ff).matches_published(); });

    // -- standard cells ----------------------------------------------------------------------------------

    py::class_<circuit>(m, "Circuit")
        .def_readonly("layout", &circuit::lyt)
        .def_readonly("expected_table", &circuit::expected_table)
        .def_readonly("reported_metrics", &circuit::reported_metrics);

    py::enum_<inverter_style>(m, "InverterStyle")
        .value("corner", inverter_style::corner)
        .value("symmetric", inverter_style::symmetric);
    py::enum_<clock_edge>(m, "ClockEdge").value("positive", clock_edge::positive).value("negative", clock_edge::negative);

    m.def("majority_gate", &majority_gate);
    m.def("and_gate", &and_gate);
    m.def("or_gate", &or_gate);
    m.def("inverter", &inverter, py::arg("style") = inverter_style::corner);
    m.def("wire", &wire, py::arg("n"), py::arg("zone_plan"));
    m.def("spread_zone_plan", &spread_zone_plan);
    m.def("mux2to1", &mux2to1);
    m.def("d_latch", &d_latch);
    m.def("d_flipflop", &d_flipflop, py::arg("edge") = clock_edge::positive);
    m.def("d_flipflop_sr", &d_flipflop_sr);
    m.def("bundled_circuits",
          []
          {
              py::dict out{};
              for (auto& nc : bundled_circuits())
              {
                  out[py::str(nc.name)] = py::cast(nc.c);
              }
              return out;
          });

    m.def("render_svg",
          [](const layout& l, std::optional<std::vector<double>> polarizations)
          {
              return to_text(
                      [&](std::ostream& o)
                      {
                          if (polarizations)
                          {
                              write_svg(o, l, std::span<const double>{*polarizations});
                          }
                          else
                          {
                              write_svg(o, l);
                          }
                      });
          },
          py::arg("layout"), py::arg("polarizations") = py::none());
}
