#include "qcaforge/engine.hpp"
#include "qcaforge/layout.hpp"
#include "qcaforge/render.hpp"
#include "qcaforge/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#ifndef QCAFORGE_CIRCUITS_DIR
#define QCAFORGE_CIRCUITS_DIR "circuits"
#endif

namespace
{

using namespace qcaforge;

constexpr int exit_ok = 0;
constexpr int exit_failed = 1;
constexpr int exit_usage = 2;

// Thrown for anything that should end the process with the usage/IO exit code.
struct usage_error : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct sim_overrides
{
    std::optional<int> samples_per_cycle{};
    std::optional<double> tolerance{};
    std::optional<int> max_iterations{};
    std::optional<double> relaxation{};
    std::optional<double> radius{};
    std::optional<double> epsilon_r{};
    std::optional<double> gamma_high{};
    std::optional<double> gamma_low{};

    void attach(CLI::App& cmd)
    {
        cmd.add_option("--samples-per-cycle", samples_per_cycle, "Clock samples per input vector (multiple of 4)");
        cmd.add_option("--tolerance", tolerance, "Convergence tolerance per sweep");
        cmd.add_option("--max-iterations", max_iterations, "Sweep cap per sample");
        cmd.add_option("--relaxation", relaxation, "Under-relaxation factor of each sweep, in (0, 1]");
        cmd.add_option("--radius", radius, "Radius of effect (nm)");
        cmd.add_option("--epsilon-r", epsilon_r, "Relative permittivity");
        cmd.add_option("--gamma-high", gamma_high, "Tunnelling energy ceiling (J)");
        cmd.add_option("--gamma-low", gamma_low, "Tunnelling energy floor (J)");
    }

    [[nodiscard]] sim_config build() const
    {
        sim_config cfg{};
        if (samples_per_cycle)
        {
            cfg.samples_per_cycle = *samples_per_cycle;
        }
        if (tolerance)
        {
            cfg.convergence_tolerance = *tolerance;
        }
        if (max_iterations)
        {
            cfg.max_iterations_per_sample = *max_iterations;
        }
        if (relaxation)
        {
            cfg.relaxation_factor = *relaxation;
        }
        if (radius)
        {
            cfg.radius_of_effect = *radius;
        }
        if (epsilon_r)
        {
            cfg.epsilon_r = *epsilon_r;
        }
        if (gamma_high)
        {
            cfg.gamma_high = *gamma_high;
        }
        if (gamma_low)
        {
            cfg.gamma_low = *gamma_low;
        }
        try
        {
            cfg.validate();
        }
        catch (const std::invalid_argument& e)
        {
            throw usage_error(e.what());
        }
        return cfg;
    }
};

layout read_layout(const std::string& path)
{
    try
    {
        auto lyt = load_layout(path);
        const auto v = validate_layout(lyt);
        if (!v)
        {
            std::string msg = path + ": invalid layout";
            for (const auto& s : v.violations)
            {
                msg += "\n  " + s;
            }
            throw usage_error(msg);
        }
        return lyt;
    }
    catch (const layout_error& e)
    {
        throw usage_error(e.what());
    }
}

unsigned worker_threads()
{
    try
    {
        return threads_from_environment();
    }
    catch (const std::invalid_argument& e)
    {
        throw usage_error(e.what());
    }
}

void warn_convergence(const trace& tr)
{
    const auto bad = tr.unconverged_samples();
    if (!bad.empty())
    {
        std::cerr << "warning: " << bad.size() << " of " << tr.sample_count()
                  << " samples did not converge (first at sample " << bad.front() << ")\n";
    }
}

// Writes to `path`, or stdout when the path is empty or "-".
template <typename Fn>
void write_output(const std::string& path, Fn&& fn)
{
    if (path.empty() || path == "-")
    {
        fn(std::cout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
        throw usage_error("cannot write " + path);
    }
    fn(out);
}

std::vector<input_vector> stimulus_for(const layout& lyt, const std::string& vector_path, bool exhaustive)
{
    if (exhaustive == !vector_path.empty())
    {
        throw usage_error("give either a vector file or --exhaustive");
    }
    try
    {
        return exhaustive ? exhaustive_vectors(lyt) : load_vectors(vector_path, lyt);
    }
    catch (const table_error& e)
    {
        throw usage_error(e.what());
    }
    catch (const std::invalid_argument& e)
    {
        throw usage_error(e.what());
    }
}

int run_simulate(const std::string& layout_path, const std::string& vector_path, bool exhaustive,
                 const std::string& out_path, const sim_overrides& ov)
{
    const auto lyt = read_layout(layout_path);
    const auto cfg = ov.build();
    const auto vectors = stimulus_for(lyt, vector_path, exhaustive);
    const auto tr = simulate(lyt, vectors, cfg, worker_threads());
    warn_convergence(tr);
    write_output(out_path, [&](std::ostream& os) { write_trace_csv(os, tr, lyt); });
    return exit_ok;
}

int run_verify(const std::string& layout_path, const std::string& table_path, const std::string& format,
               const sim_overrides& ov)
{
    const auto lyt = read_layout(layout_path);
    const auto cfg = ov.build();
    truth_table table{};
    try
    {
        table = load_truth_table(table_path);
    }
    catch (const table_error& e)
    {
        throw usage_error(table_path + ": " + e.what());
    }
    verification_report report{};
    try
    {
        report = check_truth_table(lyt, table, cfg, worker_threads());
    }
    catch (const table_error& e)
    {
        throw usage_error(e.what());
    }
    if (format == "csv")
    {
        write_report_csv(std::cout, report, table);
    }
    else
    {
        write_report_text(std::cout, report, table);
    }
    if (report.unconverged_samples > 0)
    {
        std::cerr << "warning: " << report.unconverged_samples << " samples did not converge\n";
    }
    return report.passed ? exit_ok : exit_failed;
}

std::string two_decimals(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

int run_metrics(const std::string& layout_path)
{
    const auto lyt = read_layout(layout_path);
    if (lyt.cells.empty())
    {
        throw usage_error("empty layout");
    }
    const auto m = compute_metrics(lyt);
    std::cout << "cells: " << m.cell_count << ", area: " << two_decimals(rounded_area(m.area_um2))
              << " µm², phases: " << m.clock_phases;
    if (m.has_set_reset)
    {
        std::cout << ", S/R: yes";
    }
    std::cout << '\n';
    char raw[32];
    std::snprintf(raw, sizeof raw, "%.6f", m.area_um2);
    std::cout << "raw area: " << raw << " µm²\n";
    for (const auto& in : lyt.inputs)
    {
        for (const auto& out : lyt.outputs)
        {
            std::cout << in << " -> " << out << ": ";
            try
            {
                std::cout << clock_phase_latency(lyt, in, out) << " phases\n";
            }
            catch (const layout_error&)
            {
                std::cout << "disconnected\n";
            }
        }
    }
    return exit_ok;
}

// Polarizations of one sample from a trace CSV written by `simulate`.
std::vector<double> read_trace_sample(const std::string& path, const layout& lyt, std::size_t sample)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw usage_error("no such trace: " + path);
    }
    std::string line{};
    if (!std::getline(in, line))
    {
        throw usage_error(path + ": empty trace");
    }
    const auto split = [](const std::string& s)
    {
        std::vector<std::string> out{};
        std::stringstream ss(s);
        std::string field{};
        while (std::getline(ss, field, ','))
        {
            out.push_back(field);
        }
        return out;
    };
    const auto header = split(line);
    constexpr std::size_t leading = 2 + clock_zone_count;
    if (header.size() != leading + lyt.cells.size())
    {
        throw usage_error(path + ": trace does not match the layout");
    }
    std::size_t count = 0;
    while (std::getline(in, line))
    {
        if (count++ != sample)
        {
            continue;
        }
        const auto fields = split(line);
        if (fields.size() != header.size())
        {
            throw usage_error(path + ": malformed row for sample " + std::to_string(sample));
        }
        std::vector<double> p{};
        for (std::size_t i = leading; i < fields.size(); ++i)
        {
            p.push_back(std::strtod(fields[i].c_str(), nullptr));
        }
        return p;
    }
    throw usage_error("sample " + std::to_string(sample) + " out of range (trace has " + std::to_string(count) +
                      " samples)");
}

int run_render(const std::string& layout_path, const std::string& out_path, const std::string& trace_path,
               std::optional<std::size_t> sample)
{
    const auto lyt = read_layout(layout_path);
    if (lyt.cells.empty())
    {
        throw usage_error("empty layout");
    }
    if (sample.has_value() != !trace_path.empty())
    {
        throw usage_error("--trace and --sample go together");
    }
    std::optional<std::vector<double>> pols{};
    if (sample)
    {
        pols = read_trace_sample(trace_path, lyt, *sample);
    }
    write_output(out_path,
                 [&](std::ostream& os)
                 {
                     if (pols)
                     {
                         write_svg(os, lyt, std::span<const double>(*pols));
                     }
                     else
                     {
                         write_svg(os, lyt);
                     }
                 });
    return exit_ok;
}

int run_compare(const std::string& latch_path, const std::string& flipflop_path, const std::string& format)
{
    const auto latch = read_layout(latch_path);
    const auto flipflop = read_layout(flipflop_path);
    const auto report = compare_with_references(latch, flipflop);
    if (format == "csv")
    {
        write_comparison_csv(std::cout, report);
    }
    else
    {
        write_comparison_text(std::cout, report);
    }
    return report.matches_published() ? exit_ok : exit_failed;
}

std::string default_circuits_dir()
{
    if (const char* env = std::getenv("QCAFORGE_CIRCUITS_DIR"); env != nullptr && *env != '\0')
    {
        return env;
    }
    return QCAFORGE_CIRCUITS_DIR;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"QCA cell-level simulation and verification"};
    app.require_subcommand(1);

    sim_overrides sim_ov{};
    std::string sim_layout{};
    std::string sim_vectors{};
    std::string sim_out{};
    bool sim_exhaustive = false;
    auto* sim = app.add_subcommand("simulate", "Simulate a layout and write the trace as CSV");
    sim->add_option("layout", sim_layout, "Layout file")->required();
    sim->add_option("vectors", sim_vectors, "Vector file (header of input labels, then 0/1 rows)");
    sim->add_flag("--exhaustive", sim_exhaustive, "Apply every input assignment once");
    sim->add_option("-o,--output", sim_out, "Trace CSV (default stdout)");
    sim_ov.attach(*sim);

    sim_overrides ver_ov{};
    std::string ver_layout{};
    std::string ver_table{};
    std::string ver_format{"text"};
    auto* ver = app.add_subcommand("verify", "Check a layout against a truth table");
    ver->add_option("layout", ver_layout, "Layout file")->required();
    ver->add_option("table", ver_table, "Truth-table file")->required();
    ver->add_option("--format", ver_format, "Report format")->check(CLI::IsMember({"text", "csv"}));
    ver_ov.attach(*ver);

    std::string met_layout{};
    auto* met = app.add_subcommand("metrics", "Cell count, area and clock-phase latency");
    met->add_option("layout", met_layout, "Layout file")->required();

    std::string ren_layout{};
    std::string ren_out{};
    std::string ren_trace{};
    std::optional<std::size_t> ren_sample{};
    auto* ren = app.add_subcommand("render", "Draw a layout as SVG");
    ren->add_option("layout", ren_layout, "Layout file")->required();
    ren->add_option("-o,--output", ren_out, "SVG file (default stdout)");
    ren->add_option("--trace", ren_trace, "Trace CSV from simulate, to colour cells by polarization");
    ren->add_option("--sample", ren_sample, "Sample index within the trace");

    const auto circuits = default_circuits_dir();
    std::string cmp_latch = circuits + "/d_latch.qcaforge";
    std::string cmp_ff = circuits + "/d_flipflop_sr.qcaforge";
    std::string cmp_format{"text"};
    auto* cmp = app.add_subcommand("compare", "Regenerate the latch and flip-flop comparison tables");
    cmp->add_option("--latch", cmp_latch, "Latch layout")->capture_default_str();
    cmp->add_option("--flipflop", cmp_ff, "Flip-flop layout")->capture_default_str();
    cmp->add_option("--format", cmp_format, "Output format")->check(CLI::IsMember({"text", "csv"}));

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try
    {
        if (*sim)
        {
            return run_simulate(sim_layout, sim_vectors, sim_exhaustive, sim_out, sim_ov);
        }
        if (*ver)
        {
            return run_verify(ver_layout, ver_table, ver_format, ver_ov);
        }
        if (*met)
        {
            return run_metrics(met_layout);
        }
        if (*ren)
        {
            return run_render(ren_layout, ren_out, ren_trace, ren_sample);
        }
        if (*cmp)
        {
            return run_compare(cmp_latch, cmp_ff, cmp_format);
        }
    }
    catch (const usage_error& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    }
    return exit_usage;
}
