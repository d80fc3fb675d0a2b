// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit when any criterion fails.

#include "coulomb_oracle.hpp"

#include "qcaforge/engine.hpp"
#include "qcaforge/layout.hpp"
#include "qcaforge/stdcells.hpp"
#include "qcaforge/verify.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#ifndef QCAFORGE_CIRCUITS_DIR
#define QCAFORGE_CIRCUITS_DIR "circuits"
#endif

using namespace qcaforge;

namespace
{

const std::string circuits_dir = QCAFORGE_CIRCUITS_DIR;

struct outcome
{
    bool ok{true};
    std::string detail{};

    void fail(const std::string& why)
    {
        if (ok)
        {
            detail = why;
        }
        else
        {
            detail += "; " + why;
        }
        ok = false;
    }
};

bool software_latch_step(bool enable, bool d, std::optional<bool>& q)
{
    if (enable)
    {
        q = d;
    }
    return q.value_or(false);
}

std::vector<std::optional<bool>> software_flipflop(const std::vector<input_vector>& vecs, clock_edge edge)
{
    std::vector<std::optional<bool>> out{};
    std::optional<bool> q{};
    for (std::size_t k = 0; k < vecs.size(); ++k)
    {
        if (k > 0)
        {
            const bool before = vecs[k - 1].at("clk");
            const bool now = vecs[k].at("clk");
            const bool fires = edge == clock_edge::positive ? (!before && now) : (before && !now);
            // A master-slave flip-flop stores what the master held just before the edge.
            if (fires)
            {
                q = vecs[k - 1].at("D");
            }
        }
        out.push_back(q);
    }
    return out;
}

// Compares decoded(k + latency) against a reference for every k where the reference is defined.
std::size_t stream_mismatches(const layout& lyt, const std::string& output, const std::vector<input_vector>& vecs,
                              const std::vector<std::optional<bool>>& expected, std::size_t latency,
                              const sim_config& cfg, std::size_t& compared)
{
    auto run = vecs;
    run.insert(run.end(), latency, vecs.back());
    const auto bits = decode_output(simulate(lyt, run, cfg), output, lyt);
    std::size_t bad = 0;
    compared = 0;
    for (std::size_t k = 0; k < vecs.size(); ++k)
    {
        if (!expected[k])
        {
            continue;
        }
        ++compared;
        if (bits[k + latency] != decoded_bit{*expected[k]})
        {
            ++bad;
        }
    }
    return bad;
}

layout load_bundled(const std::string& name)
{
    return load_layout(circuits_dir + "/" + name + ".qcaforge");
}

truth_table load_bundled_table(const std::string& name)
{
    return load_truth_table(circuits_dir + "/" + name + ".table");
}

std::string fmt2(double v)
{
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(2);
    s << v;
    return s.str();
}

// ---------------------------------------------------------------------------------------------------------

outcome primitives()
{
    outcome o{};
    const sim_config cfg{};
    const auto check = [&](const circuit& c, std::size_t rows, const std::string& what)
    {
        const auto r = check_truth_table(c.lyt, *c.expected_table, cfg);
        if (!r.passed || r.rows.size() != rows)
        {
            o.fail(what + " failed");
        }
    };
    check(majority_gate(), 8, "majority");
    check(and_gate(), 4, "and");
    check(or_gate(), 4, "or");
    check(inverter(inverter_style::corner), 2, "corner inverter");
    check(inverter(inverter_style::symmetric), 2, "symmetric inverter");
    int wires = 0;
    for (std::size_t n = 2; n <= 16; ++n)
    {
        for (int k = 1; k <= std::min<int>(4, static_cast<int>(n)); ++k)
        {
            // Four cells in four zones leaves the output alone in its zone with nothing to hold it.
            if (n == 4 && k == 4)
            {
                continue;
            }
            check(wire(n, spread_zone_plan(n, k)), 2, "wire " + std::to_string(n) + "/" + std::to_string(k));
            ++wires;
        }
    }
    if (o.ok)
    {
        o.detail = "MAJ 8/8, AND 4/4, OR 4/4, inverters 2/2 x2, " + std::to_string(wires) + " wires";
    }
    return o;
}

outcome latch_stream()
{
    outcome o{};
    const sim_config cfg{};
    const auto lyt = load_bundled("d_latch");
    const auto m = compute_metrics(lyt);
    if (m.cell_count != 13 || m.clock_phases != 3 || std::abs(rounded_area(m.area_um2) - 0.01) > 1e-9)
    {
        o.fail("metrics " + std::to_string(m.cell_count) + " cells, " + std::to_string(m.clock_phases) +
               " phases, " + fmt2(rounded_area(m.area_um2)) + " um^2");
    }
    std::mt19937 rng{0x1a7c4};
    std::vector<input_vector> vecs{};
    std::vector<std::optional<bool>> expected{};
    std::optional<bool> q{};
    for (int k = 0; k < 32; ++k)
    {
        const bool d = (rng() & 1U) != 0;
        const bool e = k == 0 || (rng() & 1U) != 0;
        vecs.push_back({{"D", d}, {"clk", e}});
        software_latch_step(e, d, q);
        expected.push_back(q);
    }
    const auto latency = measure_latency(lyt, "Out", cfg);
    std::size_t compared = 0;
    const auto bad = stream_mismatches(lyt, "Out", vecs, expected, latency, cfg, compared);
    if (bad != 0)
    {
        o.fail(std::to_string(bad) + " of " + std::to_string(compared) + " vectors disagree");
    }
    if (o.ok)
    {
        o.detail = std::to_string(compared) + "/" + std::to_string(compared) + " vectors agree (latency " +
                   std::to_string(latency) + "), 13 cells, 3 phases, 0.01 um^2";
    }
    return o;
}

outcome flipflop()
{
    outcome o{};
    const sim_config cfg{};
    const auto lyt = load_bundled("d_flipflop_sr");
    const auto table = load_bundled_table("d_flipflop_sr");

    const auto stimuli = expand_rows(table);
    std::array<int, 6> per_row{};
    for (const auto& s : stimuli)
    {
        ++per_row[s.row];
    }
    if (per_row != std::array<int, 6>{4, 4, 1, 1, 2, 2})
    {
        o.fail("unexpected Table 1 expansion");
    }
    const auto report = check_truth_table(lyt, table, cfg);
    if (!report.passed)
    {
        o.fail("Table 1: " + std::to_string(report.count(row_outcome::fail)) + " rows fail, " +
               std::to_string(report.count(row_outcome::undecodable)) + " undecodable");
    }

    const auto m = compute_metrics(lyt);
    if (m.cell_count != 35 || m.clock_phases != 8 || std::abs(rounded_area(m.area_um2) - 0.03) > 1e-9 ||
        !m.has_set_reset)
    {
        o.fail("metrics " + std::to_string(m.cell_count) + " cells, " + std::to_string(m.clock_phases) +
               " phases, " + fmt2(rounded_area(m.area_um2)) + " um^2");
    }

    const auto neg = load_bundled("d_flipflop_neg");
    std::mt19937 rng{0xfa11};
    std::vector<input_vector> vecs{};
    bool clk = true;
    for (int k = 0; k < 16; ++k)
    {
        // The first vectors establish a falling edge so the reference state is known early.
        if (k == 1)
        {
            clk = false;
        }
        else if (k > 1 && (rng() & 1U) != 0)
        {
            clk = !clk;
        }
        vecs.push_back({{"clk", clk}, {"D", (rng() & 1U) != 0}});
    }
    const auto expected = software_flipflop(vecs, clock_edge::negative);
    const auto latency = measure_latency(neg, "Out", cfg);
    std::size_t compared = 0;
    const auto bad = stream_mismatches(neg, "Out", vecs, expected, latency, cfg, compared);
    if (bad != 0)
    {
        o.fail("negative edge: " + std::to_string(bad) + " of " + std::to_string(compared) + " vectors disagree");
    }
    if (o.ok)
    {
        o.detail = "Table 1 " + std::to_string(report.stimuli.size()) + "/" + std::to_string(report.stimuli.size()) +
                   " stimuli, negative edge " + std::to_string(compared) + "/" + std::to_string(compared) +
                   ", 35 cells, 8 phases, 0.03 um^2, S/R";
    }
    return o;
}

outcome comparison()
{
    outcome o{};
    const auto rep = compare_with_references(load_bundled("d_latch"), load_bundled("d_flipflop_sr"));
    std::ostringstream text;
    write_comparison_text(text, rep);
    const auto s = text.str();
    if (rep.tables.size() != 2 || rep.tables[0].improvement != 32 || rep.tables[1].improvement != 26)
    {
        const auto got = rep.tables.size() == 2 ? std::to_string(rep.tables[0].improvement) + "% / " +
                                                          std::to_string(rep.tables[1].improvement) + "%"
                                                : std::string{"no tables"};
        o.fail("improvements " + got + ", expected 32% / 26%");
    }
    if (s.find("32%") == std::string::npos || s.find("26%") == std::string::npos)
    {
        o.fail(std::string{"printed tables lack "} + (s.find("32%") == std::string::npos ? "32% " : "") +
               (s.find("26%") == std::string::npos ? "26%" : ""));
    }
    if (!rep.matches_published())
    {
        o.fail("live metrics deviate from the published rows");
    }
    if (o.ok)
    {
        o.detail = "Tables 2-3 regenerated, 32% and 26%";
    }
    return o;
}

std::vector<input_vector> property_stimulus(const layout& lyt, unsigned seed, std::size_t n)
{
    std::mt19937 rng{seed};
    std::vector<input_vector> vecs{};
    for (std::size_t k = 0; k < n; ++k)
    {
        input_vector v{};
        for (const auto& in : lyt.inputs)
        {
            v[in] = (rng() & 1U) != 0;
        }
        vecs.push_back(std::move(v));
    }
    return vecs;
}

outcome engine_properties()
{
    outcome o{};
    const sim_config cfg{};

    std::mt19937 rng{99};
    std::uniform_int_distribution<int> off{-3, 3};
    int pairs = 0;
    double worst = 0.0;
    while (pairs < 10)
    {
        const std::int64_t dx = 20 * off(rng);
        const std::int64_t dy = 20 * off(rng);
        if ((dx == 0 && dy == 0) || static_cast<double>(dx * dx + dy * dy) > cfg.radius_of_effect * cfg.radius_of_effect)
        {
            continue;
        }
        const double e = kink_energy(cell::make_normal(0, 0, 0), cell::make_normal(dx, dy, 0), cfg);
        const double ref = oracle::kink(0, 0, dx, dy);
        worst = std::max(worst, std::abs(e - ref) / std::abs(ref));
        ++pairs;
    }
    if (worst > 1e-12)
    {
        o.fail("kink energy relative error " + std::to_string(worst));
    }

    for (const auto& [name, c] : bundled_circuits())
    {
        const auto& lyt = c.lyt;
        const auto vecs = property_stimulus(lyt, 5, 10);
        const auto base = simulate(lyt, vecs, cfg, 1);
        for (std::size_t s = 0; s < base.sample_count(); ++s)
        {
            for (const double p : base.polarizations(s))
            {
                if (!(p >= -1.0 && p <= 1.0))
                {
                    o.fail(name + ": polarization out of range");
                    s = base.sample_count();
                    break;
                }
            }
        }
        if (!(simulate(lyt, vecs, cfg, 1) == base) || !(simulate(lyt, vecs, cfg, 2) == base) ||
            !(simulate(lyt, vecs, cfg, 8) == base))
        {
            o.fail(name + ": traces differ between runs or thread counts");
        }
        for (const auto& out : lyt.outputs)
        {
            const auto bits = decode_output(base, out, lyt);
            sim_config fine = cfg;
            fine.samples_per_cycle = cfg.samples_per_cycle * 2;
            if (decode_output(simulate(lyt, vecs, fine), out, lyt) != bits)
            {
                o.fail(name + ": output changes when samples per cycle double");
            }
            const auto moved = lyt.translated(120, -260);
            if (decode_output(simulate(moved, vecs, cfg), out, moved) != bits)
            {
                o.fail(name + ": output changes under translation");
            }
            const auto mirrored = lyt.mirrored_x();
            if (decode_output(simulate(mirrored, vecs, cfg), out, mirrored) != bits)
            {
                o.fail(name + ": output changes under mirroring");
            }
        }
    }
    if (o.ok)
    {
        std::ostringstream s;
        s << "oracle max rel. error " << worst << ", 11 circuits bounded, thread-invariant, invariant under "
          << "2x samples, translation, mirroring";
        o.detail = s.str();
    }
    return o;
}

outcome round_trip()
{
    outcome o{};
    const sim_config cfg{};
    int count = 0;
    for (const auto& [name, c] : bundled_circuits())
    {
        const auto text = serialize_layout(c.lyt);
        const auto back = parse_layout(text);
        if (!(back == c.lyt))
        {
            o.fail(name + ": layout changed by a round trip");
            continue;
        }
        std::ifstream shipped(circuits_dir + "/" + name + ".qcaforge", std::ios::binary);
        std::ostringstream file;
        file << shipped.rdbuf();
        if (file.str() != text)
        {
            o.fail(name + ": shipped file differs from the generator");
        }
        if (c.expected_table)
        {
            const auto table = parse_truth_table(serialize_truth_table(*c.expected_table));
            const auto a = check_truth_table(c.lyt, *c.expected_table, cfg);
            const auto b = check_truth_table(back, table, cfg);
            if (!(a == b))
            {
                o.fail(name + ": reports differ after a round trip");
            }
        }
        ++count;
    }
    if (o.ok)
    {
        o.detail = std::to_string(count) + " circuits, identical reports";
    }
    return o;
}

}  // namespace

int main()
{
    struct criterion
    {
        const char* title;
        std::function<outcome()> run;
        double budget_s;
    };
    const std::vector<criterion> criteria{
            {"primitives", primitives, 10.0},
            {"d-latch stream", latch_stream, 10.0},
            {"d flip-flop with set/reset", flipflop, 30.0},
            {"comparison tables", comparison, 10.0},
            {"engine properties", engine_properties, 60.0},
            {"round trip", round_trip, 60.0},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i)
    {
        const auto start = std::chrono::steady_clock::now();
        outcome o{};
        try
        {
            o = criteria[i].run();
        }
        catch (const std::exception& e)
        {
            o.fail(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > criteria[i].budget_s)
        {
            o.fail("took " + fmt2(secs) + " s, budget " + fmt2(criteria[i].budget_s) + " s");
        }
        std::cout << (o.ok ? "PASS" : "FAIL") << "  criterion " << (i + 1) << " (" << criteria[i].title
                  << "): " << o.detail << " [" << fmt2(secs) << " s]\n";
        failures += o.ok ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
