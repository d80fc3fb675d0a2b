#include "qcaforge/layout.hpp"
#include "qcaforge/stdcells.hpp"

#include <doctest.h>

#include <cmath>

using namespace qcaforge;

namespace
{

bool mentions(const validation_result& r, std::string_view needle)
{
    for (const auto& v : r.violations)
    {
        if (v.find(needle) != std::string::npos)
        {
            return true;
        }
    }
    return false;
}

layout horizontal_wire(int n, int zone = 0)
{
    layout l{};
    for (int i = 0; i < n; ++i)
    {
        const std::int64_t x = 20 * i;
        if (i == 0)
        {
            l.add(cell::make_input(x, 0, zone, "a"));
        }
        else if (i == n - 1)
        {
            l.add(cell::make_output(x, 0, zone, "out"));
        }
        else
        {
            l.add(cell::make_normal(x, 0, zone));
        }
    }
    return l;
}

}  // namespace

TEST_CASE("majority gate layout is valid and has five cells")
{
    const auto maj = majority_gate().lyt;
    CHECK(validate_layout(maj).ok());
    CHECK(cell_count(maj) == 5);
}

TEST_CASE("validation reports every violation")
{
    SUBCASE("duplicate position")
    {
        layout l{};
        l.add(cell::make_normal(0, 0, 0)).add(cell::make_output(0, 0, 0, "o"));
        const auto r = validate_layout(l);
        CHECK_FALSE(r.ok());
        CHECK(mentions(r, "duplicate position"));
    }
    SUBCASE("off-grid centre")
    {
        layout l{};
        l.add(cell::make_normal(30, 0, 0)).add(cell::make_output(40, 0, 0, "o"));
        const auto r = validate_layout(l);
        CHECK(mentions(r, "off-grid"));
    }
    SUBCASE("dangling label")
    {
        layout l{};
        l.add(cell::make_output(0, 0, 0, "o"));
        l.inputs.push_back("ghost");
        CHECK(mentions(validate_layout(l), "dangling"));
    }
    SUBCASE("missing output")
    {
        layout l{};
        l.add(cell::make_input(0, 0, 0, "a"));
        CHECK(mentions(validate_layout(l), "missing output"));
    }
    SUBCASE("several at once")
    {
        layout l{};
        l.add(cell::make_normal(0, 0, 0)).add(cell::make_normal(0, 0, 0)).add(cell::make_normal(5, 0, 0));
        const auto r = validate_layout(l);
        CHECK(r.violations.size() >= 3);
    }
    SUBCASE("fixed cell polarization")
    {
        layout l{};
        l.add(cell::make_fixed(0, 0, 0, 0.5)).add(cell::make_output(20, 0, 0, "o"));
        CHECK(mentions(validate_layout(l), "exactly +1 or -1"));
    }
}

TEST_CASE("cell count")
{
    CHECK(cell_count(layout{}) == 0);
    CHECK(cell_count(horizontal_wire(7)) == 7);
}

TEST_CASE("bounding area")
{
    layout one{};
    one.add(cell::make_output(0, 0, 0, "o"));
    CHECK(bounding_area(one) == doctest::Approx(18.0 * 18.0 * 1e-6).epsilon(1e-12));
    CHECK(bounding_area(one) == doctest::Approx(0.000324));

    // (4 x 20 + 18) x 18 nm^2
    CHECK(bounding_area(horizontal_wire(5)) == doctest::Approx(0.001764).epsilon(1e-12));

    CHECK_THROWS_WITH_AS(bounding_area(layout{}), "empty layout", layout_error);

    CHECK(rounded_area(0.009604) == doctest::Approx(0.01));
    CHECK(rounded_area(0.0249) == doctest::Approx(0.02));
    CHECK(rounded_area(0.0317) == doctest::Approx(0.03));
}

TEST_CASE("metrics are invariant under translation and rotation")
{
    for (const auto& [name, c] : bundled_circuits())
    {
        CAPTURE(name);
        const auto& l = c.lyt;
        const auto base = compute_metrics(l);
        for (const auto& [dx, dy] : {std::pair{20, 0}, {-40, 60}, {1000, -2000}})
        {
            const auto moved = l.translated(dx, dy);
            CHECK(cell_count(moved) == base.cell_count);
            CHECK(bounding_area(moved) == doctest::Approx(base.area_um2).epsilon(1e-12));
            CHECK(compute_metrics(moved).clock_phases == base.clock_phases);
        }
        const auto turned = l.rotated_90();
        CHECK(bounding_area(turned) == doctest::Approx(base.area_um2).epsilon(1e-12));
        CHECK(bounding_area(turned.rotated_90().rotated_90().rotated_90()) ==
              doctest::Approx(base.area_um2).epsilon(1e-12));
        CHECK(bounding_area(l) >= single_cell_area_um2);
    }
}

TEST_CASE("clock phase latency")
{
    CHECK(clock_phase_latency(horizontal_wire(6), "a", "out") == 1);
    CHECK(clock_phase_latency(wire(4, {0, 0, 1, 1}).lyt, "a", "out") == 2);
    CHECK(clock_phase_latency(wire(8, {0, 1, 1, 2, 2, 3, 3, 0}).lyt, "a", "out") == 5);

    // Skipping a zone costs both transitions.
    layout skip{};
    skip.add(cell::make_input(0, 0, 1, "a")).add(cell::make_normal(20, 0, 1)).add(cell::make_output(40, 0, 3, "out"));
    CHECK(clock_phase_latency(skip, "a", "out") == 3);

    layout gap{};
    gap.add(cell::make_input(0, 0, 0, "a")).add(cell::make_output(100, 0, 0, "out"));
    CHECK_THROWS_AS(static_cast<void>(clock_phase_latency(gap, "a", "out")), layout_error);

    // A step backwards in zone order is not a valid path.
    layout back{};
    back.add(cell::make_input(0, 0, 1, "a")).add(cell::make_output(20, 0, 0, "out"));
    CHECK_THROWS_AS(static_cast<void>(clock_phase_latency(back, "a", "out")), layout_error);

    CHECK_THROWS_AS(static_cast<void>(clock_phase_latency(gap, "nope", "out")), layout_error);
}

TEST_CASE("text format round trip")
{
    for (const auto& [name, c] : bundled_circuits())
    {
        CAPTURE(name);
        const auto text = serialize_layout(c.lyt);
        const auto back = parse_layout(text);
        CHECK(back == c.lyt);
        CHECK(serialize_layout(back) == text);
    }
}

TEST_CASE("text format errors carry line numbers")
{
    CHECK_THROWS_WITH_AS(parse_layout("hello\n"), doctest::Contains("line 1"), layout_error);
    CHECK_THROWS_WITH_AS(parse_layout("qcaforge-layout v1\nname x\ncell 0 0 7 normal\n"),
                         doctest::Contains("line 3"), layout_error);
    CHECK_THROWS_WITH_AS(parse_layout("qcaforge-layout v1\nwidget 1\n"), doctest::Contains("unknown keyword"),
                         layout_error);
    CHECK_THROWS_WITH_AS(parse_layout("qcaforge-layout v1\ncell 0 0 0 blob\n"), doctest::Contains("line 2"),
                         layout_error);

    const auto l = parse_layout("# comment\nqcaforge-layout v1\n\nname demo  # trailing\n"
                                "cell 0 0 0 input:a\ncell 20 0 1 output:b\ncell 0 20 0 fixed:-1\n");
    CHECK(l.name == "demo");
    CHECK(l.cells.size() == 3);
    CHECK(l.inputs == std::vector<std::string>{"a"});
    CHECK(l.cells[2].polarization == -1.0);
}

TEST_CASE("load reports missing files")
{
    CHECK_THROWS_WITH_AS(load_layout("/nonexistent/x.qcaforge"), doctest::Contains("no such layout"), layout_error);
}
