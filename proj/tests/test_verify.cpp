#include "qcaforge/stdcells.hpp"
#include "qcaforge/verify.hpp"

#include <doctest.h>

#include <sstream>

using namespace qcaforge;

TEST_CASE("truth table parsing")
{
    const auto t = flipflop_sr_table();
    CHECK(t.inputs == std::vector<std::string>{"P", "S", "clk", "D"});
    CHECK(t.clock == std::optional<std::string>{"clk"});
    CHECK(t.clock_column() == std::optional<std::size_t>{2});
    CHECK(t.output == "Out");
    REQUIRE(t.rows.size() == 6);
    CHECK(t.rows[0].clock == clock_condition::any);
    CHECK(t.rows[2].clock == clock_condition::rising);
    CHECK(t.rows[4].clock == clock_condition::falling);
    CHECK(t.rows[4].expected == expectation::hold);
    CHECK(t.rows[3].values[3] == tri::one);
    CHECK(parse_truth_table(serialize_truth_table(t)) == t);
}

TEST_CASE("truth table errors")
{
    CHECK_THROWS_WITH_AS(parse_truth_table("inputs a\n"), doctest::Contains("line 1"), table_error);
    CHECK_THROWS_WITH_AS(parse_truth_table("qcaforge-table v1\ninputs a b\noutput o\n0 -> 1\n"),
                         doctest::Contains("line 4"), table_error);
    CHECK_THROWS_WITH_AS(parse_truth_table("qcaforge-table v1\ninputs a\noutput o\n0 -> hold\n"),
                         doctest::Contains("clock"), table_error);
    CHECK_THROWS_WITH_AS(parse_truth_table("qcaforge-table v1\ninputs a\noutput o\n2 -> 1\n"),
                         doctest::Contains("bad input value"), table_error);
    CHECK_THROWS_WITH_AS(parse_truth_table("qcaforge-table v1\ninputs a c\nclock c\noutput o\n0 11 -> 1\n"),
                         doctest::Contains("bad clock value"), table_error);
    CHECK_THROWS_AS(parse_truth_table("qcaforge-table v1\ninputs a\n"), table_error);
    CHECK_THROWS_WITH_AS(parse_truth_table("qcaforge-table v1\ninputs a\noutput o\nrow 1\n"),
                         doctest::Contains("unknown keyword"), table_error);
}

TEST_CASE("decoding")
{
    CHECK(decode_polarization(0.95) == decoded_bit{true});
    CHECK(decode_polarization(-0.95) == decoded_bit{false});
    CHECK_FALSE(decode_polarization(0.2).has_value());
    CHECK_FALSE(decode_polarization(0.5).has_value());

    // Raising the threshold never turns a 1 into a 0 directly.
    for (double p = -1.0; p <= 1.0; p += 0.01)
    {
        const auto lo = decode_polarization(p, 0.5);
        const auto hi = decode_polarization(p, 0.8);
        if (hi)
        {
            CHECK(lo == hi);
        }
    }
    CHECK(decode_sample_offset(0, 128) == 63);
    CHECK(decode_sample_offset(3, 128) == 31);

    const auto maj = majority_gate().lyt;
    CHECK_THROWS_AS(static_cast<void>(decode_output(trace{}, "a", maj)), std::invalid_argument);
}

TEST_CASE("row expansion")
{
    SUBCASE("flip-flop table")
    {
        const auto t = flipflop_sr_table();
        const auto s = expand_rows(t);
        std::array<int, 6> per_row{};
        for (const auto& st : s)
        {
            ++per_row[st.row];
        }
        CHECK(per_row == std::array<int, 6>{4, 4, 1, 1, 2, 2});
        for (const auto& st : s)
        {
            const auto& before = st.vectors[st.decision - 1];
            const auto& now = st.vectors[st.decision];
            if (t.rows[st.row].clock == clock_condition::rising)
            {
                CHECK_FALSE(before.at("clk"));
                CHECK(now.at("clk"));
            }
            if (t.rows[st.row].clock == clock_condition::falling)
            {
                CHECK(before.at("clk"));
                CHECK_FALSE(now.at("clk"));
            }
            CHECK(st.decision >= warmup_cycles);
            CHECK(now.size() == 4);
        }
    }
    SUBCASE("empty table")
    {
        truth_table t{};
        t.inputs = {"a"};
        t.output = "o";
        CHECK(expand_rows(t).empty());
    }
    SUBCASE("row without don't-cares")
    {
        const auto t = parse_truth_table("qcaforge-table v1\ninputs c d\nclock c\noutput o\n01 1 -> 1\n");
        CHECK(expand_rows(t).size() == 1);
    }
}

TEST_CASE("combinational checks")
{
    const sim_config cfg{};
    const auto maj = majority_gate();
    const auto good = check_truth_table(maj.lyt, *maj.expected_table, cfg);
    CHECK(good.passed);
    CHECK(good.count(row_outcome::pass) == 8);

    const auto and_table = combinational_table({"a", "b", "c"}, "out",
                                               [](const std::vector<bool>& v) { return v[0] && v[1] && v[2]; });
    const auto bad = check_truth_table(maj.lyt, and_table, cfg);
    CHECK_FALSE(bad.passed);
    REQUIRE(bad.count(row_outcome::fail) == 3);
    std::vector<std::size_t> failing{};
    for (const auto& r : bad.rows)
    {
        if (r.outcome == row_outcome::fail)
        {
            failing.push_back(r.row);
        }
    }
    // Rows 011, 101, 110 in binary counting order.
    CHECK(failing == std::vector<std::size_t>{3, 5, 6});

    std::ostringstream text;
    write_report_text(text, bad, and_table);
    CHECK(text.str().find("verdict: FAIL") != std::string::npos);
    std::ostringstream csv;
    write_report_csv(csv, bad, and_table);
    CHECK(csv.str().rfind("row,inputs,expected,observed,previous,outcome,unconverged\n", 0) == 0);

    const auto inv = inverter(inverter_style::symmetric);
    CHECK(check_truth_table(inv.lyt, *inv.expected_table, cfg).passed);

    CHECK_THROWS_AS(static_cast<void>(check_truth_table(inv.lyt, and_table, cfg)), table_error);
}

TEST_CASE("reports are deterministic")
{
    const sim_config cfg{};
    const auto latch = d_latch();
    const auto a = check_truth_table(latch.lyt, *latch.expected_table, cfg, 1);
    const auto b = check_truth_table(latch.lyt, *latch.expected_table, cfg, 2);
    CHECK(a == b);
    CHECK(a.passed);
}

TEST_CASE("vector files")
{
    const auto maj = majority_gate().lyt;
    const auto v = parse_vectors("# stimulus\na b c\n0 0 1\n1 1 0\n", maj);
    REQUIRE(v.size() == 2);
    CHECK(v[1].at("b"));
    CHECK_THROWS_WITH_AS(parse_vectors("a b x\n", maj), doctest::Contains("unknown input label"), table_error);
    CHECK_THROWS_WITH_AS(parse_vectors("a b\n", maj), doctest::Contains("no column"), table_error);
    CHECK_THROWS_WITH_AS(parse_vectors("a b c\n0 1\n", maj), doctest::Contains("line 2"), table_error);
    CHECK(exhaustive_vectors(maj).size() == 8);
    CHECK(exhaustive_vectors(maj)[1].at("c"));

    layout wide{};
    for (int i = 0; i < 13; ++i)
    {
        wide.add(cell::make_input(20 * i, 0, 0, "i" + std::to_string(i)));
    }
    CHECK_THROWS_WITH_AS(static_cast<void>(exhaustive_vectors(wide)), doctest::Contains("too many inputs"),
                         std::invalid_argument);
}

TEST_CASE("improvement percentages")
{
    CHECK(improvement_percent(19, 13) == 32);
    CHECK(improvement_percent(47, 35) == 26);
    CHECK(improvement_percent(13, 13) == 0);

    std::size_t best_latch = 1000;
    for (const auto& r : latch_references())
    {
        best_latch = std::min(best_latch, r.cell_count);
    }
    std::size_t best_ff = 1000;
    for (const auto& r : flipflop_references())
    {
        best_ff = std::min(best_ff, r.cell_count);
    }
    CHECK(best_latch == 19);
    CHECK(best_ff == 47);
}

TEST_CASE("comparison detects deviations")
{
    auto latch = d_latch().lyt;
    const auto ff = d_flipflop_sr().lyt;
    const auto live = compare_with_references(latch, ff);
    CHECK(live.tables[0].deviations.empty());
    CHECK(live.tables[0].improvement == 32);
    // The bundled flip-flop is larger than the published one and the report says so.
    CHECK_FALSE(live.tables[1].deviations.empty());
    CHECK_FALSE(live.matches_published());

    latch.cells.pop_back();
    const auto rep = compare_with_references(latch, ff);
    CHECK_FALSE(rep.matches_published());
    CHECK_FALSE(rep.tables[0].deviations.empty());
    CHECK(rep.tables[0].improvement == improvement_percent(19, 12));

    std::ostringstream csv;
    write_comparison_csv(csv, rep);
    CHECK(csv.str().find("D Latch in [21]") != std::string::npos);
}
