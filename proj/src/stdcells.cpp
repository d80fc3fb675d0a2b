#include "qcaforge/stdcells.hpp"

#include <functional>
#include <stdexcept>

namespace qcaforge
{

layout layout_from_grid(std::string name, const std::vector<std::string_view>& rows)
{
    layout lyt{};
    lyt.name = std::move(name);
    for (std::size_t y = 0; y < rows.size(); ++y)
    {
        const auto row = rows[y];
        std::size_t x = 0;
        std::size_t i = 0;
        while (i < row.size())
        {
            while (i < row.size() && row[i] == ' ')
            {
                ++i;
            }
            if (i == row.size())
            {
                break;
            }
            auto end = row.find(' ', i);
            if (end == std::string_view::npos)
            {
                end = row.size();
            }
            const auto tok = row.substr(i, end - i);
            i = end;
            const auto px = static_cast<std::int64_t>(x++) * grid_pitch_nm;
            const auto py = static_cast<std::int64_t>(y) * grid_pitch_nm;
            if (tok == ".")
            {
                continue;
            }
            if (tok.size() < 2 || tok[1] < '0' || tok[1] > '3')
            {
                throw std::invalid_argument("bad grid token '" + std::string{tok} + "'");
            }
            const int zone = tok[1] - '0';
            switch (tok[0])
            {
                case 'n': lyt.add(cell::make_normal(px, py, zone)); break;
                case 'p': lyt.add(cell::make_fixed(px, py, zone, 1.0)); break;
                case 'm': lyt.add(cell::make_fixed(px, py, zone, -1.0)); break;
                case 'i':
                case 'o':
                {
                    if (tok.size() < 4 || tok[2] != ':')
                    {
                        throw std::invalid_argument("bad grid token '" + std::string{tok} + "'");
                    }
                    std::string label{tok.substr(3)};
                    lyt.add(tok[0] == 'i' ? cell::make_input(px, py, zone, std::move(label))
                                          : cell::make_output(px, py, zone, std::move(label)));
                    break;
                }
                default: throw std::invalid_argument("bad grid token '" + std::string{tok} + "'");
            }
        }
    }
    return lyt;
}

namespace
{

bool maj3(bool a, bool b, bool c)
{
    return (a && b) || (b && c) || (a && c);
}

circuit combinational(layout lyt, std::vector<std::string> inputs,
                      const std::function<bool(const std::vector<bool>&)>& fn)
{
    circuit c{};
    c.expected_table = combinational_table(std::move(inputs), "out", fn);
    c.lyt = std::move(lyt);
    return c;
}

circuit gate_with_fixed(std::string name, std::string_view fixed_token, bool is_and)
{
    const std::string north{fixed_token};
    auto lyt = layout_from_grid(std::move(name), {". " + north + " .", "i0:a n0 o0:out", ". i0:b ."});
    return combinational(std::move(lyt), {"a", "b"},
                         [is_and](const std::vector<bool>& v) { return is_and ? v[0] && v[1] : v[0] || v[1]; });
}

truth_table parse_builtin_table(std::string_view text)
{
    return parse_truth_table(text);
}

// Latch, transparent while clk = 1. Q is held by the zone 3 -> 0 feedback below the evaluation cell.
constexpr std::string_view latch_rows[] = {
        "n2 m0 i0:D . .",
        ". n0 . . .",
        "i0:clk . n1 o2:Out n0",
        ". n3 n0 n3 .",
        "p0 . n0 . .",
};

// Master-slave flip-flop: two copies of the latch share the clock cell. The master (left, fixed
// polarities swapped) is transparent while clk = 0; its output runs round the top and enters the slave
// from above through a zone 1 segment. P and S meet the slave output in a majority stage.
constexpr std::string_view flipflop_sr_rows[] = {
        ". . . . . . . . n0 n0 n1",
        ". . n3 n3 n3 n0 n0 n0 n0 . n1",
        ". . n3 . . . . . . . n1",
        "n2 n3 n3 . i2:D . . . . . n1",
        "n2 . . . n3 p0 n2 . n2 m0 n3 . . . . i1:P",
        "n2 n2 n2 n2 . n0 . . . n0 . n2 n2 n2 n2 n2 o2:Out",
        ". . n0 n2 n1 . n3 i2:clk n3 . n1 n2 n0 . . i1:S",
        ". . . n3 n0 n3 . . . n3 n0 n3",
        ". . . . n0 . m0 . p0 . n0",
};

// Same core without the set/reset stage; the slave latch drives the output directly.
constexpr std::string_view flipflop_pos_rows[] = {
        ". . . . . . . . n0 n0 n1",
        ". . n3 n3 n3 n0 n0 n0 n0 . n1",
        ". . n3 . . . . . . . n1",
        "n2 n3 n3 . i2:D . . . . . n1",
        "n2 . . . n3 p0 n2 . n2 m0 n3",
        "n2 n2 n2 n2 . n0 . . . n0",
        ". . n0 n2 n1 . n3 i2:clk n3 . n1 o2:Out n0",
        ". . . n3 n0 n3 . . . n3 n0 n3",
        ". . . . n0 . m0 . p0 . n0",
};

// Every fixed polarity flipped: the master now opens on clk = 1 and the slave on clk = 0.
constexpr std::string_view flipflop_neg_rows[] = {
        ". . . . . . . . n0 n0 n1",
        ". . n3 n3 n3 n0 n0 n0 n0 . n1",
        ". . n3 . . . . . . . n1",
        "n2 n3 n3 . i2:D . . . . . n1",
        "n2 . . . n3 m0 n2 . n2 p0 n3",
        "n2 n2 n2 n2 . n0 . . . n0",
        ". . n0 n2 n1 . n3 i2:clk n3 . n1 o2:Out n0",
        ". . . n3 n0 n3 . . . n3 n0 n3",
        ". . . . n0 . p0 . m0 . n0",
};

constexpr std::string_view mux_rows[] = {
        ". . n1 .",
        ". . p1 .",
        "p1 n1 i0:b n1",
        ". o0:out n1 i0:a",
        "n0 n2 i0:s .",
};

constexpr std::string_view latch_table_text = R"(qcaforge-table v1
inputs D clk
clock clk
output Out
0 1 -> 0
1 1 -> 1
x 0 -> hold
)";

constexpr std::string_view flipflop_sr_table_text = R"(qcaforge-table v1
inputs P S clk D
clock clk
output Out
0 0 x x -> 0
1 1 x x -> 1
0 1 01 0 -> 0
1 0 01 1 -> 1
0 1 10 x -> hold
1 0 10 x -> hold
)";

constexpr std::string_view flipflop_pos_table_text = R"(qcaforge-table v1
inputs clk D
clock clk
output Out
01 0 -> 0
01 1 -> 1
10 x -> hold
0 x -> hold
1 x -> hold
)";

constexpr std::string_view flipflop_neg_table_text = R"(qcaforge-table v1
inputs clk D
clock clk
output Out
10 0 -> 0
10 1 -> 1
01 x -> hold
0 x -> hold
1 x -> hold
)";

template <std::size_t N>
std::vector<std::string_view> rows_of(const std::string_view (&rows)[N])
{
    return {rows, rows + N};
}

}  // namespace

circuit majority_gate()
{
    auto lyt = layout_from_grid("majority", {". i0:b .", "i0:a n0 o0:out", ". i0:c ."});
    return combinational(std::move(lyt), {"a", "b", "c"},
                         [](const std::vector<bool>& v) { return maj3(v[0], v[1], v[2]); });
}

circuit and_gate()
{
    return gate_with_fixed("and", "m0", true);
}

circuit or_gate()
{
    return gate_with_fixed("or", "p0", false);
}

circuit inverter(inverter_style style)
{
    layout lyt{};
    if (style == inverter_style::corner)
    {
        lyt = layout_from_grid("inverter_corner", {"i0:a n0 n0 . .", ". . . n1 o1:out"});
    }
    else
    {
        lyt = layout_from_grid("inverter_symmetric",
                               {". n0 n0 . . .", "i0:a n0 . n1 n1 o1:out", ". n0 n0 . . ."});
    }
    return combinational(std::move(lyt), {"a"}, [](const std::vector<bool>& v) { return !v[0]; });
}

circuit wire(std::size_t n, const std::vector<int>& zone_plan)
{
    if (n < 2)
    {
        throw std::invalid_argument("a wire needs at least 2 cells");
    }
    if (zone_plan.size() != n)
    {
        throw std::invalid_argument("zone plan length must equal the wire length");
    }
    for (std::size_t i = 0; i < n; ++i)
    {
        if (zone_plan[i] < 0 || zone_plan[i] >= clock_zone_count)
        {
            throw std::invalid_argument("invalid zone ordering");
        }
        if (i > 0 && zone_plan[i] != zone_plan[i - 1] && zone_plan[i] != (zone_plan[i - 1] + 1) % clock_zone_count)
        {
            throw std::invalid_argument("invalid zone ordering");
        }
    }
    layout lyt{};
    lyt.name = "wire" + std::to_string(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        const auto x = static_cast<std::int64_t>(i) * grid_pitch_nm;
        if (i == 0)
        {
            lyt.add(cell::make_input(x, 0, zone_plan[i], "a"));
        }
        else if (i + 1 == n)
        {
            lyt.add(cell::make_output(x, 0, zone_plan[i], "out"));
        }
        else
        {
            lyt.add(cell::make_normal(x, 0, zone_plan[i]));
        }
    }
    return combinational(std::move(lyt), {"a"}, [](const std::vector<bool>& v) { return v[0]; });
}

std::vector<int> spread_zone_plan(std::size_t n, int zones)
{
    if (n < 2 || zones < 1 || zones > clock_zone_count || static_cast<std::size_t>(zones) > n)
    {
        throw std::invalid_argument("cannot spread the wire over that many zones");
    }
    if (zones == 1)
    {
        return std::vector<int>(n, 0);
    }
    std::vector<int> plan{0};
    const auto rest = n - 1;
    const auto segments = static_cast<std::size_t>(zones - 1);
    for (std::size_t s = 0; s < segments; ++s)
    {
        const auto len = rest / segments + (s >= segments - rest % segments ? 1 : 0);
        plan.insert(plan.end(), len, static_cast<int>(s) + 1);
    }
    return plan;
}

circuit mux2to1()
{
    auto lyt = layout_from_grid("mux2to1", rows_of(mux_rows));
    circuit c{};
    c.expected_table = combinational_table({"a", "b", "s"}, "out",
                                           [](const std::vector<bool>& v) { return v[2] ? v[1] : v[0]; });
    c.lyt = std::move(lyt);
    return c;
}

circuit d_latch()
{
    circuit c{};
    c.lyt = layout_from_grid("d_latch", rows_of(latch_rows));
    c.expected_table = parse_builtin_table(latch_table_text);
    c.reported_metrics = metrics_report{13, 0.01, 3, false};
    return c;
}

circuit d_flipflop(clock_edge edge)
{
    circuit c{};
    if (edge == clock_edge::positive)
    {
        c.lyt = layout_from_grid("d_flipflop_pos", rows_of(flipflop_pos_rows));
        c.expected_table = parse_builtin_table(flipflop_pos_table_text);
    }
    else
    {
        c.lyt = layout_from_grid("d_flipflop_neg", rows_of(flipflop_neg_rows));
        c.expected_table = parse_builtin_table(flipflop_neg_table_text);
    }
    return c;
}

circuit d_flipflop_sr()
{
    circuit c{};
    c.lyt = layout_from_grid("d_flipflop_sr", rows_of(flipflop_sr_rows));
    c.expected_table = flipflop_sr_table();
    c.reported_metrics = metrics_report{35, 0.03, 8, true};
    return c;
}

truth_table flipflop_sr_table()
{
    return parse_builtin_table(flipflop_sr_table_text);
}

std::vector<named_circuit> bundled_circuits()
{
    std::vector<named_circuit> all{};
    all.push_back({"majority", majority_gate()});
    all.push_back({"and", and_gate()});
    all.push_back({"or", or_gate()});
    all.push_back({"inverter_corner", inverter(inverter_style::corner)});
    all.push_back({"inverter_symmetric", inverter(inverter_style::symmetric)});
    all.push_back({"wire8", wire(8, spread_zone_plan(8, 4))});
    all.push_back({"mux2to1", mux2to1()});
    all.push_back({"d_latch", d_latch()});
    all.push_back({"d_flipflop_pos", d_flipflop(clock_edge::positive)});
    all.push_back({"d_flipflop_neg", d_flipflop(clock_edge::negative)});
    all.push_back({"d_flipflop_sr", d_flipflop_sr()});
    return all;
}

std::optional<circuit> find_bundled(std::string_view name)
{
    for (auto& n : bundled_circuits())
    {
        if (n.name == name)
        {
            return std::move(n.c);
        }
    }
    return std::nullopt;
}

}  // namespace qcaforge
