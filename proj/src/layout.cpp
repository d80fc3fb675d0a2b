#include "qcaforge/layout.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <utility>

namespace qcaforge
{

cell cell::make_normal(std::int64_t x, std::int64_t y, int zone)
{
    return cell{x, y, zone, cell_kind::normal, {}, 0.0};
}

cell cell::make_input(std::int64_t x, std::int64_t y, int zone, std::string label)
{
    return cell{x, y, zone, cell_kind::input, std::move(label), 0.0};
}

cell cell::make_output(std::int64_t x, std::int64_t y, int zone, std::string label)
{
    return cell{x, y, zone, cell_kind::output, std::move(label), 0.0};
}

cell cell::make_fixed(std::int64_t x, std::int64_t y, int zone, double polarization)
{
    return cell{x, y, zone, cell_kind::fixed, {}, polarization};
}

layout& layout::add(cell c)
{
    if (c.kind == cell_kind::input)
    {
        inputs.push_back(c.label);
    }
    else if (c.kind == cell_kind::output)
    {
        outputs.push_back(c.label);
    }
    cells.push_back(std::move(c));
    return *this;
}

std::optional<std::size_t> layout::find_label(std::string_view label) const
{
    for (std::size_t i = 0; i < cells.size(); ++i)
    {
        const auto& c = cells[i];
        if ((c.kind == cell_kind::input || c.kind == cell_kind::output) && c.label == label)
        {
            return i;
        }
    }
    return std::nullopt;
}

std::size_t layout::index_of(std::string_view label) const
{
    if (const auto idx = find_label(label))
    {
        return *idx;
    }
    throw layout_error("unknown terminal label '" + std::string(label) + "'");
}

layout layout::translated(std::int64_t dx, std::int64_t dy) const
{
    layout out = *this;
    for (auto& c : out.cells)
    {
        c.x_nm += dx;
        c.y_nm += dy;
    }
    return out;
}

layout layout::mirrored_x() const
{
    layout out = *this;
    for (auto& c : out.cells)
    {
        c.y_nm = -c.y_nm;
    }
    return out;
}

layout layout::rotated_90() const
{
    layout out = *this;
    for (auto& c : out.cells)
    {
        c = cell{-c.y_nm, c.x_nm, c.zone, c.kind, c.label, c.polarization};
    }
    return out;
}

namespace
{

bool on_grid(std::int64_t v) noexcept
{
    return v % grid_pitch_nm == 0;
}

std::string position_string(const cell& c)
{
    return "(" + std::to_string(c.x_nm) + ", " + std::to_string(c.y_nm) + ")";
}

}  // namespace

validation_result validate_layout(const layout& lyt)
{
    validation_result res{};
    auto& v = res.violations;

    std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> seen{};
    std::map<std::string, int> input_cells{};
    std::map<std::string, int> output_cells{};
    bool any_output = false;

    for (std::size_t i = 0; i < lyt.cells.size(); ++i)
    {
        const auto& c = lyt.cells[i];
        const auto key = std::make_pair(c.x_nm, c.y_nm);
        if (const auto it = seen.find(key); it != seen.end())
        {
            v.push_back("duplicate position " + position_string(c) + " (cells " + std::to_string(it->second) +
                        " and " + std::to_string(i) + ")");
        }
        else
        {
            seen.emplace(key, i);
        }
        if (!on_grid(c.x_nm) || !on_grid(c.y_nm))
        {
            v.push_back("off-grid center " + position_string(c) + ": coordinates must be multiples of " +
                        std::to_string(grid_pitch_nm) + " nm");
        }
        if (c.zone < 0 || c.zone >= clock_zone_count)
        {
            v.push_back("invalid clock zone " + std::to_string(c.zone) + " at " + position_string(c));
        }
        switch (c.kind)
        {
            case cell_kind::input:
            case cell_kind::output:
            {
                if (c.label.empty())
                {
                    v.push_back("empty label at " + position_string(c));
                    break;
                }
                auto& counts = c.kind == cell_kind::input ? input_cells : output_cells;
                ++counts[c.label];
                any_output = any_output || c.kind == cell_kind::output;
                break;
            }
            case cell_kind::fixed:
                if (c.polarization != 1.0 && c.polarization != -1.0)
                {
                    v.push_back("fixed cell at " + position_string(c) + " must be polarized exactly +1 or -1");
                }
                break;
            case cell_kind::normal:
                break;
        }
        if (c.polarization < -1.0 || c.polarization > 1.0)
        {
            v.push_back("polarization out of range at " + position_string(c));
        }
    }

    for (const auto& [label, count] : input_cells)
    {
        if (count > 1 || output_cells.contains(label))
        {
            v.push_back("duplicate label '" + label + "'");
        }
    }
    for (const auto& [label, count] : output_cells)
    {
        if (count > 1)
        {
            v.push_back("duplicate label '" + label + "'");
        }
    }

    const auto check_terminals = [&](const std::vector<std::string>& labels,
                                     const std::map<std::string, int>& cells_by_label, const char* what)
    {
        std::set<std::string> listed{};
        for (const auto& label : labels)
        {
            if (!listed.insert(label).second)
            {
                v.push_back(std::string("label '") + label + "' listed twice among " + what);
            }
            if (!cells_by_label.contains(label))
            {
                v.push_back(std::string("dangling ") + what + " label '" + label + "'");
            }
        }
        for (const auto& [label, count] : cells_by_label)
        {
            if (!listed.contains(label))
            {
                v.push_back(std::string("cell label '") + label + "' missing from " + what + " list");
            }
        }
    };
    check_terminals(lyt.inputs, input_cells, "input");
    check_terminals(lyt.outputs, output_cells, "output");

    if (!any_output)
    {
        v.push_back("missing output: layout has no output cell");
    }
    return res;
}

std::size_t cell_count(const layout& lyt) noexcept
{
    return lyt.cells.size();
}

double bounding_area(const layout& lyt)
{
    if (lyt.cells.empty())
    {
        throw layout_error("empty layout");
    }
    auto min_x = std::numeric_limits<std::int64_t>::max();
    auto min_y = min_x;
    auto max_x = std::numeric_limits<std::int64_t>::min();
    auto max_y = max_x;
    for (const auto& c : lyt.cells)
    {
        min_x = std::min(min_x, c.x_nm);
        max_x = std::max(max_x, c.x_nm);
        min_y = std::min(min_y, c.y_nm);
        max_y = std::max(max_y, c.y_nm);
    }
    const auto width = static_cast<double>(max_x - min_x + cell_size_nm);
    const auto height = static_cast<double>(max_y - min_y + cell_size_nm);
    return width * height * 1e-6;
}

double rounded_area(double area_um2)
{
    return std::round(area_um2 * 100.0) / 100.0;
}

int clock_phase_latency(const layout& lyt, std::string_view input, std::string_view output)
{
    const auto src = lyt.index_of(input);
    const auto dst = lyt.index_of(output);
    const auto n = lyt.cells.size();

    const auto adjacent = [&](std::size_t a, std::size_t b)
    {
        const auto dx = std::abs(lyt.cells[a].x_nm - lyt.cells[b].x_nm);
        const auto dy = std::abs(lyt.cells[a].y_nm - lyt.cells[b].y_nm);
        return a != b && dx <= grid_pitch_nm && dy <= grid_pitch_nm;
    };

    // Shortest path over zone transitions: staying in a zone costs nothing, advancing costs one per zone
    // skipped over. A driver two zones ahead is still latched when the receiver switches; three zones
    // ahead is a step backwards.
    constexpr int unreached = std::numeric_limits<int>::max();
    std::vector<int> cost(n, unreached);
    std::array<std::deque<std::size_t>, 3> buckets{};
    cost[src] = 0;
    buckets[0].push_back(src);
    for (int level = 0; std::any_of(buckets.begin(), buckets.end(), [](const auto& b) { return !b.empty(); });
         ++level)
    {
        auto& here = buckets[static_cast<std::size_t>(level) % buckets.size()];
        while (!here.empty())
        {
            const auto cur = here.front();
            here.pop_front();
            if (cost[cur] != level)
            {
                continue;
            }
            const int zc = lyt.cells[cur].zone;
            for (std::size_t nb = 0; nb < n; ++nb)
            {
                if (!adjacent(cur, nb))
                {
                    continue;
                }
                const int step = (lyt.cells[nb].zone - zc + clock_zone_count) % clock_zone_count;
                if (step > 2 || level + step >= cost[nb])
                {
                    continue;
                }
                cost[nb] = level + step;
                buckets[static_cast<std::size_t>(cost[nb]) % buckets.size()].push_back(nb);
            }
        }
    }
    if (cost[dst] == unreached)
    {
        throw layout_error("disconnected: no clocked path from '" + std::string(input) + "' to '" +
                           std::string(output) + "'");
    }
    return 1 + cost[dst];
}

metrics_report compute_metrics(const layout& lyt)
{
    metrics_report m{};
    m.cell_count = cell_count(lyt);
    m.area_um2 = lyt.cells.empty() ? 0.0 : bounding_area(lyt);
    for (const auto& in : lyt.inputs)
    {
        for (const auto& out : lyt.outputs)
        {
            try
            {
                m.clock_phases = std::max(m.clock_phases, clock_phase_latency(lyt, in, out));
            }
            catch (const layout_error&)
            {
                // disconnected pairs do not contribute
            }
        }
    }
    m.has_set_reset = lyt.find_label("P").has_value() && lyt.find_label("S").has_value();
    return m;
}

// ---------------------------------------------------------------------------------------------------------
// text format

namespace
{

constexpr std::string_view layout_magic = "qcaforge-layout v1";

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& msg)
{
    throw layout_error("line " + std::to_string(line_no) + ": " + msg);
}

std::vector<std::string> split_ws(std::string_view line)
{
    std::vector<std::string> tokens{};
    std::istringstream ss{std::string(line)};
    std::string tok;
    while (ss >> tok)
    {
        tokens.push_back(tok);
    }
    return tokens;
}

std::string_view strip_comment(std::string_view line)
{
    if (const auto pos = line.find('#'); pos != std::string_view::npos)
    {
        line = line.substr(0, pos);
    }
    return line;
}

std::int64_t parse_int(const std::string& tok, std::size_t line_no, const char* what)
{
    std::int64_t v{};
    const auto* first = tok.data();
    const auto* last = tok.data() + tok.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last)
    {
        parse_fail(line_no, std::string("invalid ") + what + " '" + tok + "'");
    }
    return v;
}

}  // namespace

layout parse_layout(std::string_view text)
{
    layout lyt{};
    bool have_magic = false;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw))
    {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r')
        {
            raw.pop_back();
        }
        const auto tokens = split_ws(strip_comment(raw));
        if (tokens.empty())
        {
            continue;
        }
        if (!have_magic)
        {
            if (tokens.size() != 2 || tokens[0] + " " + tokens[1] != layout_magic)
            {
                parse_fail(line_no, "expected header '" + std::string(layout_magic) + "'");
            }
            have_magic = true;
            continue;
        }
        const auto& kw = tokens[0];
        if (kw == "name")
        {
            if (tokens.size() < 2)
            {
                parse_fail(line_no, "name requires a value");
            }
            std::string name = tokens[1];
            for (std::size_t i = 2; i < tokens.size(); ++i)
            {
                name += " " + tokens[i];
            }
            lyt.name = name;
        }
        else if (kw == "cell")
        {
            if (tokens.size() != 5)
            {
                parse_fail(line_no, "cell requires: cell <x_nm> <y_nm> <zone> <function>");
            }
            const auto x = parse_int(tokens[1], line_no, "x coordinate");
            const auto y = parse_int(tokens[2], line_no, "y coordinate");
            const auto z = parse_int(tokens[3], line_no, "zone");
            if (z < 0 || z >= clock_zone_count)
            {
                parse_fail(line_no, "zone must be 0-3, got " + tokens[3]);
            }
            const auto zone = static_cast<int>(z);
            const auto& fn = tokens[4];
            if (fn == "normal")
            {
                lyt.add(cell::make_normal(x, y, zone));
            }
            else if (fn == "fixed:+1")
            {
                lyt.add(cell::make_fixed(x, y, zone, 1.0));
            }
            else if (fn == "fixed:-1")
            {
                lyt.add(cell::make_fixed(x, y, zone, -1.0));
            }
            else if (fn.starts_with("input:") && fn.size() > 6)
            {
                lyt.add(cell::make_input(x, y, zone, fn.substr(6)));
            }
            else if (fn.starts_with("output:") && fn.size() > 7)
            {
                lyt.add(cell::make_output(x, y, zone, fn.substr(7)));
            }
            else
            {
                parse_fail(line_no, "unknown cell function '" + fn + "'");
            }
        }
        else
        {
            parse_fail(line_no, "unknown keyword '" + kw + "'");
        }
    }
    if (!have_magic)
    {
        parse_fail(line_no == 0 ? 1 : line_no, "missing header '" + std::string(layout_magic) + "'");
    }
    return lyt;
}

layout load_layout(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
    {
        throw layout_error("no such layout: " + path);
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_layout(ss.str());
}

std::string serialize_layout(const layout& lyt)
{
    std::ostringstream out;
    out << layout_magic << '\n';
    if (!lyt.name.empty())
    {
        out << "name " << lyt.name << '\n';
    }
    for (const auto& c : lyt.cells)
    {
        out << "cell " << c.x_nm << ' ' << c.y_nm << ' ' << c.zone << ' ';
        switch (c.kind)
        {
            case cell_kind::normal: out << "normal"; break;
            case cell_kind::input: out << "input:" << c.label; break;
            case cell_kind::output: out << "output:" << c.label; break;
            case cell_kind::fixed: out << (c.polarization > 0 ? "fixed:+1" : "fixed:-1"); break;
        }
        out << '\n';
    }
    return out.str();
}

void save_layout(const layout& lyt, const std::string& path)
{
    std::ofstream f(path);
    if (!f)
    {
        throw layout_error("cannot write layout: " + path);
    }
    f << serialize_layout(lyt);
}

}  // namespace qcaforge
