#include "qcaforge/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

namespace qcaforge
{

namespace
{

std::vector<std::string_view> split_ws(std::string_view line)
{
    std::vector<std::string_view> out{};
    std::size_t i = 0;
    while (i < line.size())
    {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r'))
        {
            ++i;
        }
        const auto start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r')
        {
            ++i;
        }
        if (i > start)
        {
            out.push_back(line.substr(start, i - start));
        }
    }
    return out;
}

[[noreturn]] void fail_at(std::size_t line, const std::string& msg)
{
    throw table_error("line " + std::to_string(line) + ": " + msg);
}

std::string_view clock_token(clock_condition c) noexcept
{
    switch (c)
    {
        case clock_condition::low: return "0";
        case clock_condition::high: return "1";
        case clock_condition::rising: return "01";
        case clock_condition::falling: return "10";
        case clock_condition::any: return "x";
    }
    return "x";
}

std::string_view tri_token(tri t) noexcept
{
    switch (t)
    {
        case tri::zero: return "0";
        case tri::one: return "1";
        case tri::any: return "x";
    }
    return "x";
}

std::string_view expectation_token(expectation e) noexcept
{
    switch (e)
    {
        case expectation::zero: return "0";
        case expectation::one: return "1";
        case expectation::hold: return "hold";
    }
    return "hold";
}

std::string bit_token(const decoded_bit& b)
{
    return b ? (*b ? "1" : "0") : "?";
}

}  // namespace

// ---------------------------------------------------------------------------------------------------------
// tables

std::optional<std::size_t> truth_table::clock_column() const
{
    if (!clock)
    {
        return std::nullopt;
    }
    const auto it = std::find(inputs.begin(), inputs.end(), *clock);
    if (it == inputs.end())
    {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - inputs.begin());
}

truth_table parse_truth_table(std::string_view text)
{
    truth_table table{};
    bool header = false;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size())
    {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos)
        {
            end = text.size();
        }
        auto line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
        {
            line = line.substr(0, hash);
        }
        const auto tok = split_ws(line);
        if (tok.empty())
        {
            if (end == text.size())
            {
                break;
            }
            continue;
        }
        if (!header)
        {
            if (tok.size() != 2 || tok[0] != "qcaforge-table" || tok[1] != "v1")
            {
                fail_at(line_no, "expected header 'qcaforge-table v1'");
            }
            header = true;
            continue;
        }
        if (tok[0] == "inputs")
        {
            if (!table.inputs.empty())
            {
                fail_at(line_no, "inputs declared twice");
            }
            if (tok.size() < 2)
            {
                fail_at(line_no, "inputs needs at least one label");
            }
            for (std::size_t i = 1; i < tok.size(); ++i)
            {
                const std::string label{tok[i]};
                if (std::find(table.inputs.begin(), table.inputs.end(), label) != table.inputs.end())
                {
                    fail_at(line_no, "duplicate input '" + label + "'");
                }
                table.inputs.push_back(label);
            }
        }
        else if (tok[0] == "clock")
        {
            if (tok.size() != 2)
            {
                fail_at(line_no, "clock takes exactly one label");
            }
            table.clock = std::string{tok[1]};
        }
        else if (tok[0] == "output")
        {
            if (tok.size() != 2)
            {
                fail_at(line_no, "output takes exactly one label");
            }
            table.output = std::string{tok[1]};
        }
        else
        {
            const auto arrow = std::find(tok.begin(), tok.end(), std::string_view{"->"});
            if (arrow == tok.end())
            {
                fail_at(line_no, "unknown keyword '" + std::string{tok[0]} + "'");
            }
            if (table.inputs.empty() || table.output.empty())
            {
                fail_at(line_no, "rows must follow the inputs and output declarations");
            }
            const auto clock_col = table.clock_column();
            if (table.clock && !clock_col)
            {
                fail_at(line_no, "clock '" + *table.clock + "' is not an input");
            }
            const auto width = static_cast<std::size_t>(arrow - tok.begin());
            if (width != table.inputs.size())
            {
                fail_at(line_no, "row has " + std::to_string(width) + " values, expected " +
                                     std::to_string(table.inputs.size()));
            }
            if (tok.end() - arrow != 2)
            {
                fail_at(line_no, "expected exactly one value after '->'");
            }
            truth_row row{};
            for (std::size_t c = 0; c < width; ++c)
            {
                const auto v = tok[c];
                if (clock_col && c == *clock_col)
                {
                    row.values.push_back(tri::any);
                    if (v == "0")
                    {
                        row.clock = clock_condition::low;
                    }
                    else if (v == "1")
                    {
                        row.clock = clock_condition::high;
                    }
                    else if (v == "01")
                    {
                        row.clock = clock_condition::rising;
                    }
                    else if (v == "10")
                    {
                        row.clock = clock_condition::falling;
                    }
                    else if (v == "x" || v == "X")
                    {
                        row.clock = clock_condition::any;
                    }
                    else
                    {
                        fail_at(line_no, "bad clock value '" + std::string{v} + "'");
                    }
                    continue;
                }
                if (v == "0")
                {
                    row.values.push_back(tri::zero);
                }
                else if (v == "1")
                {
                    row.values.push_back(tri::one);
                }
                else if (v == "x" || v == "X")
                {
                    row.values.push_back(tri::any);
                }
                else
                {
                    fail_at(line_no, "bad input value '" + std::string{v} + "'");
                }
            }
            const auto out = *(arrow + 1);
            if (out == "0")
            {
                row.expected = expectation::zero;
            }
            else if (out == "1")
            {
                row.expected = expectation::one;
            }
            else if (out == "hold")
            {
                if (!table.clock)
                {
                    fail_at(line_no, "'hold' needs a clock column");
                }
                row.expected = expectation::hold;
            }
            else
            {
                fail_at(line_no, "bad expected value '" + std::string{out} + "'");
            }
            table.rows.push_back(std::move(row));
        }
        if (end == text.size())
        {
            break;
        }
    }
    if (!header)
    {
        throw table_error("line 1: expected header 'qcaforge-table v1'");
    }
    if (table.inputs.empty())
    {
        throw table_error("table declares no inputs");
    }
    if (table.output.empty())
    {
        throw table_error("table declares no output");
    }
    return table;
}

truth_table load_truth_table(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw table_error("no such table: " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_truth_table(ss.str());
}

std::string serialize_truth_table(const truth_table& table)
{
    std::ostringstream out;
    out << "qcaforge-table v1\ninputs";
    for (const auto& l : table.inputs)
    {
        out << ' ' << l;
    }
    out << '\n';
    if (table.clock)
    {
        out << "clock " << *table.clock << '\n';
    }
    out << "output " << table.output << '\n';
    const auto clock_col = table.clock_column();
    for (const auto& row : table.rows)
    {
        for (std::size_t c = 0; c < row.values.size(); ++c)
        {
            out << (clock_col && c == *clock_col ? clock_token(row.clock) : tri_token(row.values[c])) << ' ';
        }
        out << "-> " << expectation_token(row.expected) << '\n';
    }
    return out.str();
}

truth_table combinational_table(std::vector<std::string> inputs, std::string output,
                                const std::function<bool(const std::vector<bool>&)>& fn)
{
    truth_table t{};
    t.inputs = std::move(inputs);
    t.output = std::move(output);
    const auto n = t.inputs.size();
    for (std::size_t m = 0; m < (std::size_t{1} << n); ++m)
    {
        std::vector<bool> bits(n);
        truth_row row{};
        for (std::size_t c = 0; c < n; ++c)
        {
            bits[c] = ((m >> (n - 1 - c)) & 1U) != 0;
            row.values.push_back(bits[c] ? tri::one : tri::zero);
        }
        row.expected = fn(bits) ? expectation::one : expectation::zero;
        t.rows.push_back(std::move(row));
    }
    return t;
}

// ---------------------------------------------------------------------------------------------------------
// vector files

std::vector<input_vector> parse_vectors(std::string_view text, const layout& lyt)
{
    std::vector<std::string> header{};
    std::vector<input_vector> vectors{};
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size())
    {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos)
        {
            end = text.size();
        }
        auto line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
        {
            line = line.substr(0, hash);
        }
        const auto tok = split_ws(line);
        if (tok.empty())
        {
            continue;
        }
        if (header.empty())
        {
            for (const auto t : tok)
            {
                const std::string label{t};
                const auto idx = lyt.find_label(label);
                if (!idx || lyt.cells[*idx].kind != cell_kind::input)
                {
                    fail_at(line_no, "unknown input label '" + label + "'");
                }
                if (std::find(header.begin(), header.end(), label) != header.end())
                {
                    fail_at(line_no, "duplicate input label '" + label + "'");
                }
                header.push_back(label);
            }
            for (const auto& label : lyt.inputs)
            {
                if (std::find(header.begin(), header.end(), label) == header.end())
                {
                    fail_at(line_no, "input '" + label + "' has no column");
                }
            }
            continue;
        }
        if (tok.size() != header.size())
        {
            fail_at(line_no, "expected " + std::to_string(header.size()) + " values, got " +
                                 std::to_string(tok.size()));
        }
        input_vector v{};
        for (std::size_t i = 0; i < tok.size(); ++i)
        {
            if (tok[i] != "0" && tok[i] != "1")
            {
                fail_at(line_no, "bad value '" + std::string{tok[i]} + "'");
            }
            v[header[i]] = tok[i] == "1";
        }
        vectors.push_back(std::move(v));
    }
    if (header.empty() && !lyt.inputs.empty())
    {
        throw table_error("vector file has no header");
    }
    return vectors;
}

std::vector<input_vector> load_vectors(const std::string& path, const layout& lyt)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw table_error("no such vector file: " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_vectors(ss.str(), lyt);
}

std::vector<input_vector> exhaustive_vectors(const layout& lyt)
{
    const auto n = lyt.inputs.size();
    if (n > max_exhaustive_inputs)
    {
        throw std::invalid_argument("too many inputs for exhaustive simulation (" + std::to_string(n) + " > " +
                                    std::to_string(max_exhaustive_inputs) + ")");
    }
    std::vector<input_vector> out{};
    for (std::size_t m = 0; m < (std::size_t{1} << n); ++m)
    {
        input_vector v{};
        for (std::size_t i = 0; i < n; ++i)
        {
            v[lyt.inputs[i]] = ((m >> (n - 1 - i)) & 1U) != 0;
        }
        out.push_back(std::move(v));
    }
    return out;
}

// ---------------------------------------------------------------------------------------------------------
// decoding

decoded_bit decode_polarization(double p, double threshold) noexcept
{
    if (p > threshold)
    {
        return true;
    }
    if (p < -threshold)
    {
        return false;
    }
    return std::nullopt;
}

int decode_sample_offset(int zone, int samples_per_cycle) noexcept
{
    const int quarter = samples_per_cycle / 4;
    const int hold = (zone + 1) % clock_zone_count;
    return hold * quarter + quarter - 1;
}

std::vector<decoded_bit> decode_output(const trace& tr, std::string_view label, const layout& lyt)
{
    const auto idx = lyt.find_label(label);
    if (!idx || lyt.cells[*idx].kind != cell_kind::output)
    {
        throw std::invalid_argument("'" + std::string{label} + "' is not an output");
    }
    const auto spc = static_cast<std::size_t>(tr.samples_per_cycle());
    const auto offset = static_cast<std::size_t>(decode_sample_offset(lyt.cells[*idx].zone, tr.samples_per_cycle()));
    std::vector<decoded_bit> bits{};
    bits.reserve(tr.vector_count());
    for (std::size_t v = 0; v < tr.vector_count(); ++v)
    {
        bits.push_back(decode_polarization(tr.polarization(v * spc + offset, *idx)));
    }
    return bits;
}

// ---------------------------------------------------------------------------------------------------------
// stimulus expansion

std::vector<stimulus> expand_rows(const truth_table& table)
{
    std::vector<stimulus> out{};
    const auto clock_col = table.clock_column();
    for (std::size_t r = 0; r < table.rows.size(); ++r)
    {
        const auto& row = table.rows[r];
        std::vector<std::size_t> free_cols{};
        for (std::size_t c = 0; c < row.values.size(); ++c)
        {
            if ((!clock_col || c != *clock_col) && row.values[c] == tri::any)
            {
                free_cols.push_back(c);
            }
        }
        std::vector<std::pair<bool, bool>> clock_levels{};
        switch (row.clock)
        {
            case clock_condition::low: clock_levels = {{false, false}}; break;
            case clock_condition::high: clock_levels = {{true, true}}; break;
            case clock_condition::rising: clock_levels = {{false, true}}; break;
            case clock_condition::falling: clock_levels = {{true, false}}; break;
            case clock_condition::any: clock_levels = {{false, false}, {true, true}}; break;
        }
        if (!clock_col)
        {
            clock_levels = {{false, false}};
        }
        for (std::size_t m = 0; m < (std::size_t{1} << free_cols.size()); ++m)
        {
            for (const auto& [first, last] : clock_levels)
            {
                input_vector base{};
                for (std::size_t c = 0; c < row.values.size(); ++c)
                {
                    if (clock_col && c == *clock_col)
                    {
                        continue;
                    }
                    bool v = row.values[c] == tri::one;
                    if (row.values[c] == tri::any)
                    {
                        const auto k = static_cast<std::size_t>(
                                std::find(free_cols.begin(), free_cols.end(), c) - free_cols.begin());
                        v = ((m >> (free_cols.size() - 1 - k)) & 1U) != 0;
                    }
                    base[table.inputs[c]] = v;
                }
                const auto with_clock = [&](input_vector v, bool level)
                {
                    if (clock_col)
                    {
                        v[*table.clock] = level;
                    }
                    return v;
                };
                stimulus s{};
                s.row = r;
                s.expected = row.expected;
                const bool transition = first != last;
                if (clock_col && (transition || row.expected == expectation::hold))
                {
                    input_vector flipped = base;
                    for (auto& [label, value] : flipped)
                    {
                        value = !value;
                    }
                    s.vectors.push_back(with_clock(flipped, first));
                    s.vectors.push_back(with_clock(flipped, !first));
                    s.vectors.push_back(with_clock(flipped, first));
                }
                for (std::size_t w = 0; w < warmup_cycles; ++w)
                {
                    s.vectors.push_back(with_clock(base, first));
                }
                s.decision = s.vectors.size();
                s.vectors.push_back(with_clock(base, last));
                out.push_back(std::move(s));
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------------------------------------
// latency

std::size_t measure_latency(const layout& lyt, std::string_view output, const sim_config& cfg,
                            std::size_t max_latency, unsigned threads)
{
    const auto& inputs = lyt.inputs;
    const auto n = inputs.size();
    if (n == 0)
    {
        return 0;
    }
    constexpr std::size_t settle = 3;
    constexpr std::size_t max_bases = 64;
    std::vector<std::uint64_t> bases{};
    if (n < 7)
    {
        for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m)
        {
            bases.push_back(m);
        }
    }
    else
    {
        std::mt19937_64 rng{0x9e3779b97f4a7c15ULL};
        for (std::size_t k = 0; k < max_bases; ++k)
        {
            bases.push_back(rng());
        }
    }
    const auto assign = [&](std::uint64_t m)
    {
        input_vector v{};
        for (std::size_t i = 0; i < n; ++i)
        {
            v[inputs[i]] = ((m >> i) & 1U) != 0;
        }
        return v;
    };
    const auto run = [&](const input_vector& before, const input_vector& after)
    {
        std::vector<input_vector> vecs(settle, before);
        vecs.insert(vecs.end(), max_latency + 1, after);
        const auto tr = simulate(lyt, vecs, cfg, threads);
        auto bits = decode_output(tr, output, lyt);
        return std::vector<decoded_bit>(bits.begin() + settle, bits.end());
    };
    std::vector<std::optional<std::size_t>> best(n);
    for (const auto m : bases)
    {
        const auto base = assign(m);
        const auto reference = run(base, base);
        for (std::size_t i = 0; i < n; ++i)
        {
            const auto flipped = assign(m ^ (std::uint64_t{1} << i));
            const auto response = run(base, flipped);
            for (std::size_t k = 0; k < response.size(); ++k)
            {
                if (response[k] != reference[k])
                {
                    if (!best[i] || k < *best[i])
                    {
                        best[i] = k;
                    }
                    break;
                }
            }
        }
    }
    std::size_t latency = 0;
    for (const auto& b : best)
    {
        if (b)
        {
            latency = std::max(latency, *b);
        }
    }
    return latency;
}

// ---------------------------------------------------------------------------------------------------------
// checking

std::string_view to_string(row_outcome o) noexcept
{
    switch (o)
    {
        case row_outcome::pass: return "pass";
        case row_outcome::fail: return "fail";
        case row_outcome::undecodable: return "undecodable";
    }
    return "fail";
}

std::size_t verification_report::count(row_outcome o) const noexcept
{
    return static_cast<std::size_t>(
            std::count_if(rows.begin(), rows.end(), [o](const row_result& r) { return r.outcome == o; }));
}

verification_report check_truth_table(const layout& lyt, const truth_table& table, const sim_config& cfg,
                                      unsigned threads)
{
    for (const auto& label : table.inputs)
    {
        const auto idx = lyt.find_label(label);
        if (!idx || lyt.cells[*idx].kind != cell_kind::input)
        {
            throw table_error("table input '" + label + "' is not an input of the layout");
        }
    }
    if (const auto idx = lyt.find_label(table.output); !idx || lyt.cells[*idx].kind != cell_kind::output)
    {
        throw table_error("table output '" + table.output + "' is not an output of the layout");
    }
    for (const auto& label : lyt.inputs)
    {
        if (std::find(table.inputs.begin(), table.inputs.end(), label) == table.inputs.end())
        {
            throw table_error("layout input '" + label + "' has no table column");
        }
    }

    verification_report report{};
    report.circuit = lyt.name;
    report.output = table.output;
    report.latency_vectors = measure_latency(lyt, table.output, cfg, 4, threads);
    const auto lat = report.latency_vectors;

    for (std::size_t r = 0; r < table.rows.size(); ++r)
    {
        report.rows.push_back({r, row_outcome::pass, 0});
    }
    for (const auto& s : expand_rows(table))
    {
        auto vecs = s.vectors;
        vecs.insert(vecs.end(), lat, vecs.back());
        const auto tr = simulate(lyt, vecs, cfg, threads);
        const auto bits = decode_output(tr, table.output, lyt);

        stimulus_result res{};
        res.row = s.row;
        res.inputs = s.vectors[s.decision];
        res.expected = s.expected;
        res.observed = bits[s.decision + lat];
        res.unconverged_samples = tr.unconverged_samples().size();
        if (s.expected == expectation::hold)
        {
            res.previous = bits[s.decision + lat - 1];
            if (!res.observed || !res.previous)
            {
                res.outcome = row_outcome::undecodable;
            }
            else
            {
                res.outcome = *res.observed == *res.previous ? row_outcome::pass : row_outcome::fail;
            }
        }
        else
        {
            const bool want = s.expected == expectation::one;
            if (!res.observed)
            {
                res.outcome = row_outcome::undecodable;
            }
            else
            {
                res.outcome = *res.observed == want ? row_outcome::pass : row_outcome::fail;
            }
        }
        report.unconverged_samples += res.unconverged_samples;

        auto& row = report.rows[s.row];
        ++row.stimuli;
        if (res.outcome == row_outcome::fail)
        {
            row.outcome = row_outcome::fail;
        }
        else if (res.outcome == row_outcome::undecodable && row.outcome == row_outcome::pass)
        {
            row.outcome = row_outcome::undecodable;
        }
        report.stimuli.push_back(std::move(res));
    }
    report.passed = std::all_of(report.rows.begin(), report.rows.end(),
                                [](const row_result& r) { return r.outcome == row_outcome::pass; });
    return report;
}

namespace
{

std::string describe_inputs(const stimulus_result& s, const truth_table& table, const std::vector<stimulus>& all,
                            std::size_t index)
{
    std::string text{};
    const auto clock_col = table.clock_column();
    for (std::size_t c = 0; c < table.inputs.size(); ++c)
    {
        const auto& label = table.inputs[c];
        if (!text.empty())
        {
            text += ' ';
        }
        text += label + '=';
        if (clock_col && c == *clock_col)
        {
            const auto& stim = all[index];
            const bool before = stim.vectors[stim.decision - 1].at(label);
            const bool now = stim.vectors[stim.decision].at(label);
            text += before == now ? std::string(now ? "1" : "0") : std::string(now ? "01" : "10");
        }
        else
        {
            text += s.inputs.at(label) ? '1' : '0';
        }
    }
    return text;
}

}  // namespace

void write_report_text(std::ostream& out, const verification_report& report, const truth_table& table)
{
    const auto stimuli = expand_rows(table);
    out << "circuit: " << (report.circuit.empty() ? "(unnamed)" : report.circuit) << '\n';
    out << "output: " << report.output << '\n';
    out << "latency: " << report.latency_vectors << " vector(s)\n";
    for (std::size_t i = 0; i < report.stimuli.size(); ++i)
    {
        const auto& s = report.stimuli[i];
        out << "row " << (s.row + 1) << ": " << describe_inputs(s, table, stimuli, i) << " -> expected "
            << expectation_token(s.expected);
        if (s.expected == expectation::hold)
        {
            out << " (previous " << bit_token(s.previous) << ')';
        }
        out << ", observed " << bit_token(s.observed) << "  " << to_string(s.outcome) << '\n';
    }
    out << "rows: " << report.count(row_outcome::pass) << " pass, " << report.count(row_outcome::fail) << " fail, "
        << report.count(row_outcome::undecodable) << " undecodable\n";
    for (const auto& r : report.rows)
    {
        if (r.outcome != row_outcome::pass)
        {
            out << "  row " << (r.row + 1) << " " << to_string(r.outcome) << '\n';
        }
    }
    out << "unconverged samples: " << report.unconverged_samples << '\n';
    out << "verdict: " << (report.passed ? "PASS" : "FAIL") << '\n';
}

void write_report_csv(std::ostream& out, const verification_report& report, const truth_table& table)
{
    const auto stimuli = expand_rows(table);
    out << "row,inputs,expected,observed,previous,outcome,unconverged\n";
    for (std::size_t i = 0; i < report.stimuli.size(); ++i)
    {
        const auto& s = report.stimuli[i];
        out << (s.row + 1) << ',' << describe_inputs(s, table, stimuli, i) << ',' << expectation_token(s.expected)
            << ',' << bit_token(s.observed) << ',' << (s.expected == expectation::hold ? bit_token(s.previous) : "")
            << ',' << to_string(s.outcome) << ',' << s.unconverged_samples << '\n';
    }
}

stream_report check_stream(const layout& lyt, std::string_view output, const std::vector<input_vector>& vectors,
                           const std::vector<bool>& expected, std::size_t latency, std::size_t skip,
                           const sim_config& cfg, unsigned threads)
{
    if (expected.size() != vectors.size())
    {
        throw std::invalid_argument("expected stream length differs from the vector count");
    }
    stream_report rep{};
    rep.expected = expected;
    rep.latency_vectors = latency;
    if (vectors.empty())
    {
        return rep;
    }
    auto vecs = vectors;
    vecs.insert(vecs.end(), latency, vecs.back());
    const auto tr = simulate(lyt, vecs, cfg, threads);
    const auto bits = decode_output(tr, output, lyt);
    rep.unconverged_samples = tr.unconverged_samples().size();
    for (std::size_t k = 0; k < vectors.size(); ++k)
    {
        rep.observed.push_back(bits[k + latency]);
        if (k < skip)
        {
            continue;
        }
        ++rep.compared;
        if (bits[k + latency] && *bits[k + latency] == expected[k])
        {
            ++rep.agreements;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------------------------------------
// comparison

const std::vector<reference_row>& latch_references()
{
    static const std::vector<reference_row> rows{
            {"D Latch in [26]", "26", 0.05, 48, 4, std::nullopt},
            {"D Latch in [27]", "27", 0.06, 43, 4, std::nullopt},
            {"D Latch in [28]", "28", 0.02, 28, 2, std::nullopt},
            {"D Latch in [21]", "21", 0.02, 19, 3, std::nullopt},
    };
    return rows;
}

const std::vector<reference_row>& flipflop_references()
{
    static const std::vector<reference_row> rows{
            {"D-FF in [29]", "29", 0.11, 84, 11, false},
            {"D-FF in [30]", "30", 0.06, 56, 10, false},
            {"D-FF in [21]", "21", 0.04, 53, 9, true},
            {"D-FF in [22]", "22", 0.07, 47, 7, false},
    };
    return rows;
}

int improvement_percent(std::size_t best_reference, std::size_t proposed)
{
    if (best_reference == 0)
    {
        return 0;
    }
    const double pct = 100.0 * (static_cast<double>(best_reference) - static_cast<double>(proposed)) /
                       static_cast<double>(best_reference);
    return static_cast<int>(std::lround(pct));
}

comparison_table make_comparison(std::string title, const std::vector<reference_row>& references,
                                 const std::string& design, const metrics_report& live,
                                 const reference_row& published, bool with_set_reset)
{
    comparison_table t{};
    t.title = std::move(title);
    t.references = references;
    t.published = published;
    t.proposed.design = design;
    t.proposed.area_um2 = rounded_area(live.area_um2);
    t.proposed.cell_count = live.cell_count;
    t.proposed.clock_phases = live.clock_phases;
    if (with_set_reset)
    {
        t.proposed.set_reset = live.has_set_reset;
    }
    t.best_reference_count = references.empty() ? 0 : references.front().cell_count;
    for (const auto& r : references)
    {
        t.best_reference_count = std::min(t.best_reference_count, r.cell_count);
    }
    t.improvement = improvement_percent(t.best_reference_count, live.cell_count);

    if (t.proposed.cell_count != published.cell_count)
    {
        t.deviations.push_back("cell count " + std::to_string(t.proposed.cell_count) + " != " +
                               std::to_string(published.cell_count));
    }
    if (std::abs(t.proposed.area_um2 - published.area_um2) > 1e-9)
    {
        std::ostringstream s;
        s << std::fixed << std::setprecision(2) << "area " << t.proposed.area_um2 << " != " << published.area_um2;
        t.deviations.push_back(s.str());
    }
    if (t.proposed.clock_phases != published.clock_phases)
    {
        t.deviations.push_back("clock phases " + std::to_string(t.proposed.clock_phases) + " != " +
                               std::to_string(published.clock_phases));
    }
    if (with_set_reset && published.set_reset && t.proposed.set_reset != published.set_reset)
    {
        t.deviations.push_back("set/reset ability differs");
    }
    return t;
}

bool comparison_report::matches_published() const noexcept
{
    return std::all_of(tables.begin(), tables.end(), [](const comparison_table& t) { return t.deviations.empty(); });
}

comparison_report compare_with_references(const layout& latch, const layout& flipflop)
{
    comparison_report rep{};
    rep.tables.push_back(make_comparison("Table 2: D latch", latch_references(), "Proposed D latch",
                                         compute_metrics(latch), {"Proposed D latch", "", 0.01, 13, 3, std::nullopt},
                                         false));
    rep.tables.push_back(make_comparison("Table 3: D flip-flop", flipflop_references(), "Proposed D-FF",
                                         compute_metrics(flipflop), {"Proposed D-FF", "", 0.03, 35, 8, true}, true));
    return rep;
}

namespace
{

std::string yes_no(const std::optional<bool>& b)
{
    return b ? (*b ? "Yes" : "No") : "";
}

std::string two_decimals(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

void write_comparison_text(std::ostream& out, const comparison_report& report)
{
    for (const auto& t : report.tables)
    {
        const bool sr = t.proposed.set_reset.has_value();
        out << t.title << '\n';
        out << std::left << std::setw(20) << "Design" << std::setw(14) << "Area (um^2)" << std::setw(12)
            << "Cell count" << std::setw(14) << "Clock phases";
        if (sr)
        {
            out << "S/R ability";
        }
        out << '\n';
        const auto line = [&](const reference_row& r)
        {
            out << std::left << std::setw(20) << r.design << std::setw(14) << two_decimals(r.area_um2)
                << std::setw(12) << r.cell_count << std::setw(14) << r.clock_phases;
            if (sr)
            {
                out << yes_no(r.set_reset);
            }
            out << '\n';
        };
        for (const auto& r : t.references)
        {
            line(r);
        }
        line(t.proposed);
        out << "cell count improvement over best reference (" << t.best_reference_count
            << " cells): " << t.improvement << "%\n";
        for (const auto& d : t.deviations)
        {
            out << "deviation from published row: " << d << '\n';
        }
        out << '\n';
    }
}

void write_comparison_csv(std::ostream& out, const comparison_report& report)
{
    out << "table,design,citation,area_um2,cell_count,clock_phases,set_reset,improvement_percent\n";
    for (const auto& t : report.tables)
    {
        for (const auto& r : t.references)
        {
            out << '"' << t.title << "\"," << r.design << ',' << r.citation << ',' << two_decimals(r.area_um2) << ','
                << r.cell_count << ',' << r.clock_phases << ',' << yes_no(r.set_reset) << ",\n";
        }
        out << '"' << t.title << "\"," << t.proposed.design << ",," << two_decimals(t.proposed.area_um2) << ','
            << t.proposed.cell_count << ',' << t.proposed.clock_phases << ',' << yes_no(t.proposed.set_reset) << ','
            << t.improvement << '\n';
    }
}

}  // namespace qcaforge
