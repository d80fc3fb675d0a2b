#ifndef QCAFORGE_VERIFY_HPP
#define QCAFORGE_VERIFY_HPP

#include "qcaforge/engine.hpp"
#include "qcaforge/layout.hpp"

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace qcaforge
{

class table_error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Input cell value in a table row: 0, 1 or don't-care.
enum class tri : std::uint8_t
{
    zero,
    one,
    any
};

/// Clock column entry: a static level, a transition between consecutive cycles, or don't-care.
enum class clock_condition : std::uint8_t
{
    low,
    high,
    rising,
    falling,
    any
};

enum class expectation : std::uint8_t
{
    zero,
    one,
    hold
};

struct truth_row
{
    /// One entry per input label, in table order. The clock column holds `tri::any` and is described by `clock`.
    std::vector<tri> values{};
    clock_condition clock{clock_condition::any};
    expectation expected{expectation::zero};

    bool operator==(const truth_row&) const = default;
};

struct truth_table
{
    std::vector<std::string> inputs{};
    std::optional<std::string> clock{};
    std::string output{};
    std::vector<truth_row> rows{};

    [[nodiscard]] std::optional<std::size_t> clock_column() const;

    bool operator==(const truth_table&) const = default;
};

/// Parses the `qcaforge-table v1` format. Errors carry the offending line number.
[[nodiscard]] truth_table parse_truth_table(std::string_view text);
[[nodiscard]] truth_table load_truth_table(const std::string& path);
[[nodiscard]] std::string serialize_truth_table(const truth_table& table);

/// Table of a combinational function over `inputs`, one row per assignment in binary counting order.
[[nodiscard]] truth_table combinational_table(std::vector<std::string> inputs, std::string output,
                                              const std::function<bool(const std::vector<bool>&)>& fn);

/**
 * Parses a vector file: a header line naming input labels, then one line of 0/1 values per vector. Every
 * layout input must appear in the header; unknown labels are errors.
 */
[[nodiscard]] std::vector<input_vector> parse_vectors(std::string_view text, const layout& lyt);
[[nodiscard]] std::vector<input_vector> load_vectors(const std::string& path, const layout& lyt);

inline constexpr std::size_t max_exhaustive_inputs = 12;

/// All 2^n assignments of the layout inputs in binary counting order, first input most significant.
[[nodiscard]] std::vector<input_vector> exhaustive_vectors(const layout& lyt);

/// Decoded output of one vector; nullopt when the polarization sits inside the dead band.
using decoded_bit = std::optional<bool>;

inline constexpr double decode_threshold = 0.5;

[[nodiscard]] decoded_bit decode_polarization(double p, double threshold = decode_threshold) noexcept;

/// Sample index within a cycle at which an output in `zone` is read: the last sample of its hold quarter.
[[nodiscard]] int decode_sample_offset(int zone, int samples_per_cycle) noexcept;

/// One bit per vector, read at the end of the output zone's hold quarter.
[[nodiscard]] std::vector<decoded_bit> decode_output(const trace& tr, std::string_view label, const layout& lyt);

/// A concrete stimulus derived from one table row.
struct stimulus
{
    std::size_t row{0};
    std::vector<input_vector> vectors{};
    /// Index of the vector whose response is checked (before latency shift).
    std::size_t decision{0};
    expectation expected{expectation::zero};
};

inline constexpr std::size_t warmup_cycles = 2;

/**
 * Expands don't-cares and clock conditions into concrete stimuli. Every stimulus has `warmup_cycles` cycles of
 * its inputs before the decision cycle. Rows with a clock transition or a hold expectation are preceded by a
 * preamble that drives the complemented data while toggling the clock, so captures and holds are observable.
 */
[[nodiscard]] std::vector<stimulus> expand_rows(const truth_table& table);

/**
 * Output latency in whole vectors: for every input, the earliest vector at which flipping that input changes
 * the decoded output, minimised over base assignments; the result is the maximum over inputs that have any
 * effect within `max_latency` vectors.
 */
[[nodiscard]] std::size_t measure_latency(const layout& lyt, std::string_view output, const sim_config& cfg,
                                          std::size_t max_latency = 4, unsigned threads = 1);

enum class row_outcome : std::uint8_t
{
    pass,
    fail,
    undecodable
};

[[nodiscard]] std::string_view to_string(row_outcome o) noexcept;

struct stimulus_result
{
    std::size_t row{0};
    input_vector inputs{};
    expectation expected{expectation::zero};
    decoded_bit observed{};
    decoded_bit previous{};
    row_outcome outcome{row_outcome::pass};
    std::size_t unconverged_samples{0};

    bool operator==(const stimulus_result&) const = default;
};

struct row_result
{
    std::size_t row{0};
    row_outcome outcome{row_outcome::pass};
    std::size_t stimuli{0};

    bool operator==(const row_result&) const = default;
};

struct verification_report
{
    std::string circuit{};
    std::string output{};
    std::size_t latency_vectors{0};
    std::vector<row_result> rows{};
    std::vector<stimulus_result> stimuli{};
    std::size_t unconverged_samples{0};
    bool passed{false};

    [[nodiscard]] std::size_t count(row_outcome o) const noexcept;
    bool operator==(const verification_report&) const = default;
};

/// Simulates every expanded stimulus independently, decodes at the latency-shifted decision point and compares.
[[nodiscard]] verification_report check_truth_table(const layout& lyt, const truth_table& table,
                                                    const sim_config& cfg, unsigned threads = 1);

void write_report_text(std::ostream& out, const verification_report& report, const truth_table& table);
void write_report_csv(std::ostream& out, const verification_report& report, const truth_table& table);

/// Result of driving a layout with an arbitrary vector stream and comparing against reference bits.
struct stream_report
{
    std::vector<decoded_bit> observed{};
    std::vector<bool> expected{};
    std::size_t latency_vectors{0};
    std::size_t compared{0};
    std::size_t agreements{0};
    std::size_t unconverged_samples{0};

    [[nodiscard]] bool perfect() const noexcept
    {
        return compared > 0 && agreements == compared;
    }
};

/**
 * Simulates `vectors` followed by `latency` copies of the last vector and compares out(k + latency) with
 * expected[k] for every k >= skip.
 */
[[nodiscard]] stream_report check_stream(const layout& lyt, std::string_view output,
                                         const std::vector<input_vector>& vectors, const std::vector<bool>& expected,
                                         std::size_t latency, std::size_t skip, const sim_config& cfg,
                                         unsigned threads = 1);

/// Published metric row used in the comparison tables.
struct reference_row
{
    std::string design{};
    std::string citation{};
    double area_um2{0.0};
    std::size_t cell_count{0};
    int clock_phases{0};
    std::optional<bool> set_reset{};
};

[[nodiscard]] const std::vector<reference_row>& latch_references();
[[nodiscard]] const std::vector<reference_row>& flipflop_references();

/// Integer-rounded percentage by which `proposed` undercuts `best_reference`.
[[nodiscard]] int improvement_percent(std::size_t best_reference, std::size_t proposed);

struct comparison_table
{
    std::string title{};
    std::vector<reference_row> references{};
    reference_row proposed{};
    /// Metrics the proposed row is expected to match.
    reference_row published{};
    int improvement{0};
    std::size_t best_reference_count{0};
    std::vector<std::string> deviations{};
};

[[nodiscard]] comparison_table make_comparison(std::string title, const std::vector<reference_row>& references,
                                               const std::string& design, const metrics_report& live,
                                               const reference_row& published, bool with_set_reset);

struct comparison_report
{
    std::vector<comparison_table> tables{};

    [[nodiscard]] bool matches_published() const noexcept;
};

/// Latch and flip-flop tables built from live metrics of the two proposed layouts.
[[nodiscard]] comparison_report compare_with_references(const layout& latch, const layout& flipflop);

void write_comparison_text(std::ostream& out, const comparison_report& report);
void write_comparison_csv(std::ostream& out, const comparison_report& report);

}  // namespace qcaforge

#endif  // QCAFORGE_VERIFY_HPP
