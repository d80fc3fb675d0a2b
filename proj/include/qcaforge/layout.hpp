#ifndef QCAFORGE_LAYOUT_HPP
#define QCAFORGE_LAYOUT_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qcaforge
{

/// Centre-to-centre spacing of the cell grid, in nanometres.
inline constexpr std::int64_t grid_pitch_nm = 20;
/// Edge length of one square cell, in nanometres.
inline constexpr std::int64_t cell_size_nm = 18;
/// Area of a single cell in square micrometres (18 nm x 18 nm).
inline constexpr double single_cell_area_um2 = 18.0 * 18.0 * 1e-6;

inline constexpr int clock_zone_count = 4;

class layout_error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

enum class cell_kind : std::uint8_t
{
    normal,
    input,
    output,
    fixed
};

/**
 * One QCA cell. Position is the cell centre in integer nanometres. Input and output cells carry a label,
 * fixed cells carry a polarization of exactly +1 or -1.
 */
struct cell
{
    std::int64_t x_nm{0};
    std::int64_t y_nm{0};
    int zone{0};
    cell_kind kind{cell_kind::normal};
    std::string label{};
    double polarization{0.0};

    static cell make_normal(std::int64_t x, std::int64_t y, int zone);
    static cell make_input(std::int64_t x, std::int64_t y, int zone, std::string label);
    static cell make_output(std::int64_t x, std::int64_t y, int zone, std::string label);
    static cell make_fixed(std::int64_t x, std::int64_t y, int zone, double polarization);

    [[nodiscard]] bool is_driven() const noexcept
    {
        return kind == cell_kind::normal || kind == cell_kind::output;
    }

    bool operator==(const cell&) const = default;
};

struct layout
{
    std::string name{};
    std::vector<cell> cells{};
    std::vector<std::string> inputs{};
    std::vector<std::string> outputs{};

    /// Appends a cell and registers its label as an input or output terminal.
    layout& add(cell c);

    [[nodiscard]] std::optional<std::size_t> find_label(std::string_view label) const;
    [[nodiscard]] std::size_t index_of(std::string_view label) const;

    /// Copy of the layout with every cell moved by (dx, dy) nanometres.
    [[nodiscard]] layout translated(std::int64_t dx, std::int64_t dy) const;
    /// Copy reflected across the x axis (y -> -y).
    [[nodiscard]] layout mirrored_x() const;
    /// Copy rotated by 90 degrees about the origin ((x, y) -> (-y, x)).
    [[nodiscard]] layout rotated_90() const;

    bool operator==(const layout&) const = default;
};

struct validation_result
{
    std::vector<std::string> violations{};

    [[nodiscard]] bool ok() const noexcept
    {
        return violations.empty();
    }
    explicit operator bool() const noexcept
    {
        return ok();
    }
};

/// Checks every structural invariant and reports all violations found.
[[nodiscard]] validation_result validate_layout(const layout& lyt);

struct metrics_report
{
    std::size_t cell_count{0};
    double area_um2{0.0};
    int clock_phases{0};
    bool has_set_reset{false};

    bool operator==(const metrics_report&) const = default;
};

[[nodiscard]] std::size_t cell_count(const layout& lyt) noexcept;

/// Area of the axis-aligned bounding box around all cell squares, in square micrometres.
[[nodiscard]] double bounding_area(const layout& lyt);

/// Area rounded to two decimals, the convention used in published comparison tables.
[[nodiscard]] double rounded_area(double area_um2);

/**
 * Number of clock phases a signal crosses between two terminals: one plus the minimum number of zone
 * transitions over all paths of adjacent cells (including diagonal neighbours) on which every step stays in
 * the same zone or advances by one modulo four.
 */
[[nodiscard]] int clock_phase_latency(const layout& lyt, std::string_view input, std::string_view output);

/// Cell count, area and the worst input-to-output latency. Disconnected pairs are skipped.
[[nodiscard]] metrics_report compute_metrics(const layout& lyt);

/// Parses the `qcaforge-layout v1` text format. Errors carry the offending line number.
[[nodiscard]] layout parse_layout(std::string_view text);
[[nodiscard]] layout load_layout(const std::string& path);
[[nodiscard]] std::string serialize_layout(const layout& lyt);
void save_layout(const layout& lyt, const std::string& path);

}  // namespace qcaforge

#endif  // QCAFORGE_LAYOUT_HPP
