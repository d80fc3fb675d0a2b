#ifndef QCAFORGE_STDCELLS_HPP
#define QCAFORGE_STDCELLS_HPP

#include "qcaforge/layout.hpp"
#include "qcaforge/verify.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qcaforge
{

/// A generated layout together with the behaviour it is expected to show and, for the bundled designs, the
/// metrics they are published with.
struct circuit
{
    layout lyt{};
    std::optional<truth_table> expected_table{};
    std::optional<metrics_report> reported_metrics{};
};

/**
 * Builds a layout from rows of whitespace-separated tokens, one token per grid site (20 nm pitch, y grows
 * downwards). Tokens: `.` empty, `n<z>` normal, `p<z>` / `m<z>` fixed +1 / -1, `i<z>:<label>` input,
 * `o<z>:<label>` output, where `<z>` is the clock zone.
 */
[[nodiscard]] layout layout_from_grid(std::string name, const std::vector<std::string_view>& rows);

/// Plus-shaped majority gate: inputs a (west), b (north), c (south), output `out` (east).
[[nodiscard]] circuit majority_gate();
/// Majority gate with the north input replaced by a fixed -1 cell; inputs a, b.
[[nodiscard]] circuit and_gate();
/// Majority gate with the north input replaced by a fixed +1 cell; inputs a, b.
[[nodiscard]] circuit or_gate();

enum class inverter_style : std::uint8_t
{
    corner,
    symmetric
};

[[nodiscard]] circuit inverter(inverter_style style);

/// Horizontal wire of `n` cells from input `a` to output `out`; `zone_plan` gives one zone per cell.
[[nodiscard]] circuit wire(std::size_t n, const std::vector<int>& zone_plan);

/// Zone plan for an n-cell wire spread over `zones` clock zones: the input alone in zone 0, the remaining
/// cells split as evenly as possible over zones 1..zones-1 (longer runs last).
[[nodiscard]] std::vector<int> spread_zone_plan(std::size_t n, int zones);

/// 2:1 multiplexer: out = a when s = 0, b when s = 1.
[[nodiscard]] circuit mux2to1();

/// Level-sensitive D latch, transparent while clk = 1. Inputs D, clk; output Out.
[[nodiscard]] circuit d_latch();

enum class clock_edge : std::uint8_t
{
    positive,
    negative
};

/// Edge-triggered D flip-flop. Inputs clk, D; output Out.
[[nodiscard]] circuit d_flipflop(clock_edge edge);

/// Positive-edge D flip-flop with set/reset through an output majority stage, Out = MAJ(P, S, Q).
[[nodiscard]] circuit d_flipflop_sr();

/// The flip-flop functionality table with columns P S clk D.
[[nodiscard]] truth_table flipflop_sr_table();

struct named_circuit
{
    std::string name{};
    circuit c{};
};

/// Every bundled circuit, in a fixed order; names match the files in `circuits/`.
[[nodiscard]] std::vector<named_circuit> bundled_circuits();

/// Looks up a bundled circuit by name.
[[nodiscard]] std::optional<circuit> find_bundled(std::string_view name);

}  // namespace qcaforge

#endif  // QCAFORGE_STDCELLS_HPP
