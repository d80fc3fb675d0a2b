#ifndef QCAFORGE_RENDER_HPP
#define QCAFORGE_RENDER_HPP

#include "qcaforge/layout.hpp"

#include <optional>
#include <ostream>
#include <span>

namespace qcaforge
{

/**
 * Writes the layout as SVG: one square per cell filled with its clock-zone colour, the two occupied dots of
 * each cell on the diagonal that encodes its polarization sign, and labels next to terminals. When
 * `polarizations` is given (one value per cell), the dots are shaded by value instead of drawn from the
 * static cell description.
 */
void write_svg(std::ostream& out, const layout& lyt, std::optional<std::span<const double>> polarizations = {});

}  // namespace qcaforge

#endif  // QCAFORGE_RENDER_HPP
