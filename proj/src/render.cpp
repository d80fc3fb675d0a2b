#include "qcaforge/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace qcaforge
{

namespace
{

constexpr const char* zone_fill[clock_zone_count] = {"#9fd89f", "#d8c39f", "#9fb8d8", "#d89fc8"};

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

// Blue for -1, white for 0, red for +1.
std::string shade(double p)
{
    const double t = std::clamp(p, -1.0, 1.0);
    const int r = t < 0 ? static_cast<int>(255 * (1 + t)) : 255;
    const int b = t > 0 ? static_cast<int>(255 * (1 - t)) : 255;
    const int g = static_cast<int>(255 * (1 - std::abs(t)));
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out{};
    for (const char c : s)
    {
        switch (c)
        {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

void write_svg(std::ostream& out, const layout& lyt, std::optional<std::span<const double>> polarizations)
{
    if (lyt.cells.empty())
    {
        throw layout_error("empty layout");
    }
    if (polarizations && polarizations->size() != lyt.cells.size())
    {
        throw std::invalid_argument("polarization count does not match the cell count");
    }
    constexpr double scale = 2.0;
    constexpr double margin = 30.0;
    constexpr double legend = 30.0;
    const double half = static_cast<double>(cell_size_nm) / 2.0;

    auto min_x = lyt.cells.front().x_nm;
    auto max_x = min_x;
    auto min_y = lyt.cells.front().y_nm;
    auto max_y = min_y;
    for (const auto& c : lyt.cells)
    {
        min_x = std::min(min_x, c.x_nm);
        max_x = std::max(max_x, c.x_nm);
        min_y = std::min(min_y, c.y_nm);
        max_y = std::max(max_y, c.y_nm);
    }
    const double width = (static_cast<double>(max_x - min_x) + cell_size_nm) * scale + 2 * margin;
    const double height = (static_cast<double>(max_y - min_y) + cell_size_nm) * scale + 2 * margin + legend;
    const auto px = [&](double x) { return margin + (x - static_cast<double>(min_x) + half) * scale; };
    const auto py = [&](double y) { return margin + (y - static_cast<double>(min_y) + half) * scale; };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\"" << fmt(height)
        << "\" viewBox=\"0 0 " << fmt(width) << ' ' << fmt(height) << "\">\n";
    out << "<title>" << escape(lyt.name) << "</title>\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    const double side = static_cast<double>(cell_size_nm) * scale;
    const double dot_r = 2.5 * scale;
    const double dot_d = 4.5 * scale;
    for (std::size_t i = 0; i < lyt.cells.size(); ++i)
    {
        const auto& c = lyt.cells[i];
        const double cx = px(static_cast<double>(c.x_nm));
        const double cy = py(static_cast<double>(c.y_nm));
        out << "<rect x=\"" << fmt(cx - side / 2) << "\" y=\"" << fmt(cy - side / 2) << "\" width=\"" << fmt(side)
            << "\" height=\"" << fmt(side) << "\" fill=\"" << zone_fill[c.zone] << "\" stroke=\""
            << (c.kind == cell_kind::fixed ? "#c00000" : "#303030") << "\" stroke-width=\""
            << (c.kind == cell_kind::normal ? "1" : "2") << "\"/>\n";

        double p = c.kind == cell_kind::fixed ? c.polarization : 0.0;
        if (polarizations)
        {
            p = (*polarizations)[i];
        }
        // +1 occupies the top-right and bottom-left dots, -1 the top-left and bottom-right ones.
        const bool have_static = polarizations || c.kind == cell_kind::fixed;
        const double pos_dot = have_static ? std::max(0.0, p) : 0.0;
        const double neg_dot = have_static ? std::max(0.0, -p) : 0.0;
        const struct
        {
            double dx, dy, occupancy;
        } dots[] = {{dot_d, -dot_d, pos_dot}, {-dot_d, dot_d, pos_dot}, {-dot_d, -dot_d, neg_dot}, {dot_d, dot_d, neg_dot}};
        for (const auto& d : dots)
        {
            const std::string fill = polarizations ? (d.occupancy > 0 ? shade(p) : "white")
                                                   : (d.occupancy > 0 ? "black" : "white");
            out << "<circle cx=\"" << fmt(cx + d.dx) << "\" cy=\"" << fmt(cy + d.dy) << "\" r=\"" << fmt(dot_r)
                << "\" fill=\"" << fill << "\" stroke=\"#303030\" stroke-width=\"0.5\"/>\n";
        }
        if (c.kind == cell_kind::input || c.kind == cell_kind::output)
        {
            out << "<text x=\"" << fmt(cx) << "\" y=\"" << fmt(cy - side / 2 - 3) << "\" font-size=\"10\" "
                << "font-family=\"sans-serif\" text-anchor=\"middle\">" << escape(c.label) << "</text>\n";
        }
        else if (c.kind == cell_kind::fixed)
        {
            out << "<text x=\"" << fmt(cx) << "\" y=\"" << fmt(cy - side / 2 - 3) << "\" font-size=\"10\" "
                << "font-family=\"sans-serif\" text-anchor=\"middle\">" << (c.polarization > 0 ? "+1" : "-1")
                << "</text>\n";
        }
    }
    const double ly = height - legend + 8;
    for (int z = 0; z < clock_zone_count; ++z)
    {
        const double lx = margin + z * 70.0;
        out << "<rect x=\"" << fmt(lx) << "\" y=\"" << fmt(ly) << "\" width=\"14\" height=\"14\" fill=\""
            << zone_fill[z] << "\" stroke=\"#303030\"/>\n";
        out << "<text x=\"" << fmt(lx + 18) << "\" y=\"" << fmt(ly + 11) << "\" font-size=\"10\" "
            << "font-family=\"sans-serif\">zone " << z << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace qcaforge
