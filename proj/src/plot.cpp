#include "takagi/plot.hpp"

#include <cstdio>
#include <iterator>
#include <sstream>

#include "takagi/errors.hpp"
#include "takagi/levelset.hpp"

namespace takagi {

namespace {

std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace

std::vector<std::pair<Rational, Rational>> plot_vertices(const Params& p, long depth)
{
    if (depth < 1 || depth > kMaxPlotDepth) {
        throw DepthCap("plot depth must lie in [1, " + std::to_string(kMaxPlotDepth) + "]");
    }
    const Integer count = interval_count(p, depth);
    if (count + 1 > kMaxPlotVertices) {
        throw DepthCap("plot would need " + Integer(count + 1).get_str() + " vertices");
    }
    const Integer den = grid_denominator(p, depth);
    std::vector<std::pair<Rational, Rational>> out;
    out.reserve(count.get_ui() + 1);
    Integer value = 0;
    for (Integer j = 0; j <= count; ++j) {
        out.emplace_back(Rational(j, den), Rational(value, den));
        if (j < count) {
            value += interval_slope(p, {depth, j});
        }
    }
    return out;
}

std::string plot_svg(const Params& p, long depth, int width, int height)
{
    const auto vertices = plot_vertices(p, depth);
    const Rational m = max_upper_bound(p);
    const double top = (m * Rational(105, 100)).to_double();
    const Rational tail = inverse_power(p.r(), static_cast<unsigned long>(depth)) * m;
    const auto y_of = [&](const Rational& v) { return num((Rational(105, 100) * m - v).to_double()); };

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 1 " << num(top) << "\" preserveAspectRatio=\"none\">\n"
        << "<title>f_" << p.r() << "^" << depth << " with tail band " << tail << "</title>\n";
    out << "<polygon fill=\"#9ecae1\" fill-opacity=\"0.5\" stroke=\"none\" points=\"";
    for (const auto& [x, y] : vertices) {
        out << num(x.to_double()) << "," << y_of(y + tail) << " ";
    }
    for (auto it = vertices.rbegin(); it != vertices.rend(); ++it) {
        out << num(it->first.to_double()) << "," << y_of(it->second) << (std::next(it) == vertices.rend() ? "" : " ");
    }
    out << "\"/>\n";
    out << "<polyline fill=\"none\" stroke=\"#08519c\" stroke-width=\"1\" vector-effect=\"non-scaling-stroke\" "
           "points=\"";
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        out << (i ? " " : "") << num(vertices[i].first.to_double()) << "," << y_of(vertices[i].second);
    }
    out << "\"/>\n</svg>\n";
    return out.str();
}

} // namespace takagi
