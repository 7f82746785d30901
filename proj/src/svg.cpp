#include "ale/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ale {

void SvgWriter::add_polyline(const std::vector<cplx>& points, const std::string& stroke, double width_frac) {
    polys_.push_back({points, stroke, width_frac});
}

void SvgWriter::add_points(const std::vector<cplx>& points, const std::string& fill, double radius_frac) {
    dots_.push_back({points, fill, radius_frac});
}

void SvgWriter::write(const std::string& path, int pixels) const {
    double lo_x = -1.0, hi_x = 1.0, lo_y = -1.0, hi_y = 1.0;
    for (const auto& p : polys_) {
        for (const cplx& z : p.pts) {
            lo_x = std::min(lo_x, z.real());
            hi_x = std::max(hi_x, z.real());
            lo_y = std::min(lo_y, z.imag());
            hi_y = std::max(hi_y, z.imag());
        }
    }
    for (const auto& d : dots_) {
        for (const cplx& z : d.pts) {
            lo_x = std::min(lo_x, z.real());
            hi_x = std::max(hi_x, z.real());
            lo_y = std::min(lo_y, z.imag());
            hi_y = std::max(hi_y, z.imag());
        }
    }
    const double span = std::max(hi_x - lo_x, hi_y - lo_y) * 1.05;
    const double cx = 0.5 * (lo_x + hi_x), cy = 0.5 * (lo_y + hi_y);
    const double x0 = cx - 0.5 * span, y0 = cy - 0.5 * span;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" viewBox=\"%.6g %.6g %.6g %.6g\">\n",
                  pixels, pixels, x0, y0, span, span);
    out << buf;
    // flip the y axis so mathematical orientation is up
    std::snprintf(buf, sizeof(buf), "<g transform=\"translate(0 %.6g) scale(1 -1)\">\n", 2.0 * cy);
    out << buf;
    for (const auto& p : polys_) {
        out << "<path fill=\"none\" stroke=\"" << p.stroke << "\" stroke-width=\"";
        std::snprintf(buf, sizeof(buf), "%.6g", p.width_frac * span);
        out << buf << "\" d=\"";
        for (std::size_t i = 0; i < p.pts.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%c%.8g %.8g", i == 0 ? 'M' : 'L', p.pts[i].real(), p.pts[i].imag());
            out << buf;
        }
        out << "\"/>\n";
    }
    for (const auto& d : dots_) {
        for (const cplx& z : d.pts) {
            std::snprintf(buf, sizeof(buf), "<circle cx=\"%.8g\" cy=\"%.8g\" r=\"%.6g\" fill=\"%s\"/>\n",
                          z.real(), z.imag(), d.radius_frac * span, d.fill.c_str());
            out << buf;
        }
    }
    out << "</g>\n</svg>\n";
}

} // namespace ale
