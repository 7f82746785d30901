#pragma once

#include <string>
#include <vector>

#include "ale/complex_util.hpp"

namespace ale {

/// Render polylines (and optional point clouds) to a standalone SVG file.
class SvgWriter {
public:
    void add_polyline(const std::vector<cplx>& points, const std::string& stroke = "#1f3a5f",
                      double width_frac = 0.0015);
    void add_points(const std::vector<cplx>& points, const std::string& fill = "#c03030",
                    double radius_frac = 0.002);
    void write(const std::string& path, int pixels = 1200) const;

private:
    struct Poly {
        std::vector<cplx> pts;
        std::string stroke;
        double width_frac;
    };
    struct Dots {
        std::vector<cplx> pts;
        std::string fill;
        double radius_frac;
    };
    std::vector<Poly> polys_;
    std::vector<Dots> dots_;
};

} // namespace ale
