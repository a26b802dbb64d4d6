#include "chemovir/grid.hpp"

#include <numbers>

namespace chemovir {

void GridSpec::validate() const {
    if (cells_x < 4) throw std::invalid_argument("grid: cells_x must be >= 4");
    if (length_x <= 0.0) throw std::invalid_argument("grid: length_x must be positive");
    if (geometry == Geometry::Rectangle) {
        if (cells_y < 4) throw std::invalid_argument("grid: cells_y must be >= 4");
        if (length_y <= 0.0) throw std::invalid_argument("grid: length_y must be positive");
    }
}

Grid build_grid(const GridSpec& spec) {
    spec.validate();
    Grid g;
    g.spec = spec;
    g.nx = spec.cells_x;
    g.dx = spec.length_x / spec.cells_x;

    switch (spec.geometry) {
        case Geometry::Interval:
            g.ny = 1;
            g.cell_volume.assign(g.nx, g.dx);
            break;
        case Geometry::Rectangle:
            g.ny = spec.cells_y;
            g.dy = spec.length_y / spec.cells_y;
            g.cell_volume.assign(g.nx * g.ny, g.dx * g.dy);
            break;
        case Geometry::RadialDisk: {
            g.ny = 1;
            g.cell_volume.resize(g.nx);
            const double two_pi = 2.0 * std::numbers::pi;
            for (int i = 0; i < g.nx; ++i) {
                g.cell_volume[i] = two_pi * g.cell_x(i) * g.dx;
            }
            break;
        }
    }
    double vol = 0.0;
    for (double v : g.cell_volume) vol += v;
    g.total_volume = vol;
    return g;
}

double field_integral(const Field& f) {
    double s = 0.0;
    for (int i = 0; i < f.size(); ++i) s += f.values[i] * f.grid->cell_volume[i];
    return s;
}

double field_l1(const Field& f) {
    double s = 0.0;
    for (int i = 0; i < f.size(); ++i) s += std::abs(f.values[i]) * f.grid->cell_volume[i];
    return s;
}

double field_linf(const Field& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

double field_min(const Field& f) {
    double m = f.values.empty() ? 0.0 : f.values[0];
    for (double v : f.values) m = std::min(m, v);
    return m;
}

bool field_finite(const Field& f) {
    for (double v : f.values) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

}  // namespace chemovir
