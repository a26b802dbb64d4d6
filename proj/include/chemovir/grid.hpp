#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace chemovir {

enum class Geometry { Interval, Rectangle, RadialDisk };

/// Domain description: shape, extents and resolution.
/// Interval(length) and RadialDisk(radius) are one-dimensional arrays of
/// cells; RadialDisk represents a 2D disk through its radial profile.
struct GridSpec {
    Geometry geometry = Geometry::Interval;
    double length_x = 1.0;  // interval length, rectangle Lx, or disk radius
    double length_y = 1.0;  // rectangle Ly only
    int cells_x = 64;
    int cells_y = 1;  // rectangle only

    void validate() const;
};

/// Cell-centered uniform grid with per-cell measures.
/// Interval: volume dx per cell. Rectangle: dx*dy. RadialDisk: annulus
/// measure 2*pi*r_i*dr, which sums to pi*R^2 exactly.
struct Grid {
    GridSpec spec;
    int nx = 0;
    int ny = 1;       // 1 unless Rectangle
    double dx = 0.0;  // x or r spacing
    double dy = 0.0;  // Rectangle only
    std::vector<double> cell_volume;
    double total_volume = 0.0;

    int size() const { return nx * ny; }
    int index(int i, int j) const { return j * nx + i; }

    // Spatial dimension of the underlying domain (disk counts as 2).
    int dimension() const { return spec.geometry == Geometry::Interval ? 1 : 2; }
    bool radial() const { return spec.geometry == Geometry::RadialDisk; }
    bool one_dimensional_storage() const { return ny == 1; }

    double cell_x(int i) const { return (i + 0.5) * dx; }
    double cell_y(int j) const { return (j + 0.5) * dy; }
    // Face radius (annulus boundary) for RadialDisk, face index 0..nx.
    double face_r(int i) const { return i * dx; }
};

Grid build_grid(const GridSpec& spec);

/// Scalar sample of one unknown, one value per cell of a shared grid.
struct Field {
    std::shared_ptr<const Grid> grid;
    std::vector<double> values;

    Field() = default;
    explicit Field(std::shared_ptr<const Grid> g, double fill = 0.0)
        : grid(std::move(g)), values(grid->size(), fill) {}

    bool empty() const { return values.empty(); }
    int size() const { return static_cast<int>(values.size()); }
    double& operator[](int i) { return values[i]; }
    double operator[](int i) const { return values[i]; }
    std::span<double> span() { return values; }
    std::span<const double> span() const { return values; }
};

// Volume-weighted quadratures and norms (serial reductions).
double field_integral(const Field& f);                 // sum f_i * vol_i
double field_l1(const Field& f);                       // sum |f_i| * vol_i
double field_linf(const Field& f);                     // max |f_i|
double field_min(const Field& f);
bool field_finite(const Field& f);

}  // namespace chemovir
