#include "chemovir/initial_data.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace chemovir {

void InitialSpec::validate() const {
    if (mass_u < 0.0 || mass_v < 0.0 || mass_w < 0.0)
        throw std::invalid_argument("initial: target masses must be >= 0");
    if (family == InitialFamily::ConcentratedGaussian && !(width > 0.0))
        throw std::invalid_argument("initial: width must be positive");
}

namespace {

constexpr int kModes = 6;

// Positive profile 1 + sum_k a_k cos(k pi x / L); the amplitudes shrink
// like 1/k^2 and are scaled so the sum stays below 1 in every geometry.
void fill_random_bump(const Grid& g, SplitMix64& rng, Field& f) {
    double ax[kModes], ay[kModes];
    const double scale = g.spec.geometry == Geometry::Rectangle ? 0.25 : 0.5;
    for (int k = 0; k < kModes; ++k)
        ax[k] = scale * rng.symmetric() / ((k + 1) * (k + 1));
    if (g.spec.geometry == Geometry::Rectangle)
        for (int k = 0; k < kModes; ++k)
            ay[k] = scale * rng.symmetric() / ((k + 1) * (k + 1));

    const double pi = std::numbers::pi;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            double value = 1.0;
            const double x = g.cell_x(i) / g.spec.length_x;
            for (int k = 0; k < kModes; ++k)
                value += ax[k] * std::cos((k + 1) * pi * x);
            if (g.spec.geometry == Geometry::Rectangle) {
                const double y = g.cell_y(j) / g.spec.length_y;
                for (int k = 0; k < kModes; ++k)
                    value += ay[k] * std::cos((k + 1) * pi * y);
            }
            f[g.index(i, j)] = value;
        }
    }
}

void fill_gaussian(const Grid& g, double width, Field& f) {
    const double inv_w2 = 1.0 / (width * width);
    switch (g.spec.geometry) {
        case Geometry::RadialDisk:
            for (int i = 0; i < g.nx; ++i) {
                const double r = g.cell_x(i);
                f[i] = std::exp(-r * r * inv_w2);
            }
            break;
        case Geometry::Interval:
            for (int i = 0; i < g.nx; ++i) {
                const double x = g.cell_x(i) - 0.5 * g.spec.length_x;
                f[i] = std::exp(-x * x * inv_w2);
            }
            break;
        case Geometry::Rectangle:
            for (int j = 0; j < g.ny; ++j) {
                for (int i = 0; i < g.nx; ++i) {
                    const double x = g.cell_x(i) - 0.5 * g.spec.length_x;
                    const double y = g.cell_y(j) - 0.5 * g.spec.length_y;
                    f[g.index(i, j)] = std::exp(-(x * x + y * y) * inv_w2);
                }
            }
            break;
    }
}

void scale_to_mass(Field& f, double target) {
    const double current = field_integral(f);
    const double factor = current > 0.0 ? target / current : 0.0;
    for (double& v : f.values) v *= factor;
}

}  // namespace

State make_initial_state(std::shared_ptr<const Grid> grid,
                         const InitialSpec& spec, SystemKind system) {
    spec.validate();
    const bool has_w = system == SystemKind::MayNowakChemotaxis;
    const bool elliptic_v = system == SystemKind::KSParabolicElliptic;

    State s;
    s.t = 0.0;
    s.u = Field(grid);
    if (!elliptic_v) s.v = Field(grid);
    if (has_w) s.w = Field(grid);

    SplitMix64 rng{spec.seed};
    auto fill = [&](Field& f, double mass, bool gaussian_profile) {
        if (f.empty() || mass <= 0.0) return;
        switch (spec.family) {
            case InitialFamily::RandomBump:
                fill_random_bump(*grid, rng, f);
                break;
            case InitialFamily::ConcentratedGaussian:
                if (gaussian_profile)
                    fill_gaussian(*grid, spec.width, f);
                else
                    std::fill(f.values.begin(), f.values.end(), 1.0);
                break;
            case InitialFamily::Constant:
                std::fill(f.values.begin(), f.values.end(), 1.0);
                break;
        }
        scale_to_mass(f, mass);
    };

    fill(s.u, spec.mass_u, true);
    fill(s.v, spec.mass_v, false);
    fill(s.w, spec.mass_w, false);
    return s;
}

}  // namespace chemovir
