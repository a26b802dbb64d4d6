#pragma once

#include <span>
#include <stdexcept>

#include "chemovir/grid.hpp"

namespace chemovir::kernels {

struct PoissonSolveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Discrete Neumann Laplacian in conservative flux form: second-order
// central face fluxes, zero flux through boundary faces (ghost-cell
// reflection). RadialDisk uses (1/r)(r f_r)_r with face areas
// 2*pi*r_face; the r=0 face has zero area, which is the symmetry
// condition.
void neumann_laplacian(const Grid& g, std::span<const double> f,
                       std::span<double> out);

// -div(u grad v) in conservative flux form. Face velocity is the central
// difference of v across the face; u at the face is upwinded by the sign
// of that velocity. Boundary faces carry zero flux.
void chemotactic_divergence(const Grid& g, std::span<const double> u,
                            std::span<const double> v, std::span<double> out);

// max over interior faces of |face gradient of v| — the CFL transport
// speed and the W^{1,inf} proxy monitor.
double max_face_gradient(const Grid& g, std::span<const double> v);

// (sum_faces |grad v|^q * face_volume)^(1/q) over interior faces, with
// face dual volume dx in 1D, dx*dy on rectangles, 2*pi*r_face*dr radial.
// Throws std::invalid_argument for q < 1.
double grad_norm_lq(const Grid& g, std::span<const double> v, double q);

// Solves (1 + decay - coeff * Lap) x = f with the Neumann Laplacian.
// Interval/RadialDisk: direct tridiagonal solve. Rectangle: two
// alternating tridiagonal sweeps, x first (carrying the decay factor),
// then y; the product of the two one-dimensional factors replaces the
// unsplit operator up to O(coeff*decay + coeff^2).
void solve_implicit_diffusion(const Grid& g, std::span<const double> f,
                              double coeff, double decay,
                              std::span<double> out);

// Solves Lap v = rhs with Neumann conditions and the normalization
// sum_i v_i * vol_i = 0. rhs is mean-corrected first so compatibility
// holds exactly. Interval/RadialDisk: direct flux integration.
// Rectangle: conjugate gradients with zero-mean projection, relative
// residual 1e-12; throws PoissonSolveError on non-convergence.
void solve_poisson_neumann(const Grid& g, std::span<const double> rhs,
                           std::span<double> out);

// Tridiagonal solve (Thomas algorithm), no pivoting; requires diagonal
// dominance. scratch must have the same length as rhs.
void thomas_solve(std::span<const double> sub, std::span<const double> diag,
                  std::span<const double> sup, std::span<const double> rhs,
                  std::span<double> x, std::span<double> scratch);

// Straight-line single-threaded implementations of the stencil kernels,
// kept as the reference the parallel versions are tested and benchmarked
// against.
namespace serial {
void neumann_laplacian(const Grid& g, std::span<const double> f,
                       std::span<double> out);
void chemotactic_divergence(const Grid& g, std::span<const double> u,
                            std::span<const double> v, std::span<double> out);
double max_face_gradient(const Grid& g, std::span<const double> v);
void solve_implicit_diffusion(const Grid& g, std::span<const double> f,
                              double coeff, double decay,
                              std::span<double> out);
}  // namespace serial

}  // namespace chemovir::kernels
