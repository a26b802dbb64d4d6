#include "chemovir/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace chemovir::kernels {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// Per-cell stencil bodies shared by the parallel and serial entry points,
// so the two are bit-identical and differ only in loop scheduling.

inline double lap_cell_interval(std::span<const double> f, int n,
                                double inv_dx2, int i) {
    const double dl = i > 0 ? f[i] - f[i - 1] : 0.0;
    const double dr = i + 1 < n ? f[i + 1] - f[i] : 0.0;
    return (dr - dl) * inv_dx2;
}

inline double lap_cell_radial(const Grid& g, std::span<const double> f, int i) {
    const int n = g.nx;
    const double inv_dr = 1.0 / g.dx;
    const double flux_l =
        i > 0 ? two_pi * g.face_r(i) * (f[i] - f[i - 1]) * inv_dr : 0.0;
    const double flux_r =
        i + 1 < n ? two_pi * g.face_r(i + 1) * (f[i + 1] - f[i]) * inv_dr : 0.0;
    return (flux_r - flux_l) / g.cell_volume[i];
}

inline double lap_cell_rect(std::span<const double> f, int nx, int ny,
                            double inv_dx2, double inv_dy2, int k) {
    const int i = k % nx;
    const int j = k / nx;
    const double dxl = i > 0 ? f[k] - f[k - 1] : 0.0;
    const double dxr = i + 1 < nx ? f[k + 1] - f[k] : 0.0;
    const double dyl = j > 0 ? f[k] - f[k - nx] : 0.0;
    const double dyr = j + 1 < ny ? f[k + nx] - f[k] : 0.0;
    return (dxr - dxl) * inv_dx2 + (dyr - dyl) * inv_dy2;
}

// Upwind mass flux through one face: velocity is the central gradient of
// v across the face, the transported u value is taken from the side the
// velocity points away from.
inline double upwind_flux(double u_lo, double u_hi, double dv, double inv_h) {
    const double vel = dv * inv_h;
    return (vel >= 0.0 ? u_lo : u_hi) * vel;
}

inline double chemo_cell_interval(std::span<const double> u,
                                  std::span<const double> v, int n,
                                  double inv_dx, int i) {
    const double gl = i > 0 ? upwind_flux(u[i - 1], u[i], v[i] - v[i - 1], inv_dx) : 0.0;
    const double gr = i + 1 < n ? upwind_flux(u[i], u[i + 1], v[i + 1] - v[i], inv_dx) : 0.0;
    return -(gr - gl) * inv_dx;
}

inline double chemo_cell_radial(const Grid& g, std::span<const double> u,
                                std::span<const double> v, int i) {
    const int n = g.nx;
    const double inv_dr = 1.0 / g.dx;
    const double gl =
        i > 0 ? two_pi * g.face_r(i) * upwind_flux(u[i - 1], u[i], v[i] - v[i - 1], inv_dr)
              : 0.0;
    const double gr =
        i + 1 < n
            ? two_pi * g.face_r(i + 1) * upwind_flux(u[i], u[i + 1], v[i + 1] - v[i], inv_dr)
            : 0.0;
    return -(gr - gl) / g.cell_volume[i];
}

inline double chemo_cell_rect(std::span<const double> u,
                              std::span<const double> v, int nx, int ny,
                              double inv_dx, double inv_dy, int k) {
    const int i = k % nx;
    const int j = k / nx;
    const double gxl = i > 0 ? upwind_flux(u[k - 1], u[k], v[k] - v[k - 1], inv_dx) : 0.0;
    const double gxr = i + 1 < nx ? upwind_flux(u[k], u[k + 1], v[k + 1] - v[k], inv_dx) : 0.0;
    const double gyl = j > 0 ? upwind_flux(u[k - nx], u[k], v[k] - v[k - nx], inv_dy) : 0.0;
    const double gyr = j + 1 < ny ? upwind_flux(u[k], u[k + nx], v[k + nx] - v[k], inv_dy) : 0.0;
    return -(gxr - gxl) * inv_dx - (gyr - gyl) * inv_dy;
}

}  // namespace

void neumann_laplacian(const Grid& g, std::span<const double> f,
                       std::span<double> out) {
    const int n = g.size();
    switch (g.spec.geometry) {
        case Geometry::Interval: {
            const double inv_dx2 = 1.0 / (g.dx * g.dx);
#pragma omp parallel for schedule(static)
            for (int i = 0; i < n; ++i) out[i] = lap_cell_interval(f, n, inv_dx2, i);
            break;
        }
        case Geometry::RadialDisk: {
#pragma omp parallel for schedule(static)
            for (int i = 0; i < n; ++i) out[i] = lap_cell_radial(g, f, i);
            break;
        }
        case Geometry::Rectangle: {
            const double inv_dx2 = 1.0 / (g.dx * g.dx);
            const double inv_dy2 = 1.0 / (g.dy * g.dy);
            const int nx = g.nx, ny = g.ny;
#pragma omp parallel for schedule(static)
            for (int k = 0; k < n; ++k)
                out[k] = lap_cell_rect(f, nx, ny, inv_dx2, inv_dy2, k);
            break;
        }
    }
}

void chemotactic_divergence(const Grid& g, std::span<const double> u,
                            std::span<const double> v, std::span<double> out) {
    const int n = g.size();
    switch (g.spec.geometry) {
        case Geometry::Interval: {
            const double inv_dx = 1.0 / g.dx;
#pragma omp parallel for schedule(static)
            for (int i = 0; i < n; ++i) out[i] = chemo_cell_interval(u, v, n, inv_dx, i);
            break;
        }
        case Geometry::RadialDisk: {
#pragma omp parallel for schedule(static)
            for (int i = 0; i < n; ++i) out[i] = chemo_cell_radial(g, u, v, i);
            break;
        }
        case Geometry::Rectangle: {
            const double inv_dx = 1.0 / g.dx;
            const double inv_dy = 1.0 / g.dy;
            const int nx = g.nx, ny = g.ny;
#pragma omp parallel for schedule(static)
            for (int k = 0; k < n; ++k)
                out[k] = chemo_cell_rect(u, v, nx, ny, inv_dx, inv_dy, k);
            break;
        }
    }
}

double max_face_gradient(const Grid& g, std::span<const double> v) {
    double m = 0.0;
    if (g.spec.geometry == Geometry::Rectangle) {
        const double inv_dx = 1.0 / g.dx;
        const double inv_dy = 1.0 / g.dy;
        const int nx = g.nx, ny = g.ny, n = g.size();
#pragma omp parallel for schedule(static) reduction(max : m)
        for (int k = 0; k < n; ++k) {
            const int i = k % nx;
            const int j = k / nx;
            if (i + 1 < nx) m = std::max(m, std::abs((v[k + 1] - v[k]) * inv_dx));
            if (j + 1 < ny) m = std::max(m, std::abs((v[k + nx] - v[k]) * inv_dy));
        }
    } else {
        const double inv_dx = 1.0 / g.dx;
        for (int i = 1; i < g.nx; ++i)
            m = std::max(m, std::abs((v[i] - v[i - 1]) * inv_dx));
    }
    return m;
}

double grad_norm_lq(const Grid& g, std::span<const double> v, double q) {
    if (!(q >= 1.0)) throw std::invalid_argument("grad_norm_lq: q must be >= 1");
    double s = 0.0;
    switch (g.spec.geometry) {
        case Geometry::Interval: {
            const double inv_dx = 1.0 / g.dx;
            for (int i = 1; i < g.nx; ++i)
                s += std::pow(std::abs((v[i] - v[i - 1]) * inv_dx), q) * g.dx;
            break;
        }
        case Geometry::RadialDisk: {
            const double inv_dr = 1.0 / g.dx;
            for (int i = 1; i < g.nx; ++i)
                s += std::pow(std::abs((v[i] - v[i - 1]) * inv_dr), q) *
                     two_pi * g.face_r(i) * g.dx;
            break;
        }
        case Geometry::Rectangle: {
            const double inv_dx = 1.0 / g.dx;
            const double inv_dy = 1.0 / g.dy;
            const double face_vol = g.dx * g.dy;
            const int nx = g.nx, ny = g.ny;
            for (int j = 0; j < ny; ++j) {
                for (int i = 1; i < nx; ++i) {
                    const int k = g.index(i, j);
                    s += std::pow(std::abs((v[k] - v[k - 1]) * inv_dx), q) * face_vol;
                }
            }
            for (int j = 1; j < ny; ++j) {
                for (int i = 0; i < nx; ++i) {
                    const int k = g.index(i, j);
                    s += std::pow(std::abs((v[k] - v[k - nx]) * inv_dy), q) * face_vol;
                }
            }
            break;
        }
    }
    return std::pow(s, 1.0 / q);
}

void thomas_solve(std::span<const double> sub, std::span<const double> diag,
                  std::span<const double> sup, std::span<const double> rhs,
                  std::span<double> x, std::span<double> scratch) {
    const int n = static_cast<int>(rhs.size());
    scratch[0] = sup[0] / diag[0];
    x[0] = rhs[0] / diag[0];
    for (int i = 1; i < n; ++i) {
        const double m = 1.0 / (diag[i] - sub[i] * scratch[i - 1]);
        scratch[i] = sup[i] * m;
        x[i] = (rhs[i] - sub[i] * x[i - 1]) * m;
    }
    for (int i = n - 2; i >= 0; --i) x[i] -= scratch[i] * x[i + 1];
}

namespace {

struct LineBuffers {
    std::vector<double> sub, diag, sup, rhs, sol, cp;
    void resize(int n) {
        sub.resize(n);
        diag.resize(n);
        sup.resize(n);
        rhs.resize(n);
        sol.resize(n);
        cp.resize(n);
    }
};

LineBuffers& line_buffers(int n) {
    thread_local LineBuffers b;
    b.resize(n);
    return b;
}

// One tridiagonal line of (base - a*D2) with zero-flux ends on a uniform
// spacing; gathers the right-hand side with the given stride and scatters
// the solution back likewise.
void solve_uniform_line(int n, double a, double base, const double* f,
                        int f_stride, double* out, int out_stride) {
    LineBuffers& b = line_buffers(n);
    for (int i = 0; i < n; ++i) {
        b.sub[i] = i > 0 ? -a : 0.0;
        b.sup[i] = i + 1 < n ? -a : 0.0;
        b.diag[i] = base - b.sub[i] - b.sup[i];
        b.rhs[i] = f[i * f_stride];
    }
    thomas_solve(b.sub, b.diag, b.sup, b.rhs, b.sol, b.cp);
    for (int i = 0; i < n; ++i) out[i * out_stride] = b.sol[i];
}

void solve_radial_line(const Grid& g, double coeff, double base,
                       std::span<const double> f, std::span<double> out) {
    const int n = g.nx;
    const double inv_dr = 1.0 / g.dx;
    LineBuffers& b = line_buffers(n);
    for (int i = 0; i < n; ++i) {
        const double inv_vol = 1.0 / g.cell_volume[i];
        b.sub[i] = i > 0 ? -coeff * two_pi * g.face_r(i) * inv_dr * inv_vol : 0.0;
        b.sup[i] = i + 1 < n ? -coeff * two_pi * g.face_r(i + 1) * inv_dr * inv_vol : 0.0;
        b.diag[i] = base - b.sub[i] - b.sup[i];
        b.rhs[i] = f[i];
    }
    thomas_solve(b.sub, b.diag, b.sup, b.rhs, b.sol, b.cp);
    for (int i = 0; i < n; ++i) out[i] = b.sol[i];
}

enum class Threading { Parallel, Serial };

// Row sums equal `base` in every row, so constants solve exactly:
// x = c / (1 + decay). In 2D the x sweep carries the (1 + decay) factor
// and the y sweep factor has unit base, preserving that property.
void implicit_diffusion_impl(const Grid& g, std::span<const double> f,
                             double coeff, double decay, std::span<double> out,
                             Threading threading) {
    const double base = 1.0 + decay;
    switch (g.spec.geometry) {
        case Geometry::Interval: {
            const double a = coeff / (g.dx * g.dx);
            solve_uniform_line(g.nx, a, base, f.data(), 1, out.data(), 1);
            break;
        }
        case Geometry::RadialDisk:
            solve_radial_line(g, coeff, base, f, out);
            break;
        case Geometry::Rectangle: {
            const double ax = coeff / (g.dx * g.dx);
            const double ay = coeff / (g.dy * g.dy);
            const int nx = g.nx, ny = g.ny;
            if (threading == Threading::Parallel) {
#pragma omp parallel for schedule(static)
                for (int j = 0; j < ny; ++j)
                    solve_uniform_line(nx, ax, base, f.data() + j * nx, 1,
                                       out.data() + j * nx, 1);
#pragma omp parallel for schedule(static)
                for (int i = 0; i < nx; ++i)
                    solve_uniform_line(ny, ay, 1.0, out.data() + i, nx,
                                       out.data() + i, nx);
            } else {
                for (int j = 0; j < ny; ++j)
                    solve_uniform_line(nx, ax, base, f.data() + j * nx, 1,
                                       out.data() + j * nx, 1);
                for (int i = 0; i < nx; ++i)
                    solve_uniform_line(ny, ay, 1.0, out.data() + i, nx,
                                       out.data() + i, nx);
            }
            break;
        }
    }
}

double volume_mean(const Grid& g, std::span<const double> f) {
    double s = 0.0;
    for (int i = 0; i < g.size(); ++i) s += f[i] * g.cell_volume[i];
    return s / g.total_volume;
}

void poisson_direct_1d(const Grid& g, std::span<const double> rhs,
                       std::span<double> out) {
    const int n = g.nx;
    const double m = volume_mean(g, rhs);
    const bool radial = g.radial();
    // Flux through face i+1 accumulates the corrected rhs from the left;
    // dividing by the face area and integrating once more gives v.
    double area_flux = 0.0;
    out[0] = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
        area_flux += (rhs[i] - m) * g.cell_volume[i];
        const double area = radial ? two_pi * g.face_r(i + 1) : 1.0;
        out[i + 1] = out[i] + g.dx * area_flux / area;
    }
    const double vm = volume_mean(g, out);
    for (int i = 0; i < n; ++i) out[i] -= vm;
}

void poisson_cg_2d(const Grid& g, std::span<const double> rhs,
                   std::span<double> out) {
    const int n = g.size();
    const double m = volume_mean(g, rhs);
    std::vector<double> b(n), r(n), p(n), ap(n);
    double bnorm2 = 0.0;
    for (int i = 0; i < n; ++i) {
        b[i] = -(rhs[i] - m);  // solve (-Lap) v = -(rhs - mean)
        bnorm2 += b[i] * b[i];
    }
    std::fill(out.begin(), out.end(), 0.0);
    if (bnorm2 == 0.0) return;

    r = b;
    p = r;
    double rr = bnorm2;
    const double tol2 = 1e-24 * bnorm2;  // 1e-12 relative residual, squared
    const int max_iter = 20000;
    for (int it = 0; it < max_iter; ++it) {
        neumann_laplacian(g, p, ap);
        for (int i = 0; i < n; ++i) ap[i] = -ap[i];
        double pap = 0.0;
        for (int i = 0; i < n; ++i) pap += p[i] * ap[i];
        const double alpha = rr / pap;
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i) {
            out[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        // Keep the residual in the zero-mean subspace; rounding drifts it.
        const double rm = volume_mean(g, r);
        double rr_next = 0.0;
        for (int i = 0; i < n; ++i) {
            r[i] -= rm;
            rr_next += r[i] * r[i];
        }
        if (rr_next <= tol2) {
            const double vm = volume_mean(g, out);
            for (int i = 0; i < n; ++i) out[i] -= vm;
            return;
        }
        const double beta = rr_next / rr;
        rr = rr_next;
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    throw PoissonSolveError("poisson: conjugate gradients did not converge");
}

}  // namespace

void solve_implicit_diffusion(const Grid& g, std::span<const double> f,
                              double coeff, double decay, std::span<double> out) {
    implicit_diffusion_impl(g, f, coeff, decay, out, Threading::Parallel);
}

void solve_poisson_neumann(const Grid& g, std::span<const double> rhs,
                           std::span<double> out) {
    if (g.spec.geometry == Geometry::Rectangle)
        poisson_cg_2d(g, rhs, out);
    else
        poisson_direct_1d(g, rhs, out);
}

namespace serial {

void neumann_laplacian(const Grid& g, std::span<const double> f,
                       std::span<double> out) {
    const int n = g.size();
    switch (g.spec.geometry) {
        case Geometry::Interval: {
            const double inv_dx2 = 1.0 / (g.dx * g.dx);
            for (int i = 0; i < n; ++i) out[i] = lap_cell_interval(f, n, inv_dx2, i);
            break;
        }
        case Geometry::RadialDisk:
            for (int i = 0; i < n; ++i) out[i] = lap_cell_radial(g, f, i);
            break;
        case Geometry::Rectangle: {
            const double inv_dx2 = 1.0 / (g.dx * g.dx);
            const double inv_dy2 = 1.0 / (g.dy * g.dy);
            for (int k = 0; k < n; ++k)
                out[k] = lap_cell_rect(f, g.nx, g.ny, inv_dx2, inv_dy2, k);
            break;
        }
    }
}

void chemotactic_divergence(const Grid& g, std::span<const double> u,
                            std::span<const double> v, std::span<double> out) {
    const int n = g.size();
    switch (g.spec.geometry) {
        case Geometry::Interval: {
            const double inv_dx = 1.0 / g.dx;
            for (int i = 0; i < n; ++i) out[i] = chemo_cell_interval(u, v, n, inv_dx, i);
            break;
        }
        case Geometry::RadialDisk:
            for (int i = 0; i < n; ++i) out[i] = chemo_cell_radial(g, u, v, i);
            break;
        case Geometry::Rectangle: {
            const double inv_dx = 1.0 / g.dx;
            const double inv_dy = 1.0 / g.dy;
            for (int k = 0; k < n; ++k)
                out[k] = chemo_cell_rect(u, v, g.nx, g.ny, inv_dx, inv_dy, k);
            break;
        }
    }
}

double max_face_gradient(const Grid& g, std::span<const double> v) {
    double m = 0.0;
    if (g.spec.geometry == Geometry::Rectangle) {
        const double inv_dx = 1.0 / g.dx;
        const double inv_dy = 1.0 / g.dy;
        const int nx = g.nx, ny = g.ny, n = g.size();
        for (int k = 0; k < n; ++k) {
            const int i = k % nx;
            const int j = k / nx;
            if (i + 1 < nx) m = std::max(m, std::abs((v[k + 1] - v[k]) * inv_dx));
            if (j + 1 < ny) m = std::max(m, std::abs((v[k + nx] - v[k]) * inv_dy));
        }
    } else {
        const double inv_dx = 1.0 / g.dx;
        for (int i = 1; i < g.nx; ++i)
            m = std::max(m, std::abs((v[i] - v[i - 1]) * inv_dx));
    }
    return m;
}

void solve_implicit_diffusion(const Grid& g, std::span<const double> f,
                              double coeff, double decay, std::span<double> out) {
    implicit_diffusion_impl(g, f, coeff, decay, out, Threading::Serial);
}

}  // namespace serial

}  // namespace chemovir::kernels
