#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "chemovir/grid.hpp"
#include "chemovir/kernels.hpp"

using namespace chemovir;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_per_call(const std::function<void()>& fn, int repeats) {
    fn();  // warm up
    const auto t0 = Clock::now();
    for (int i = 0; i < repeats; ++i) fn();
    const std::chrono::duration<double> elapsed = Clock::now() - t0;
    return elapsed.count() / repeats;
}

void fill_smooth(const Grid& g, std::vector<double>& u, std::vector<double>& v) {
    u.resize(g.size());
    v.resize(g.size());
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const size_t k = g.index(i, j);
            const double x = g.cell_x(i), y = g.cell_y(j);
            u[k] = 1.0 + 0.5 * std::cos(M_PI * x) * std::cos(M_PI * y);
            v[k] = 0.3 * std::cos(2.0 * M_PI * x) + 0.1 * y;
        }
}

const char* geometry_name(Geometry g) {
    switch (g) {
        case Geometry::Interval: return "interval";
        case Geometry::Rectangle: return "rectangle";
        case Geometry::RadialDisk: return "radial_disk";
    }
    return "?";
}

bool identical(const std::vector<double>& a, const std::vector<double>& b) {
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return false;
    return true;
}

void report(const char* name, double serial_s, double parallel_s, bool match) {
    std::printf("%-24s %10.3f us %10.3f us   x%-6.2f %s\n", name, serial_s * 1e6,
                parallel_s * 1e6, serial_s / parallel_s,
                match ? "bitwise-equal" : "MISMATCH");
}

void bench_grid(const GridSpec& spec, int repeats) {
    const Grid g = build_grid(spec);
    std::vector<double> u, v, out_s(g.size()), out_p(g.size());
    fill_smooth(g, u, v);

    std::printf("\n%s %dx%d (%d cells)\n", geometry_name(spec.geometry), g.nx, g.ny,
                g.size());

    double ts = seconds_per_call([&] { kernels::serial::neumann_laplacian(g, u, out_s); },
                                 repeats);
    double tp =
        seconds_per_call([&] { kernels::neumann_laplacian(g, u, out_p); }, repeats);
    report("neumann_laplacian", ts, tp, identical(out_s, out_p));

    ts = seconds_per_call(
        [&] { kernels::serial::chemotactic_divergence(g, u, v, out_s); }, repeats);
    tp = seconds_per_call([&] { kernels::chemotactic_divergence(g, u, v, out_p); },
                          repeats);
    report("chemotactic_divergence", ts, tp, identical(out_s, out_p));

    double ms = 0.0, mp = 0.0;
    ts = seconds_per_call([&] { ms = kernels::serial::max_face_gradient(g, v); },
                          repeats);
    tp = seconds_per_call([&] { mp = kernels::max_face_gradient(g, v); }, repeats);
    report("max_face_gradient", ts, tp, ms == mp);

    ts = seconds_per_call(
        [&] { kernels::serial::solve_implicit_diffusion(g, u, 1e-3, 1.0, out_s); },
        repeats);
    tp = seconds_per_call(
        [&] { kernels::solve_implicit_diffusion(g, u, 1e-3, 1.0, out_p); }, repeats);
    report("solve_implicit_diffusion", ts, tp, identical(out_s, out_p));
}

}  // namespace

int main(int argc, char** argv) {
    int repeats = 200;
    if (argc > 1) repeats = std::stoi(argv[1]);

#ifdef _OPENMP
    std::printf("threads: %d (set OMP_NUM_THREADS to change)\n",
                omp_get_max_threads());
#else
    std::printf("threads: 1 (built without OpenMP)\n");
#endif
    std::printf("%-24s %13s %13s   %-7s\n", "kernel", "serial", "parallel", "ratio");

    bench_grid({Geometry::Interval, 1.0, 1.0, 16384, 1}, repeats);
    bench_grid({Geometry::RadialDisk, 1.0, 1.0, 16384, 1}, repeats);
    bench_grid({Geometry::Rectangle, 1.0, 1.0, 512, 512}, repeats);
    return 0;
}
