#pragma once

#include <cstdint>
#include <memory>

#include "chemovir/models.hpp"

namespace chemovir {

/// splitmix64: the fixed 64-bit permutation generator used for all seeded
/// initial data, so fixtures reproduce bit-for-bit across platforms.
struct SplitMix64 {
    std::uint64_t state = 0;

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    // uniform in [0, 1) with 53-bit resolution
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    // uniform in (-1, 1)
    double symmetric() { return 2.0 * uniform() - 1.0; }
};

enum class InitialFamily { RandomBump, ConcentratedGaussian, Constant };

/// Seeded initial data, parameterized by target integrals so the mass
/// entering the total-mass relation is set exactly.
///   RandomBump: positive low-mode cosine perturbation of a constant,
///     independently drawn per species from one seeded stream, then
///     scaled to the target integral.
///   ConcentratedGaussian: u is a centered Gaussian profile of the given
///     width scaled to mass_u; v and w are uniform with their targets.
///   Constant: every species uniform at target/|domain|.
struct InitialSpec {
    InitialFamily family = InitialFamily::Constant;
    std::uint64_t seed = 1;
    double mass_u = 1.0;
    double mass_v = 0.0;
    double mass_w = 0.0;
    double width = 0.2;  // ConcentratedGaussian only

    void validate() const;
};

/// Builds the t=0 state for the given system: w stays empty for the
/// two-species systems, and v starts empty for KSParabolicElliptic
/// (the stepper recomputes it from u on entry).
State make_initial_state(std::shared_ptr<const Grid> grid,
                         const InitialSpec& spec, SystemKind system);

}  // namespace chemovir
