#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "tfphase/fields.hpp"
#include "tfphase/schemes.hpp"

namespace tfp {

/// Experiment parameters for one named preset (grid sizes and step counts
/// are defaults; the CLI can override them).
struct PresetParams {
    std::string name;
    SchemeKind scheme;
    double eps;
    double gamma;
    double S;
    double dt;
    int grid_n;
    double domain_length;
    double origin;
    double default_alpha;
};

const PresetParams& preset_params(const std::string& name);

/// Four-petal flower interface on [-1,1]^2:
/// tanh((2r/3 - 1/4 - (1+cos 4 theta)/16) / (sqrt(2) eps)) with theta the
/// polar angle atan2(y, x).
ScalarField2D preset_flower(const GridDescriptor& g, double eps = 0.025);

/// Seven smooth bumps on [0,2pi]^2: -1 + sum_i f(dist_i - r_i) with
/// f(s) = 2 exp(-eps^2/s^2) for s < 0 and 0 otherwise, eps = 0.1.
ScalarField2D preset_seven_circles(const GridDescriptor& g, double eps = 0.1);

/// I.i.d. uniform [-1,1] samples from a SplitMix-seeded mt19937_64 mapped via
/// the top 53 bits; bit-reproducible across platforms for a fixed seed.
ScalarField2D preset_ch_random(const GridDescriptor& g, std::uint64_t seed);

/// Initial field for a preset name (seed only used by ch-random).
ScalarField2D preset_initial(const std::string& name, const GridDescriptor& g,
                             std::uint64_t seed);

} // namespace tfp
