#include "tfphase/presets.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace tfp {

namespace {

constexpr double kPi = std::numbers::pi;

const std::array<PresetParams, 3> kPresets = {{
    // name        scheme              eps    gamma  S     dt    n    L        x0    alpha
    {"flower", SchemeKind::L1_AC, 0.025, 2.0, 20.0, 0.01, 128, 2.0, -1.0, 0.9},
    {"circles", SchemeKind::L2_AC, 0.1, 1.0, 1.0, 0.05, 128, 2.0 * kPi, 0.0, 0.8},
    {"ch-random", SchemeKind::L1_CH, 0.05, 0.02, 0.1, 0.1, 128, 2.0 * kPi, 0.0, 0.9},
}};

} // namespace

const PresetParams& preset_params(const std::string& name) {
    for (const auto& p : kPresets)
        if (p.name == name) return p;
    throw std::invalid_argument("unknown preset '" + name +
                                "' (expected flower, circles or ch-random)");
}

ScalarField2D preset_flower(const GridDescriptor& g, double eps) {
    ScalarField2D u(g);
    const double inv = 1.0 / (std::sqrt(2.0) * eps);
    for (int i = 0; i < g.nx; ++i) {
        const double x = g.x(i);
        for (int j = 0; j < g.ny; ++j) {
            const double y = g.y(j);
            const double r = std::sqrt(x * x + y * y);
            // polar angle; the paper prints arctanh(x/y), which is not an
            // angle at all -- atan2 reproduces Figure 1's four-fold symmetry
            const double theta = std::atan2(y, x);
            const double arg = 2.0 * r / 3.0 - 0.25 - (1.0 + std::cos(4.0 * theta)) / 16.0;
            u(i, j) = std::tanh(arg * inv);
        }
    }
    return u;
}

ScalarField2D preset_seven_circles(const GridDescriptor& g, double eps) {
    static constexpr std::array<double, 7> cx = {kPi / 2, kPi / 4,     kPi / 2, kPi,
                                                 3 * kPi / 2, kPi, 3 * kPi / 2};
    static constexpr std::array<double, 7> cy = {kPi / 2, 3 * kPi / 4, 5 * kPi / 4, kPi / 4,
                                                 kPi / 4, kPi, 3 * kPi / 2};
    static constexpr std::array<double, 7> rad = {kPi / 5,  2 * kPi / 15, 2 * kPi / 15, kPi / 10,
                                                  kPi / 10, kPi / 4,      kPi / 4};
    ScalarField2D u(g);
    const double e2 = eps * eps;
    for (int i = 0; i < g.nx; ++i) {
        const double x = g.x(i);
        for (int j = 0; j < g.ny; ++j) {
            const double y = g.y(j);
            double v = -1.0;
            for (std::size_t c = 0; c < 7; ++c) {
                const double dx = x - cx[c], dy = y - cy[c];
                const double s = std::sqrt(dx * dx + dy * dy) - rad[c];
                if (s < 0.0) v += 2.0 * std::exp(-e2 / (s * s));
            }
            u(i, j) = v;
        }
    }
    return u;
}

ScalarField2D preset_ch_random(const GridDescriptor& g, std::uint64_t seed) {
    // mt19937_64 output is pinned by the standard; the [0,1) mapping uses the
    // top 53 bits, so the field is bit-identical for a given seed everywhere.
    std::mt19937_64 rng(seed);
    ScalarField2D u(g);
    for (double& v : u.values()) {
        const double x01 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        v = 2.0 * x01 - 1.0;
    }
    return u;
}

ScalarField2D preset_initial(const std::string& name, const GridDescriptor& g,
                             std::uint64_t seed) {
    const auto& p = preset_params(name);
    if (name == "flower") return preset_flower(g, p.eps);
    if (name == "circles") return preset_seven_circles(g, p.eps);
    return preset_ch_random(g, seed);
}

} // namespace tfp
