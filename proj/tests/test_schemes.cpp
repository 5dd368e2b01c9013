#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "tfphase/errors.hpp"
#include "tfphase/mittag.hpp"
#include "tfphase/presets.hpp"
#include "tfphase/schemes.hpp"

using namespace tfp;

namespace {

constexpr double kPi = std::numbers::pi;

double max_field_diff(const ScalarField2D& a, const ScalarField2D& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::fabs(a.values()[i] - b.values()[i]));
    return m;
}

bool e_tilde_nonincreasing(const std::vector<EnergyRecord>& recs, double rel_slack,
                           std::size_t from = 1) {
    const double slack = rel_slack * std::fabs(recs.front().E_tilde);
    for (std::size_t i = from + 1; i < recs.size(); ++i)
        if (recs[i].E_tilde > recs[i - 1].E_tilde + slack) return false;
    return true;
}

} // namespace

TEST_SUITE("schemes") {

TEST_CASE("truncated potential branches") {
    SUBCASE("interior is the plain double well") {
        CHECK(truncated_F(0.5, 1.0) == doctest::Approx(0.25 * 0.5625));
        CHECK(truncated_f(0.5, 1.0) == doctest::Approx(0.125 - 0.5));
    }
    SUBCASE("M = 1, u = 2") {
        CHECK(truncated_F(2.0, 1.0) == doctest::Approx(1.0));
        CHECK(truncated_f(2.0, 1.0) == doctest::Approx(2.0));
    }
    SUBCASE("continuity and C1 matching at the seams") {
        for (double M : {1.0, 1.5, 2.0}) {
            for (double s : {1.0, -1.0}) {
                const double at = s * M;
                CHECK(truncated_F(at + s * 1e-12, M) ==
                      doctest::Approx(truncated_F(at, M)).epsilon(1e-9));
                const double h = 1e-6;
                const double fd =
                    (truncated_F(at + h, M) - truncated_F(at - h, M)) / (2.0 * h);
                CHECK(fd == doctest::Approx(truncated_f(at, M)).epsilon(1e-7));
            }
        }
    }
    SUBCASE("curvature bound |F''| <= 3M^2 - 1") {
        const double M = 1.2, L = 3.0 * M * M - 1.0;
        for (double u = -4.0; u <= 4.0; u += 0.01) {
            const double h = 1e-5;
            const double f2 = (truncated_f(u + h, M) - truncated_f(u - h, M)) / (2.0 * h);
            CHECK(std::fabs(f2) <= L + 1e-3);
        }
    }
    SUBCASE("M < 1 rejected") {
        CHECK_THROWS_AS(truncated_F(0.0, 0.5), std::invalid_argument);
    }
}

TEST_CASE("L2 stabilization bound") {
    const double S = stab_bound_l2(FractionalOrder(0.5), 1.0, 1.0);
    CHECK(S == doctest::Approx(28.274333882308139).epsilon(1e-12));
    // sufficiency: a/(g Gamma(3-a) dt^a) + S dt >= 3L/2 for all dt
    for (double alpha : {0.3, 0.5, 0.8}) {
        for (double gamma : {0.5, 1.0, 2.0}) {
            const double Sb = stab_bound_l2(FractionalOrder(alpha), gamma, 1.0);
            const double L = 2.0;
            double lo = 1e30;
            for (double e = -4.0; e <= 2.0; e += 0.01) {
                const double dt = std::pow(10.0, e);
                lo = std::min(lo, alpha / (gamma * std::tgamma(3.0 - alpha) * std::pow(dt, alpha)) +
                                      Sb * dt);
            }
            CAPTURE(alpha);
            CAPTURE(gamma);
            CHECK(lo >= 1.5 * L - 1e-9);
        }
    }
}

TEST_CASE("uniform states are exact fixed points") {
    const GridDescriptor g(16, 16, 2.0 * kPi, 2.0 * kPi);
    for (SchemeKind k : {SchemeKind::L1_AC, SchemeKind::L2_AC, SchemeKind::L1_CH}) {
        for (double val : {1.0, -1.0}) {
            SchemeConfig cfg;
            cfg.scheme = k;
            cfg.alpha = 0.6;
            cfg.gamma = 1.0;
            cfg.eps = 0.2;
            cfg.dt = 0.05;
            cfg.S = (k == SchemeKind::L1_AC) ? 2.0 : 1.0;
            cfg.n_steps = 5;
            auto res = run(cfg, ScalarField2D(g, val));
            CAPTURE(to_string(k));
            CHECK(max_field_diff(res.state->history().field(5), ScalarField2D(g, val)) < 1e-12);
            // record stream: E_tilde pinned to E on a frozen trajectory
            for (const auto& r : res.records) CHECK(r.E_tilde == doctest::Approx(r.E).epsilon(1e-14));
        }
    }
    SUBCASE("Cahn-Hilliard preserves any constant") {
        SchemeConfig cfg;
        cfg.scheme = SchemeKind::L1_CH;
        cfg.gamma = 0.02;
        cfg.eps = 0.05;
        cfg.S = 0.1;
        cfg.dt = 0.1;
        cfg.n_steps = 4;
        auto res = run(cfg, ScalarField2D(g, 0.37));
        CHECK(max_field_diff(res.state->history().field(4), ScalarField2D(g, 0.37)) < 1e-13);
    }
    SUBCASE("u = 0 with the untruncated force") {
        SchemeConfig cfg;
        cfg.scheme = SchemeKind::L1_AC;
        cfg.S = 2.0; // untruncated cubic in this regime, f(0) = 0
        cfg.n_steps = 4;
        cfg.dt = 0.1;
        auto res = run(cfg, ScalarField2D(g, 0.0));
        CHECK(max_abs(res.state->history().field(4)) < 1e-13);
    }
}

TEST_CASE("run with zero steps produces the initial record only") {
    const GridDescriptor g(16, 16, 2.0, 2.0, -1.0, -1.0);
    SchemeConfig cfg;
    cfg.n_steps = 0;
    auto res = run(cfg, preset_flower(g));
    REQUIRE(res.records.size() == 1);
    CHECK(res.records[0].E_tilde == res.records[0].E);
    CHECK(res.state->history().count() == 1);
}

TEST_CASE("Cahn-Hilliard conserves mass to roundoff") {
    const GridDescriptor g(32, 32, 2.0 * kPi, 2.0 * kPi);
    SchemeConfig cfg;
    cfg.scheme = SchemeKind::L1_CH;
    cfg.alpha = 0.6;
    cfg.gamma = 0.02;
    cfg.eps = 0.05;
    cfg.S = 0.1;
    cfg.dt = 0.1;
    cfg.n_steps = 25;
    const auto u0 = preset_ch_random(g, 42);
    const double m0 = mean(u0);
    auto res = run(cfg, u0);
    for (int n = 0; n <= cfg.n_steps; ++n)
        CHECK(std::fabs(mean(res.state->history().field(n)) - m0) <= 1e-12 * std::fabs(m0) + 1e-15);
    CHECK(e_tilde_nonincreasing(res.records, 1e-10));
}

TEST_CASE("alpha -> 1 L1 step matches a backward-Euler IMEX step") {
    const GridDescriptor g(24, 24, 2.0 * kPi, 2.0 * kPi);
    ScalarField2D u0(g);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            u0(i, j) = 0.4 * std::sin(g.x(i)) * std::cos(g.y(j)) + 0.1 * std::cos(2.0 * g.x(i));

    SchemeConfig cfg;
    cfg.scheme = SchemeKind::L1_AC;
    cfg.alpha = 1.0 - 1e-6;
    cfg.gamma = 1.3;
    cfg.eps = 0.3;
    cfg.S = 2.0;
    cfg.dt = 0.02;
    cfg.n_steps = 1;
    auto res = run(cfg, u0);
    const auto& u1 = res.state->history().field(1);

    // backward-Euler IMEX oracle: (u1 - u0)/dt = gamma (eps^2 lap u1 - f(u0) - S(u1 - u0))
    auto ws = SpectralWorkspace::get(g);
    SpectralField2D rhs_hat(g);
    ScalarField2D rhs(g), be(g);
    for (std::size_t i = 0; i < rhs.size(); ++i) {
        const double v = u0.values()[i];
        rhs.values()[i] = (1.0 / cfg.dt + cfg.gamma * cfg.S) * v - cfg.gamma * (v * v * v - v);
    }
    ws->forward(rhs, rhs_hat);
    auto c = rhs_hat.coeffs();
    auto k2 = ws->ksq();
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] /= (1.0 / cfg.dt + cfg.gamma * cfg.S + cfg.gamma * cfg.eps * cfg.eps * k2[i]);
    ws->inverse(rhs_hat, be);

    double rel = 0.0;
    for (std::size_t i = 0; i < be.size(); ++i)
        rel = std::max(rel, std::fabs(u1.values()[i] - be.values()[i]));
    CHECK(rel / max_abs(be) < 1e-4);
}

TEST_CASE("linear single-mode problem tracks the Mittag-Leffler reference") {
    // d_t^a u = gamma eps^2 lap u on one Fourier mode, force dropped via the
    // test hook; the error decays at observed order >= 1.
    const GridDescriptor g(16, 16, 2.0 * kPi, 2.0 * kPi);
    ScalarField2D u0(g);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) u0(i, j) = 0.8 * std::sin(g.x(i));

    const double alpha = 0.5;
    std::vector<double> errs;
    for (int lev = 0; lev < 4; ++lev) {
        const int N = 8 << lev;
        SchemeConfig cfg;
        cfg.scheme = SchemeKind::L1_AC;
        cfg.alpha = alpha;
        cfg.gamma = 1.0;
        cfg.eps = 1.0;
        cfg.S = 0.0;
        cfg.dt = 1.0 / N;
        cfg.n_steps = N;
        cfg.linear_only = true;
        cfg.energy_tracking = false;
        auto res = run(cfg, u0);
        const double factor = ml({alpha, 1.0, -1.0, 1e-12}); // lambda = 1, t = 1
        ScalarField2D ref(g);
        for (std::size_t i = 0; i < ref.size(); ++i) ref.values()[i] = factor * u0.values()[i];
        errs.push_back(max_field_diff(res.state->history().field(N), ref));
    }
    for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
        const double order = std::log2(errs[i] / errs[i + 1]);
        CHECK(order >= 0.9);
    }
}

TEST_CASE("maximum principle holds on a resolved interface") {
    // 64 points across [-1,1]^2 with eps = 0.1 resolves the tanh layer; the
    // desk-scale acceptance run with eps = 0.025 does not (see acceptance).
    const GridDescriptor g(64, 64, 2.0, 2.0, -1.0, -1.0);
    SchemeConfig cfg;
    cfg.scheme = SchemeKind::L1_AC;
    cfg.alpha = 0.6;
    cfg.gamma = 2.0;
    cfg.eps = 0.1;
    cfg.S = 20.0;
    cfg.dt = 0.02;
    cfg.n_steps = 60;
    cfg.energy_stride = 5;
    auto res = run(cfg, preset_flower(g, cfg.eps));
    double worst = 0.0;
    for (int n = 0; n <= cfg.n_steps; ++n)
        worst = std::max(worst, max_abs(res.state->history().field(n)));
    CHECK(worst <= 1.0 + 1e-9);
    CHECK(e_tilde_nonincreasing(res.records, 1e-10));
    for (const auto& r : res.records) CHECK(r.E_tilde >= r.E - 1e-12);
    CHECK(res.records.front().E_tilde == res.records.front().E);
    CHECK(res.state->last_residual() <= 1e-10);
}

TEST_CASE("L2 scheme dissipates the Theorem-form energy with S at the bound") {
    const GridDescriptor g(32, 32, 2.0 * kPi, 2.0 * kPi);
    const auto u0 = preset_seven_circles(g);
    for (double alpha : {0.4, 0.8}) {
        SchemeConfig cfg;
        cfg.scheme = SchemeKind::L2_AC;
        cfg.alpha = alpha;
        cfg.gamma = 1.0;
        cfg.eps = 0.1;
        cfg.S = stab_bound_l2(FractionalOrder(alpha), cfg.gamma, cfg.M);
        cfg.dt = 0.05;
        cfg.n_steps = 40;
        auto res = run(cfg, u0);
        CAPTURE(alpha);
        CHECK(e_tilde_nonincreasing(res.records, 1e-10, /*from=*/1));
        CHECK(cfg.guarantee_applies());
    }
}

TEST_CASE("guarantee_applies reflects the theorem hypotheses") {
    SchemeConfig cfg;
    cfg.scheme = SchemeKind::L1_AC;
    cfg.S = 2.0;
    CHECK(cfg.guarantee_applies());
    cfg.S = 1.0;
    CHECK_FALSE(cfg.guarantee_applies());
    cfg.scheme = SchemeKind::L1_CH;
    CHECK(cfg.guarantee_applies()); // S = 1 >= L/2 = 1 at M = 1
    cfg.S = 0.5;
    CHECK_FALSE(cfg.guarantee_applies());
    cfg.scheme = SchemeKind::L2_AC;
    cfg.alpha = 0.8;
    cfg.S = 4.0; // bound is ~3.77 at gamma = 1, M = 1
    cfg.gamma = 1.0;
    CHECK(cfg.guarantee_applies());
    cfg.S = 1.0;
    CHECK_FALSE(cfg.guarantee_applies());
}

TEST_CASE("modified energy difference vanishes as alpha -> 1") {
    // alpha = 1 - 1e-3 stays below the alpha = 0.5 curve at matched times
    const GridDescriptor g(32, 32, 2.0, 2.0, -1.0, -1.0);
    const auto u0 = preset_flower(g);
    auto run_diff = [&](double alpha) {
        SchemeConfig cfg;
        cfg.scheme = SchemeKind::L1_AC;
        cfg.alpha = alpha;
        cfg.gamma = 2.0;
        cfg.eps = 0.025;
        cfg.S = 20.0;
        cfg.dt = 0.05;
        cfg.n_steps = 40;
        auto res = run(cfg, u0);
        std::vector<double> d;
        for (const auto& r : res.records) d.push_back(r.E_tilde - r.E);
        return d;
    };
    const auto near1 = run_diff(1.0 - 1e-3);
    const auto half = run_diff(0.5);
    REQUIRE(near1.size() == half.size());
    // fixed-time statement: skip the first few steps where t ~ dt and the
    // discrete memory term is still dominated by the single-step jump
    for (std::size_t i = 8; i < near1.size(); ++i) {
        CHECK(near1[i] >= -1e-14);
        CHECK(near1[i] < half[i]);
    }
}

TEST_CASE("long-horizon memory-term behavior on the flower dynamics") {
    // E~ - E is nonnegative throughout and ordered in alpha (larger alpha,
    // smaller difference). Its eventual decay toward E happens on time scales
    // beyond t = 64 for this preset; the measured peak position is reported
    // as a warning, not asserted.
    const GridDescriptor g(32, 32, 2.0, 2.0, -1.0, -1.0);
    const auto u0 = preset_flower(g);
    auto diffs = [&](double alpha) {
        SchemeConfig cfg;
        cfg.scheme = SchemeKind::L1_AC;
        cfg.alpha = alpha;
        cfg.gamma = 2.0;
        cfg.eps = 0.025;
        cfg.S = 20.0;
        cfg.dt = 0.1;
        cfg.n_steps = 640; // t = 64
        cfg.energy_stride = 8;
        auto res = run(cfg, u0);
        std::vector<double> d;
        for (const auto& r : res.records) d.push_back(r.E_tilde - r.E);
        return d;
    };
    const auto d6 = diffs(0.6);
    const auto d9 = diffs(0.9);
    REQUIRE(d6.size() == d9.size());
    for (std::size_t i = 0; i < d6.size(); ++i) CHECK(d6[i] >= -1e-14);
    // paper-supported ordering: larger alpha gives the smaller difference
    for (std::size_t i = 5; i < d6.size(); ++i) CHECK(d9[i] < d6[i]);
    const auto peak9 = std::max_element(d9.begin(), d9.end()) - d9.begin();
    const std::size_t i8 = 10; // t = 8 at stride 8, dt = 0.1
    WARN_MESSAGE(d9.back() < d9[i8],
                 "memory term at t=64 (", d9.back(), ") still above its t=8 value (", d9[i8],
                 "), peak at sample ", peak9, "/", d9.size() - 1,
                 ": decay toward E is slower than this horizon");
}

TEST_CASE("empirical Hoelder bound over a flower run") {
    // ||u(t)-u(s)|| / |t-s|^alpha stays below a fixed constant across pairs
    const GridDescriptor g(32, 32, 2.0, 2.0, -1.0, -1.0);
    SchemeConfig cfg;
    cfg.scheme = SchemeKind::L1_AC;
    cfg.alpha = 0.6;
    cfg.gamma = 2.0;
    cfg.eps = 0.1;
    cfg.S = 20.0;
    cfg.dt = 0.02;
    cfg.n_steps = 80;
    cfg.energy_tracking = false;
    auto res = run(cfg, preset_flower(g, cfg.eps));
    const auto& h = res.state->history();
    double sup = 0.0;
    for (int i = 0; i <= cfg.n_steps; i += 4) {
        for (int j = i + 1; j <= cfg.n_steps; j += 4) {
            const double d = std::sqrt(l2_sq_diff(h.field(i), h.field(j)));
            sup = std::max(sup, d / std::pow((j - i) * cfg.dt, cfg.alpha));
        }
    }
    // empirical regression bound: observed sup is ~1.5 on this configuration
    CHECK(sup < 5.0);
}

TEST_CASE("a diverging run aborts with diagnostics instead of emitting garbage") {
    const GridDescriptor g(16, 16, 2.0 * kPi, 2.0 * kPi);
    SchemeConfig cfg;
    cfg.scheme = SchemeKind::L1_AC;
    cfg.alpha = 0.5;
    cfg.gamma = 1000.0;
    cfg.eps = 0.01;
    cfg.S = 0.0;
    cfg.dt = 100.0;
    cfg.n_steps = 400;
    cfg.energy_tracking = false;
    ScalarField2D u0(g, 10.0);
    CHECK_THROWS_AS(run(cfg, u0), SolverDiverged);
}

TEST_CASE("config validation") {
    const GridDescriptor g(16, 16, 1.0, 1.0);
    SchemeConfig cfg;
    cfg.alpha = 1.0;
    CHECK_THROWS_AS(run(cfg, ScalarField2D(g)), std::invalid_argument);
    cfg.alpha = 0.5;
    cfg.dt = 0.0;
    CHECK_THROWS_AS(run(cfg, ScalarField2D(g)), std::invalid_argument);
    cfg.dt = 0.1;
    cfg.M = 0.5;
    CHECK_THROWS_AS(run(cfg, ScalarField2D(g)), std::invalid_argument);
}

} // TEST_SUITE
