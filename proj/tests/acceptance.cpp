// Acceptance suite: one pass/fail line per criterion, exit code is the number
// of failed criteria. Each check pins its tolerance in code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "tfphase/energy.hpp"
#include "tfphase/errors.hpp"
#include "tfphase/io.hpp"
#include "tfphase/mittag.hpp"
#include "tfphase/presets.hpp"
#include "tfphase/schemes.hpp"

using namespace tfp;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Criterion {
    std::string name;
    bool pass = true;
    std::vector<std::string> notes;

    void expect(bool ok, const std::string& detail) {
        if (!ok) {
            pass = false;
            notes.push_back("FAILED: " + detail);
        }
    }
    void note(const std::string& detail) { notes.push_back(detail); }
};

int g_failures = 0;

template <class Fn>
void criterion(const std::string& name, Fn&& body) {
    Criterion c{name};
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.pass = false;
        c.notes.push_back(std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %s (%.2f s)\n", c.pass ? "PASS" : "FAIL", name.c_str(), secs);
    for (const auto& n : c.notes) std::printf("       %s\n", n.c_str());
    std::fflush(stdout);
    if (!c.pass) ++g_failures;
}

double lsq_order(const std::vector<double>& errs) {
    const int m = static_cast<int>(errs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < m; ++i) {
        const double x = i * std::log(0.5), y = std::log(errs[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// worst upward step of E_tilde relative to |E_tilde(0)|
double worst_uptick(const std::vector<EnergyRecord>& recs, std::size_t from = 1) {
    double w = -1e300;
    for (std::size_t i = from + 1; i < recs.size(); ++i)
        w = std::max(w, recs[i].E_tilde - recs[i - 1].E_tilde);
    return w / std::fabs(recs.front().E_tilde);
}

void c1_coefficients(Criterion& c) {
    for (double alpha : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
        const auto w = l1_weights(FractionalOrder(alpha), 0.02, 257);
        for (int k = 0; k < 256; ++k) {
            if (!(w.b[k] > 0.0) || !(w.b[k] > w.b[k + 1])) {
                c.expect(false, "L1 weights not positive decreasing at alpha=" + fmt(alpha) +
                                    " k=" + std::to_string(k));
                return;
            }
        }
        const auto l2 = l2_coefficients(FractionalOrder(alpha), 258);
        double worst_sum = 0.0;
        for (int j = 1; j <= 256; ++j)
            worst_sum = std::max(worst_sum, std::fabs(l2.a[j] + l2.b[j] + l2.c[j]));
        c.expect(worst_sum <= 1e-11, "a+b+c residual " + fmt(worst_sum) + " at alpha=" + fmt(alpha));
        c.expect(l2.r1 > 0.0, "r1 <= 0 at alpha=" + fmt(alpha));
        const auto bad = l2.validate(1e-11);
        c.expect(!bad.has_value(), "alpha=" + fmt(alpha) + ": " + bad.value_or(""));
    }
}

void c2_operator_convergence(Criterion& c) {
    for (double alpha : {0.3, 0.5, 0.8}) {
        std::vector<double> e1, e2;
        for (int lev = 0; lev < 5; ++lev) {
            const int N = 16 << lev;
            const double dt = 1.0 / N;
            std::vector<double> u(N + 1);
            for (int k = 0; k <= N; ++k) u[k] = (k * dt) * (k * dt);
            const auto w = l1_weights(FractionalOrder(alpha), dt, N);
            e1.push_back(std::fabs(l1_apply(u, w) -
                                   caputo_exact_monomial(FractionalOrder(alpha), 2, 1.0)));
        }
        for (int lev = 0; lev < 5; ++lev) {
            const int N = 8 << lev;
            const double dt = 1.0 / N;
            std::vector<double> u(N + 1);
            for (int k = 0; k <= N; ++k) u[k] = std::pow(k * dt, 3);
            const auto l2 = l2_coefficients(FractionalOrder(alpha), N);
            e2.push_back(std::fabs(l2_apply(u, l2, dt, N) -
                                   caputo_exact_monomial(FractionalOrder(alpha), 3, 1.0)));
        }
        const double o1 = lsq_order(e1), o2 = lsq_order(e2);
        c.note("alpha=" + fmt(alpha) + ": L1 order " + fmt(o1) + " (target " + fmt(2 - alpha) +
               "), L2 order " + fmt(o2) + " (target " + fmt(3 - alpha) + ", cubic data)");
        c.expect(std::fabs(o1 - (2 - alpha)) <= 0.1, "L1 order off at alpha=" + fmt(alpha));
        c.expect(std::fabs(o2 - (3 - alpha)) <= 0.15, "L2 order off at alpha=" + fmt(alpha));
    }
}

void c3_lemma_fuzz(Criterion& c) {
    std::mt19937_64 rng(1234);
    std::normal_distribution<double> dist;
    for (double alpha : {0.3, 0.5, 0.8}) {
        int viol41 = 0, viol43 = 0;
        double margin41 = 1e300, margin43 = 1e300;
        const auto l2 = l2_coefficients(FractionalOrder(alpha), 20);
        for (int trial = 0; trial < 10000; ++trial) {
            const double dt = 0.05 + 0.1 * (trial % 9);
            {
                const int n = 1 + trial % 20;
                const auto w = l1_weights(FractionalOrder(alpha), dt, n);
                std::vector<double> u(n + 1);
                for (auto& v : u) v = dist(rng);
                const double lhs = l1_apply(u, w) * (u[n] - u[n - 1]);
                const double rhs = l1_discrete_D_scalar(u, w, n) -
                                   l1_discrete_D_scalar(std::span(u).first(n), w, n - 1);
                const double slack = 1e-12 * (std::fabs(lhs) + std::fabs(rhs) + 1.0);
                margin41 = std::min(margin41, lhs - rhs);
                if (lhs < rhs - slack) ++viol41;
            }
            {
                const int n = 2 + trial % 19;
                std::vector<double> u(n + 1);
                for (auto& v : u) v = dist(rng);
                const double du = u[n] - u[n - 1];
                const double lhs = l2_apply(u, l2, dt, n) * du;
                const double extra =
                    alpha / (std::tgamma(3.0 - alpha) * std::pow(dt, alpha)) * du * du;
                const double rhs = l2_discrete_D_scalar(u, l2, dt, n) -
                                   l2_discrete_D_scalar(std::span(u).first(n), l2, dt, n - 1) +
                                   extra;
                const double slack = 1e-12 * (std::fabs(lhs) + std::fabs(rhs) + 1.0);
                margin43 = std::min(margin43, lhs - rhs);
                if (lhs < rhs - slack) ++viol43;
            }
        }
        c.note("alpha=" + fmt(alpha) + ": 10000 histories per lemma, min margins " +
               fmt(margin41) + " / " + fmt(margin43));
        c.expect(viol41 == 0, "Lemma inequality (L1 form) violations at alpha=" + fmt(alpha) +
                                  ": " + std::to_string(viol41));
        c.expect(viol43 == 0, "Lemma inequality (L2 form) violations at alpha=" + fmt(alpha) +
                                  ": " + std::to_string(viol43));
    }
}

void c4_lemma31(Criterion& c) {
    const auto t2 = ScalarTrajectory::analytic(
        [](double t) { return t * t; }, [](double t) { return 2.0 * t; },
        [](double t, double xi) { return 2.0 * t * xi - xi * xi; });
    const auto sin_tr = ScalarTrajectory::analytic(
        [](double t) { return std::sin(t); }, [](double t) { return std::cos(t); },
        [](double t, double xi) { return 2.0 * std::cos(t - 0.5 * xi) * std::sin(0.5 * xi); });
    struct Case {
        const ScalarTrajectory* u;
        double t;
        const char* name;
    } cases[] = {{&t2, 1.0, "t^2"}, {&sin_tr, 2.0, "sin t"}};
    for (double alpha : {0.3, 0.7}) {
        for (const auto& k : cases) {
            std::vector<double> resid;
            for (int lev = 1; lev <= 3; ++lev)
                resid.push_back(lemma31_residual(*k.u, FractionalOrder(alpha), k.t, {48, 0.0, lev}));
            c.note(std::string(k.name) + ", alpha=" + fmt(alpha) + ": residuals " + fmt(resid[0]) +
                   " -> " + fmt(resid[1]) + " -> " + fmt(resid[2]));
            c.expect(resid[1] < resid[0] && resid[2] < resid[1],
                     std::string(k.name) + " residual not decreasing at alpha=" + fmt(alpha));
            c.expect(resid.back() <= 1e-4,
                     std::string(k.name) + " residual above 1e-4 at alpha=" + fmt(alpha));
        }
    }
}

void c5_flower_l1(Criterion& c) {
    const GridDescriptor g(64, 64, 2.0, 2.0, -1.0, -1.0);
    const auto u0 = preset_flower(g);
    for (double alpha : {0.3, 0.6, 0.9}) {
        SchemeConfig cfg;
        cfg.scheme = SchemeKind::L1_AC;
        cfg.alpha = alpha;
        cfg.gamma = 2.0;
        cfg.eps = 0.025;
        cfg.S = 20.0;
        cfg.dt = 0.02;
        cfg.n_steps = 400;
        double max_abs_all = 0.0;
        auto res = run(cfg, u0, [&](int, double, const ScalarField2D& u, const EnergyRecord*) {
            max_abs_all = std::max(max_abs_all, max_abs(u));
        });
        const auto& recs = res.records;

        const double uptick = worst_uptick(recs);
        c.expect(uptick <= 1e-10,
                 "E~ not monotone at alpha=" + fmt(alpha) + " (worst uptick " + fmt(uptick) + ")");
        c.expect(recs.front().E_tilde == recs.front().E,
                 "E~(0) != E(0) exactly at alpha=" + fmt(alpha));
        double min_diff = 1e300, peak = -1e300;
        for (const auto& r : recs) {
            min_diff = std::min(min_diff, r.E_tilde - r.E);
            peak = std::max(peak, r.E_tilde - r.E);
        }
        const double final_diff = recs.back().E_tilde - recs.back().E;
        c.expect(min_diff >= 0.0, "E~ - E negative at alpha=" + fmt(alpha));
        c.note("alpha=" + fmt(alpha) + ": max|u|-1 = " + fmt(max_abs_all - 1.0) +
               ", (E~-E) final/peak = " + fmt(final_diff) + "/" + fmt(peak));
        // Both checks below fail structurally at this resolution: Fourier
        // collocation has no discrete maximum principle, and with eps = 0.025
        // under-resolved on a 64^2 grid the interface overshoots by ~2e-4;
        // the memory term is still growing at t = 8, so its peak is the final
        // sample. Kept as stated, reported honestly.
        c.expect(max_abs_all <= 1.0 + 1e-9, "max|u| = 1 + " + fmt(max_abs_all - 1.0) +
                                                " exceeds 1 + 1e-9 at alpha=" + fmt(alpha) +
                                                " (collocation overshoot, unresolved interface)");
        c.expect(final_diff < peak, "E~-E peak not passed by t=8 at alpha=" + fmt(alpha) +
                                        " (memory term still growing at final time)");
    }
}

void c6_circles_l2(Criterion& c) {
    const GridDescriptor g(64, 64, 2.0 * kPi, 2.0 * kPi);
    const auto u0 = preset_seven_circles(g);
    for (double alpha : {0.4, 0.8}) {
        SchemeConfig cfg;
        cfg.scheme = SchemeKind::L2_AC;
        cfg.alpha = alpha;
        cfg.gamma = 1.0;
        cfg.eps = 0.1;
        cfg.dt = 0.05;
        cfg.n_steps = 200;

        cfg.S = stab_bound_l2(FractionalOrder(alpha), cfg.gamma, cfg.M);
        auto hard = run(cfg, u0);
        const double up_hard = worst_uptick(hard.records, 1);
        c.note("alpha=" + fmt(alpha) + ", S=bound(" + fmt(cfg.S) + "): worst uptick " +
               fmt(up_hard));
        c.expect(up_hard <= 1e-10, "Theorem-form energy not monotone with S at the bound, alpha=" +
                                       fmt(alpha));

        cfg.S = 1.0;
        auto soft = run(cfg, u0);
        const double up_soft = worst_uptick(soft.records, 1);
        c.note("alpha=" + fmt(alpha) + ", S=1 (soft check): worst uptick " + fmt(up_soft) +
               (up_soft <= 1e-10 ? " -> monotone as observed empirically"
                                 : " -> NOT monotone (reported, not asserted)"));
    }
}

void c7_cahn_hilliard(Criterion& c) {
    const GridDescriptor g(64, 64, 2.0 * kPi, 2.0 * kPi);
    const auto u0 = preset_ch_random(g, 1);
    const double m0 = mean(u0);
    for (double alpha : {0.3, 0.9}) {
        SchemeConfig cfg;
        cfg.scheme = SchemeKind::L1_CH;
        cfg.alpha = alpha;
        cfg.gamma = 0.02;
        cfg.eps = 0.05;
        cfg.S = 0.1;
        cfg.dt = 0.1;
        cfg.n_steps = 300;
        double drift = 0.0;
        bool mean_trip = false;
        std::vector<EnergyRecord> recs;
        try {
            auto res = run(cfg, u0, [&](int, double, const ScalarField2D& u, const EnergyRecord*) {
                drift = std::max(drift, std::fabs(mean(u) - m0));
            });
            recs = std::move(res.records);
        } catch (const MeanTooLarge&) {
            mean_trip = true;
        }
        c.expect(!mean_trip, "inverse-Laplacian precondition tripped at alpha=" + fmt(alpha));
        if (mean_trip) continue;
        c.expect(drift <= 1e-12 * std::max(std::fabs(m0), 1.0),
                 "mass drift " + fmt(drift) + " at alpha=" + fmt(alpha));
        const double uptick = worst_uptick(recs);
        c.note("alpha=" + fmt(alpha) + ": mass drift " + fmt(drift) + ", worst uptick " +
               fmt(uptick) + ", E~ " + fmt(recs.front().E_tilde) + " -> " +
               fmt(recs.back().E_tilde));
        c.expect(uptick <= 1e-10, "H^-1 modified energy not monotone at alpha=" + fmt(alpha));
    }
}

void c8_scheme_vs_oracle(Criterion& c) {
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
        const double factor = ml({alpha, 1.0, -1.0, 1e-12});
        double err = 0.0;
        const auto& un = res.state->history().field(N);
        for (std::size_t i = 0; i < un.size(); ++i)
            err = std::max(err, std::fabs(un.values()[i] - factor * u0.values()[i]));
        errs.push_back(err);
    }
    const double order = lsq_order(errs);
    c.note("single-mode L1 vs E_{a,1}: errors " + fmt(errs.front()) + " -> " + fmt(errs.back()) +
           ", observed order " + fmt(order));
    c.expect(order >= 1.0, "linear single-mode convergence order below 1");
    for (std::size_t i = 0; i + 1 < errs.size(); ++i)
        c.expect(errs[i + 1] < errs[i], "linear single-mode error not decreasing");

    // alpha -> 1: one L1 step against a backward-Euler IMEX step
    const GridDescriptor g2(24, 24, 2.0 * kPi, 2.0 * kPi);
    ScalarField2D v0(g2);
    for (int i = 0; i < g2.nx; ++i)
        for (int j = 0; j < g2.ny; ++j)
            v0(i, j) = 0.4 * std::sin(g2.x(i)) * std::cos(g2.y(j)) + 0.1 * std::cos(2.0 * g2.x(i));
    SchemeConfig cfg;
    cfg.scheme = SchemeKind::L1_AC;
    cfg.alpha = 1.0 - 1e-6;
    cfg.gamma = 1.3;
    cfg.eps = 0.3;
    cfg.S = 2.0;
    cfg.dt = 0.02;
    cfg.n_steps = 1;
    cfg.energy_tracking = false;
    auto res = run(cfg, v0);
    auto ws = SpectralWorkspace::get(g2);
    SpectralField2D rhs_hat(g2);
    ScalarField2D rhs(g2), be(g2);
    for (std::size_t i = 0; i < rhs.size(); ++i) {
        const double v = v0.values()[i];
        rhs.values()[i] = (1.0 / cfg.dt + cfg.gamma * cfg.S) * v - cfg.gamma * (v * v * v - v);
    }
    ws->forward(rhs, rhs_hat);
    auto coef = rhs_hat.coeffs();
    auto k2 = ws->ksq();
    for (std::size_t i = 0; i < coef.size(); ++i)
        coef[i] /= (1.0 / cfg.dt + cfg.gamma * cfg.S + cfg.gamma * cfg.eps * cfg.eps * k2[i]);
    ws->inverse(rhs_hat, be);
    double dev = 0.0, scale = 0.0;
    const auto& u1 = res.state->history().field(1);
    for (std::size_t i = 0; i < be.size(); ++i) {
        dev = std::max(dev, std::fabs(u1.values()[i] - be.values()[i]));
        scale = std::max(scale, std::fabs(be.values()[i]));
    }
    c.note("alpha = 1-1e-6 one-step deviation from backward Euler: " + fmt(dev / scale));
    c.expect(dev / scale <= 1e-4, "alpha->1 L1 step does not match backward Euler");
}

void c9_mittag(Criterion& c) {
    const double e11 = ml({1.0, 1.0, -1.0, 1e-13});
    c.expect(std::fabs(e11 - std::exp(-1.0)) <= 1e-12, "E_{1,1}(-1) != exp(-1) to 1e-12");
    const double eh = ml({0.5, 1.0, -1.0, 1e-11});
    const double want = std::exp(1.0) * std::erfc(1.0);
    c.expect(std::fabs(eh - want) <= 1e-10, "E_{1/2,1}(-1) != e erfc(1) to 1e-10");
    c.note("E_{1,1}(-1) err " + fmt(std::fabs(e11 - std::exp(-1.0))) + ", E_{1/2,1}(-1) err " +
           fmt(std::fabs(eh - want)));
    for (double alpha : {0.5, 0.8}) {
        double prev1 = 0.0, prev2 = 0.0;
        for (int lev = 0; lev < 3; ++lev) {
            const double h = 1e-2 / (1 << lev);
            const auto chk = ml_derivative_check(alpha, 2.0, 1.0, h);
            const double e1 = std::fabs(chk.decay.fd - chk.decay.closed_form);
            const double e2 = std::fabs(chk.kernel.fd - chk.kernel.closed_form);
            if (lev > 0) {
                c.expect(e1 < prev1 / 3.0, "decay identity FD not second order, alpha=" + fmt(alpha));
                c.expect(e2 < prev2 / 3.0, "kernel identity FD not second order, alpha=" + fmt(alpha));
            }
            prev1 = e1;
            prev2 = e2;
        }
    }
}

void c10_reproducibility(Criterion& c) {
    const auto base = fs::temp_directory_path() / "tfphase_accept_repro";
    fs::remove_all(base);
    auto one = [&](const fs::path& dir) {
        fs::create_directories(dir);
        const GridDescriptor g(32, 32, 2.0 * kPi, 2.0 * kPi);
        SchemeConfig cfg;
        cfg.scheme = SchemeKind::L1_CH;
        cfg.alpha = 0.6;
        cfg.gamma = 0.02;
        cfg.eps = 0.05;
        cfg.S = 0.1;
        cfg.dt = 0.1;
        cfg.n_steps = 10;
        auto res = run(cfg, preset_ch_random(g, 7));
        io::write_energy_csv(res.records, dir / "energy.csv");
        io::write_snapshot(res.state->history().field(10), dir / "final.tfp");
    };
    one(base / "a");
    one(base / "b");
    auto bytes = [](const fs::path& p) {
        std::ifstream is(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(is), {});
    };
    c.expect(bytes(base / "a" / "energy.csv") == bytes(base / "b" / "energy.csv"),
             "energy CSV differs between identical runs");
    c.expect(bytes(base / "a" / "final.tfp") == bytes(base / "b" / "final.tfp"),
             "snapshot differs between identical runs");
}

} // namespace

int main() {
    std::printf("tfphase acceptance suite\n");
    criterion("C1  coefficient identities and monotonicity", c1_coefficients);
    criterion("C2  discrete Caputo operator convergence", c2_operator_convergence);
    criterion("C3  history-energy lemma inequalities (fuzzed)", c3_lemma_fuzz);
    criterion("C4  continuous dissipation identity residual", c4_lemma31);
    criterion("C5  stabilized L1 Allen-Cahn desk run", c5_flower_l1);
    criterion("C6  stabilized L2 Allen-Cahn desk run", c6_circles_l2);
    criterion("C7  Cahn-Hilliard desk run (mass + H^-1 energy)", c7_cahn_hilliard);
    criterion("C8  scheme against Mittag-Leffler oracle", c8_scheme_vs_oracle);
    criterion("C9  Mittag-Leffler reference values", c9_mittag);
    criterion("C10 byte-identical reruns", c10_reproducibility);
    if (g_failures)
        std::printf("%d criterion(s) failed\n", g_failures);
    else
        std::printf("all criteria passed\n");
    return g_failures;
}
