// tfphase: time-fractional Allen-Cahn / Cahn-Hilliard solver CLI.
//
//   tfphase run    --preset flower|circles|ch-random [overrides] --out DIR
//   tfphase coeffs --alpha A --n N --which l1|l2 [--dt D]
//   tfphase verify           property suites (coefficients, lemmas, identity)
//   tfphase sweep  --alphas 0.3,0.6,0.9 [run flags]   concurrent runs
//
// Flags can also come from a `key = value` config file via --config; command
// line values win.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include "tfphase/energy.hpp"
#include "tfphase/io.hpp"
#include "tfphase/presets.hpp"
#include "tfphase/schemes.hpp"
#include "tfphase/version.hpp"

using namespace tfp;
namespace fs = std::filesystem;

namespace {

struct RunOptions {
    std::string preset = "flower";
    std::string scheme; // empty: preset default
    double alpha = -1.0;
    double dt = -1.0;
    double tend = -1.0;
    int steps = -1;
    double S = -1.0;
    double eps = -1.0;
    double gamma = -1.0;
    double M = 1.0;
    int grid = -1;
    std::string out = "out";
    std::uint64_t seed = 42;
    int energy_stride = 1;
    int snap_stride = 0; // 0: only final snapshot
    bool pgm = false;
    bool no_energy = false;
    std::string config_file;
};

// `key = value` lines mirroring the flags; values already given on the
// command line win. '#' starts a comment.
void apply_config_file(const RunOptions& parsed, RunOptions& o, const CLI::App* cmd) {
    std::ifstream is(parsed.config_file);
    if (!is) throw std::runtime_error("cannot open config file '" + parsed.config_file + "'");
    auto given = [&](const char* flag) { return cmd->count(flag) > 0; };
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw std::runtime_error(parsed.config_file + ":" + std::to_string(lineno) +
                                         ": expected 'key = value'");
            continue;
        }
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key == "preset") { if (!given("--preset")) o.preset = val; }
        else if (key == "scheme") { if (!given("--scheme")) o.scheme = val; }
        else if (key == "alpha") { if (!given("--alpha")) o.alpha = std::stod(val); }
        else if (key == "dt") { if (!given("--dt")) o.dt = std::stod(val); }
        else if (key == "tend") { if (!given("--tend")) o.tend = std::stod(val); }
        else if (key == "steps") { if (!given("--steps")) o.steps = std::stoi(val); }
        else if (key == "S") { if (!given("--S")) o.S = std::stod(val); }
        else if (key == "eps") { if (!given("--eps")) o.eps = std::stod(val); }
        else if (key == "gamma") { if (!given("--gamma")) o.gamma = std::stod(val); }
        else if (key == "M") { if (!given("--M")) o.M = std::stod(val); }
        else if (key == "grid") { if (!given("--grid")) o.grid = std::stoi(val); }
        else if (key == "out") { if (!given("--out")) o.out = val; }
        else if (key == "seed") { if (!given("--seed")) o.seed = std::stoull(val); }
        else if (key == "energy-stride") { if (!given("--energy-stride")) o.energy_stride = std::stoi(val); }
        else if (key == "snap-stride") { if (!given("--snap-stride")) o.snap_stride = std::stoi(val); }
        else if (key == "pgm") { if (!given("--pgm")) o.pgm = (val == "true" || val == "1"); }
        else if (key == "no-energy") { if (!given("--no-energy")) o.no_energy = (val == "true" || val == "1"); }
        else {
            throw std::runtime_error(parsed.config_file + ":" + std::to_string(lineno) +
                                     ": unknown key '" + key + "'");
        }
    }
}

void add_run_flags(CLI::App* cmd, RunOptions& o) {
    cmd->add_option("--preset", o.preset, "flower, circles or ch-random")
        ->check(CLI::IsMember({"flower", "circles", "ch-random"}));
    cmd->add_option("--scheme", o.scheme, "l1-ac, l2-ac or l1-ch (default: preset scheme)")
        ->check(CLI::IsMember({"l1-ac", "l2-ac", "l1-ch"}));
    cmd->add_option("--alpha", o.alpha, "fractional order in (0,1)");
    cmd->add_option("--dt", o.dt, "time step");
    cmd->add_option("--steps", o.steps, "number of steps");
    cmd->add_option("--tend", o.tend, "end time (alternative to --steps)");
    cmd->add_option("--S", o.S, "stabilization constant");
    cmd->add_option("--eps", o.eps, "interface width");
    cmd->add_option("--gamma", o.gamma, "mobility");
    cmd->add_option("--M", o.M, "potential truncation bound (>= 1)");
    cmd->add_option("--grid", o.grid, "grid points per direction");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--seed", o.seed, "random seed (ch-random preset)");
    cmd->add_option("--energy-stride", o.energy_stride, "record energy every m-th step");
    cmd->add_option("--snap-stride", o.snap_stride, "write a snapshot every m-th step");
    cmd->add_flag("--pgm", o.pgm, "also write 8-bit PGM images next to snapshots");
    cmd->add_flag("--no-energy", o.no_energy, "disable modified-energy tracking");
    cmd->add_option("--config", o.config_file, "read options from a key = value file");
}

struct ResolvedRun {
    SchemeConfig cfg;
    GridDescriptor grid;
    ScalarField2D u0;
    std::string preset;
    std::uint64_t seed;
};

ResolvedRun resolve(const RunOptions& o) {
    const auto& p = preset_params(o.preset);
    SchemeConfig cfg;
    cfg.scheme = o.scheme.empty() ? p.scheme : scheme_from_string(o.scheme);
    cfg.alpha = o.alpha > 0 ? o.alpha : p.default_alpha;
    cfg.gamma = o.gamma > 0 ? o.gamma : p.gamma;
    cfg.eps = o.eps > 0 ? o.eps : p.eps;
    cfg.dt = o.dt > 0 ? o.dt : p.dt;
    cfg.S = o.S >= 0 ? o.S : p.S;
    cfg.M = o.M;
    cfg.energy_tracking = !o.no_energy;
    cfg.energy_stride = o.energy_stride;
    if (o.steps >= 0) {
        cfg.n_steps = o.steps;
        if (o.tend > 0 && std::fabs(o.steps * cfg.dt - o.tend) > cfg.dt)
            throw CLI::ValidationError("--steps and --tend disagree by more than one step");
    } else if (o.tend > 0) {
        cfg.n_steps = static_cast<int>(std::llround(o.tend / cfg.dt));
    } else {
        cfg.n_steps = 100;
    }
    const int n = o.grid > 0 ? o.grid : p.grid_n;
    GridDescriptor g(n, n, p.domain_length, p.domain_length, p.origin, p.origin);
    ScalarField2D u0 = preset_initial(o.preset, g, o.seed);
    return {cfg, g, std::move(u0), o.preset, o.seed};
}

void write_manifest(const ResolvedRun& r, const fs::path& dir) {
    std::ofstream os(dir / "manifest.txt");
    os << "tool = tfphase " << kVersion << "\n"
       << "preset = " << r.preset << "\n"
       << "scheme = " << to_string(r.cfg.scheme) << "\n"
       << "alpha = " << io::format_float17(r.cfg.alpha) << "\n"
       << "gamma = " << io::format_float17(r.cfg.gamma) << "\n"
       << "eps = " << io::format_float17(r.cfg.eps) << "\n"
       << "dt = " << io::format_float17(r.cfg.dt) << "\n"
       << "S = " << io::format_float17(r.cfg.S) << "\n"
       << "M = " << io::format_float17(r.cfg.M) << "\n"
       << "steps = " << r.cfg.n_steps << "\n"
       << "grid = " << r.grid.nx << "x" << r.grid.ny << "\n"
       << "domain = [" << r.grid.x0 << "," << r.grid.x0 + r.grid.Lx << "]^2\n"
       << "seed = " << r.seed << "\n"
       << "energy_stride = " << r.cfg.energy_stride << "\n"
       << "dissipation_guarantee = " << (r.cfg.guarantee_applies() ? "yes" : "no") << "\n";
}

int do_run(const RunOptions& o, bool quiet = false) {
    ResolvedRun r = resolve(o);
    fs::create_directories(o.out);
    write_manifest(r, o.out);
    if (!quiet) {
        std::printf("%s: %s, alpha=%g, dt=%g, %d steps, %dx%d, S=%g (guarantee: %s)\n",
                    r.preset.c_str(), to_string(r.cfg.scheme).c_str(), r.cfg.alpha, r.cfg.dt,
                    r.cfg.n_steps, r.grid.nx, r.grid.ny, r.cfg.S,
                    r.cfg.guarantee_applies() ? "yes" : "no");
    }

    io::EnergyCsvWriter csv(fs::path(o.out) / "energy.csv");
    auto snap_name = [&](int n) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "snap_%06d", n);
        return std::string(buf);
    };
    const int report = std::max(1, r.cfg.n_steps / 10);
    auto cb = [&](int n, double t, const ScalarField2D& u, const EnergyRecord* rec) {
        if (rec) csv.append(*rec);
        const bool snap = (o.snap_stride > 0 && n % o.snap_stride == 0) || n == r.cfg.n_steps;
        if (snap) {
            io::write_snapshot(u, fs::path(o.out) / (snap_name(n) + ".tfp"));
            if (o.pgm) io::write_pgm(u, fs::path(o.out) / (snap_name(n) + ".pgm"));
        }
        if (!quiet && n % report == 0 && rec)
            std::printf("  n=%6d t=%8.3f E=%.8f E~=%.8f max|u|=%.6f\n", n, t, rec->E, rec->E_tilde,
                        rec->max_abs_u);
    };
    run(r.cfg, r.u0, cb);
    if (!quiet) std::printf("wrote %s\n", o.out.c_str());
    return 0;
}

int do_coeffs(double alpha, int n, const std::string& which, double dt) {
    if (which == "l1") {
        const auto w = l1_weights(FractionalOrder(alpha), dt, n);
        std::printf("k,b_k\n");
        for (int k = 0; k < w.n(); ++k)
            std::printf("%d,%s\n", k, io::format_float17(w.b[k]).c_str());
    } else {
        const auto c = l2_coefficients(FractionalOrder(alpha), std::max(2, n));
        std::printf("# r1 = %s\n", io::format_float17(c.r1).c_str());
        std::printf("j,a_j,b_j,c_j,d_j\n");
        for (int j = 1; j <= c.max_index(); ++j)
            std::printf("%d,%s,%s,%s,%s\n", j, io::format_float17(c.a[j]).c_str(),
                        io::format_float17(c.b[j]).c_str(), io::format_float17(c.c[j]).c_str(),
                        io::format_float17(c.d[j]).c_str());
        if (const auto bad = c.validate()) {
            std::fprintf(stderr, "coefficient inequality violation: %s\n", bad->c_str());
            return 1;
        }
    }
    return 0;
}

int do_verify() {
    int bad = 0;
    auto report = [&](const char* name, bool ok, const std::string& detail = "") {
        std::printf("[%s] %s%s%s\n", ok ? "PASS" : "FAIL", name, detail.empty() ? "" : ": ",
                    detail.c_str());
        if (!ok) ++bad;
    };

    // coefficient structure
    {
        bool ok = true;
        std::string detail;
        for (double alpha : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const auto w = l1_weights(FractionalOrder(alpha), 0.05, 257);
            for (int k = 0; k + 1 < w.n(); ++k)
                if (!(w.b[k] > w.b[k + 1]) || !(w.b[k + 1] > 0)) ok = false;
            const auto c = l2_coefficients(FractionalOrder(alpha), 258);
            if (const auto v = c.validate()) {
                ok = false;
                detail = "alpha=" + std::to_string(alpha) + ": " + *v;
            }
        }
        report("coefficient families (positivity, monotonicity, identities)", ok, detail);
    }

    // lemma inequalities, fuzzed
    {
        std::mt19937_64 rng(99);
        std::normal_distribution<double> dist;
        int viol = 0;
        for (double alpha : {0.3, 0.5, 0.8}) {
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
                    if (lhs < rhs - 1e-12 * (std::fabs(lhs) + std::fabs(rhs) + 1.0)) ++viol;
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
                    if (lhs < rhs - 1e-12 * (std::fabs(lhs) + std::fabs(rhs) + 1.0)) ++viol;
                }
            }
        }
        report("history-energy inequalities on 6x10^4 random histories",
               viol == 0, viol ? std::to_string(viol) + " violations" : "");
    }

    // continuous identity residual
    {
        const auto t2 = ScalarTrajectory::analytic(
            [](double t) { return t * t; }, [](double t) { return 2.0 * t; },
            [](double t, double xi) { return 2.0 * t * xi - xi * xi; });
        bool ok = true;
        std::string detail;
        for (double alpha : {0.3, 0.7}) {
            const double r1 = lemma31_residual(t2, FractionalOrder(alpha), 1.0, {48, 0.0, 1});
            const double r2 = lemma31_residual(t2, FractionalOrder(alpha), 1.0, {48, 0.0, 2});
            if (!(r2 < r1 && r2 < 1e-4)) {
                ok = false;
                detail = "alpha=" + std::to_string(alpha);
            }
        }
        report("dissipation identity residual (smooth trajectories)", ok, detail);
    }

    std::printf(bad ? "%d verification group(s) failed\n" : "all verification groups passed\n",
                bad);
    return bad ? 1 : 0;
}

int do_sweep(const RunOptions& base, const std::vector<double>& alphas) {
    std::vector<std::thread> workers;
    std::vector<int> status(alphas.size(), 0);
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        workers.emplace_back([&, i] {
            RunOptions o = base;
            o.alpha = alphas[i];
            char sub[32];
            std::snprintf(sub, sizeof sub, "alpha_%g", alphas[i]);
            o.out = (fs::path(base.out) / sub).string();
            try {
                status[i] = do_run(o, /*quiet=*/true);
            } catch (const std::exception& e) {
                std::fprintf(stderr, "alpha=%g failed: %s\n", alphas[i], e.what());
                status[i] = 1;
            }
        });
    }
    for (auto& w : workers) w.join();
    int bad = 0;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        std::printf("alpha=%g -> %s\n", alphas[i], status[i] ? "FAILED" : "ok");
        bad += status[i];
    }
    return bad ? 1 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"time-fractional phase-field solver (L1/L2 schemes with modified energies)"};
    app.require_subcommand(1);

    RunOptions run_opts;
    auto* cmd_run = app.add_subcommand("run", "run one simulation");
    add_run_flags(cmd_run, run_opts);

    double co_alpha = 0.5;
    int co_n = 32;
    double co_dt = 1.0;
    std::string co_which = "l1";
    auto* cmd_coeffs = app.add_subcommand("coeffs", "dump a coefficient table as CSV");
    cmd_coeffs->add_option("--alpha", co_alpha)->required();
    cmd_coeffs->add_option("--n", co_n)->required();
    cmd_coeffs->add_option("--which", co_which)->check(CLI::IsMember({"l1", "l2"}));
    cmd_coeffs->add_option("--dt", co_dt);

    auto* cmd_verify = app.add_subcommand("verify", "run the property suites");

    RunOptions sweep_opts;
    std::vector<double> sweep_alphas;
    auto* cmd_sweep = app.add_subcommand("sweep", "run several alphas concurrently");
    add_run_flags(cmd_sweep, sweep_opts);
    cmd_sweep->add_option("--alphas", sweep_alphas, "comma-separated fractional orders")
        ->required()
        ->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_run) {
            if (!run_opts.config_file.empty()) apply_config_file(run_opts, run_opts, cmd_run);
            return do_run(run_opts);
        }
        if (*cmd_coeffs) return do_coeffs(co_alpha, co_n, co_which, co_dt);
        if (*cmd_verify) return do_verify();
        if (*cmd_sweep) {
            if (!sweep_opts.config_file.empty())
                apply_config_file(sweep_opts, sweep_opts, cmd_sweep);
            return do_sweep(sweep_opts, sweep_alphas);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
