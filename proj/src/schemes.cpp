#include "tfphase/schemes.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "tfphase/errors.hpp"
#include "tfphase/kernels.hpp"

namespace tfp {

std::string to_string(SchemeKind k) {
    switch (k) {
        case SchemeKind::L1_AC: return "l1-ac";
        case SchemeKind::L2_AC: return "l2-ac";
        case SchemeKind::L1_CH: return "l1-ch";
    }
    return "?";
}

SchemeKind scheme_from_string(const std::string& s) {
    if (s == "l1-ac") return SchemeKind::L1_AC;
    if (s == "l2-ac") return SchemeKind::L2_AC;
    if (s == "l1-ch") return SchemeKind::L1_CH;
    throw std::invalid_argument("unknown scheme '" + s + "' (expected l1-ac, l2-ac or l1-ch)");
}

bool SchemeConfig::guarantee_applies() const {
    const double L = 3.0 * M * M - 1.0;
    switch (scheme) {
        case SchemeKind::L1_AC: return S >= 2.0;
        case SchemeKind::L2_AC: return S >= stab_bound_l2(FractionalOrder(alpha), gamma, M);
        case SchemeKind::L1_CH: return S >= 0.5 * L;
    }
    return false;
}

double truncated_F(double u, double M) {
    if (M < 1.0) throw std::invalid_argument("truncated_F: M must be >= 1");
    const double L = 3.0 * M * M - 1.0;
    const double edge_f = M * M * M - M;
    const double edge_F = 0.25 * (M * M - 1.0) * (M * M - 1.0);
    if (u > M) return 0.5 * L * (u - M) * (u - M) + edge_f * (u - M) + edge_F;
    if (u < -M) return 0.5 * L * (u + M) * (u + M) - edge_f * (u + M) + edge_F;
    const double q = u * u - 1.0;
    return 0.25 * q * q;
}

double truncated_f(double u, double M) {
    if (M < 1.0) throw std::invalid_argument("truncated_f: M must be >= 1");
    const double L = 3.0 * M * M - 1.0;
    const double edge_f = M * M * M - M;
    if (u > M) return L * (u - M) + edge_f;
    if (u < -M) return L * (u + M) - edge_f;
    return u * u * u - u;
}

double stab_bound_l2(FractionalOrder alpha, double gamma, double M) {
    if (!(gamma > 0.0)) throw std::invalid_argument("stab_bound_l2: gamma must be positive");
    if (M < 1.0) throw std::invalid_argument("stab_bound_l2: M must be >= 1");
    const double a = alpha.value();
    const double L = 3.0 * M * M - 1.0;
    return 3.0 * a * L / (2.0 * (1.0 + a)) *
           std::pow(3.0 * gamma * std::tgamma(3.0 - a) * L / (2.0 * a * (1.0 + a)), 1.0 / a);
}

namespace {

void validate_config(const SchemeConfig& cfg) {
    FractionalOrder check(cfg.alpha);
    if (!(cfg.gamma > 0.0)) throw std::invalid_argument("SchemeConfig: gamma must be positive");
    if (!(cfg.eps > 0.0)) throw std::invalid_argument("SchemeConfig: eps must be positive");
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("SchemeConfig: dt must be positive");
    if (cfg.S < 0.0) throw std::invalid_argument("SchemeConfig: S must be nonnegative");
    if (cfg.M < 1.0) throw std::invalid_argument("SchemeConfig: M must be >= 1");
    if (cfg.n_steps < 0) throw std::invalid_argument("SchemeConfig: n_steps must be >= 0");
    if (cfg.energy_stride < 1) throw std::invalid_argument("SchemeConfig: energy_stride must be >= 1");
}

} // namespace

SimulationState::SimulationState(const SchemeConfig& cfg, ScalarField2D u0)
    : cfg_(cfg),
      history_(u0.grid(), cfg.dt,
               /*keep_spectra=*/cfg.scheme == SchemeKind::L1_CH && cfg.energy_tracking),
      ws_(SpectralWorkspace::get(u0.grid())),
      l1w_(l1_weights(FractionalOrder(cfg.alpha), cfg.dt, 1)),
      rhs_hat_(u0.grid()),
      sol_hat_(u0.grid()),
      chk_hat_(u0.grid()),
      scratch_a_(u0.grid()),
      scratch_b_(u0.grid()),
      sol_(u0.grid()) {
    validate_config(cfg);
    if (!kern::max_abs_finite(u0.values()).second)
        throw std::invalid_argument("SimulationState: initial field has nonfinite values");

    const double a = cfg.alpha;
    const double b0 = l1w_.b[0];
    auto k2 = ws_->ksq();
    symbol_.resize(k2.size());
    switch (cfg.scheme) {
        case SchemeKind::L1_AC:
            for (std::size_t i = 0; i < k2.size(); ++i)
                symbol_[i] = b0 + cfg.gamma * cfg.S + cfg.gamma * cfg.eps * cfg.eps * k2[i];
            break;
        case SchemeKind::L1_CH:
            for (std::size_t i = 0; i < k2.size(); ++i)
                symbol_[i] = b0 + cfg.gamma * k2[i] * (cfg.eps * cfg.eps * k2[i] + cfg.S);
            break;
        case SchemeKind::L2_AC: {
            l2c_ = l2_coefficients(FractionalOrder(a), 2);
            const double ca = 1.0 / (std::tgamma(3.0 - a) * std::pow(cfg.dt, a));
            const double lead = ca * (1.5 * a + l2c_.d[1]);
            for (std::size_t i = 0; i < k2.size(); ++i)
                symbol_[i] = lead + cfg.gamma * cfg.S * cfg.dt + cfg.gamma * cfg.eps * cfg.eps * k2[i];
            symbol_first_.resize(k2.size());
            for (std::size_t i = 0; i < k2.size(); ++i)
                symbol_first_[i] = b0 + cfg.gamma * cfg.S + cfg.gamma * cfg.eps * cfg.eps * k2[i];
            break;
        }
    }
    history_.append(std::move(u0));
}

const L2Coefficients& SimulationState::l2c() const {
    if (cfg_.scheme != SchemeKind::L2_AC)
        throw std::logic_error("SimulationState::l2c: not an L2 scheme");
    return l2c_;
}

void SimulationState::force(const ScalarField2D& u, ScalarField2D& out) const {
    if (cfg_.linear_only) {
        std::fill(out.values().begin(), out.values().end(), 0.0);
        return;
    }
    const bool truncate = cfg_.scheme != SchemeKind::L1_AC || cfg_.S < 2.0;
    if (truncate)
        kern::truncated_force(u.values(), cfg_.M, out.values());
    else
        kern::double_well_force(u.values(), out.values());
}

// Diagonal spectral solve: symbol * u_hat = FFT(rhs_a) + ksq .* FFT(rhs_ksq).
// The residual check is a transform round trip of the solution.
void SimulationState::solve_diag(const ScalarField2D& rhs_a, std::span<const double> symbol,
                                 const ScalarField2D* rhs_ksq) {
    ws_->forward(rhs_a, rhs_hat_);
    auto r = rhs_hat_.coeffs();
    auto k2 = ws_->ksq();
    if (rhs_ksq) {
        ws_->forward(*rhs_ksq, sol_hat_);
        auto extra = sol_hat_.coeffs();
        const long long n = static_cast<long long>(r.size());
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < n; ++i) r[i] += k2[i] * extra[i];
    }
    auto s = sol_hat_.coeffs();
    const long long n = static_cast<long long>(r.size());
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) s[i] = r[i] / symbol[i];
    ws_->inverse(sol_hat_, sol_);

    if (cfg_.verify_solves) {
        ws_->forward(sol_, chk_hat_);
        auto chk = chk_hat_.coeffs();
        auto w = ws_->mode_weight();
        long double num = 0.0L, den = 0.0L;
        for (std::size_t i = 0; i < r.size(); ++i) {
            num += w[i] * std::norm(chk[i] * symbol[i] - r[i]);
            den += w[i] * std::norm(r[i]);
        }
        last_residual_ = den > 0.0L ? std::sqrt(static_cast<double>(num / den)) : 0.0;
        if (last_residual_ > 1e-10) {
            std::ostringstream os;
            os << "implicit solve residual " << last_residual_ << " at step "
               << history_.last_index() + 1;
            throw SolverDiverged(os.str());
        }
    }
}

void SimulationState::commit(ScalarField2D u_new) {
    auto [ma, finite] = kern::max_abs_finite(u_new.values());
    if (!finite) {
        std::ostringstream os;
        os << "nonfinite field after step " << history_.last_index() + 1 << " (scheme "
           << to_string(cfg_.scheme) << ", alpha=" << cfg_.alpha << ", dt=" << cfg_.dt
           << ", S=" << cfg_.S << ", max|u| at previous step "
           << kern::max_abs_finite(history_.field(history_.last_index()).values()).first << ")";
        throw SolverDiverged(os.str());
    }
    (void)ma;
    history_.append(std::move(u_new));
}

void step_l1_ac(SimulationState& s) {
    const auto& cfg = s.cfg_;
    const int n = s.history_.last_index() + 1;
    extend_l1_weights(s.l1w_, n);
    auto g = l1_operator_coeffs(s.l1w_, n);

    // rhs = -sum_{j<n} g_j u^j + gamma S u^{n-1} - gamma f(u^{n-1})
    std::vector<const double*> ptrs(n);
    std::vector<double> coeff(n);
    for (int j = 0; j < n; ++j) {
        ptrs[j] = s.history_.field(j).data();
        coeff[j] = -g[j];
    }
    coeff[n - 1] += cfg.gamma * cfg.S;
    kern::weighted_sum(ptrs, coeff, s.scratch_a_.values());
    s.force(s.history_.field(n - 1), s.scratch_b_);
    kern::axpby(1.0, s.scratch_a_.values(), -cfg.gamma, s.scratch_b_.values(),
                s.scratch_a_.values());

    const auto& symbol =
        cfg.scheme == SchemeKind::L2_AC ? s.symbol_first_ : s.symbol_;
    s.solve_diag(s.scratch_a_, symbol);
    s.commit(s.sol_);
}

void step_l2_ac(SimulationState& s) {
    const auto& cfg = s.cfg_;
    const int n = s.history_.last_index() + 1;
    if (n < 2) throw std::logic_error("step_l2_ac: needs u^0 and u^1 (first step is L1)");
    extend_l2_coefficients(s.l2c_, n);
    auto g = l2_operator_coeffs(s.l2c_, cfg.dt, n);

    // rhs = -sum_{j<n} g_j u^j + gamma S dt u^{n-1} - gamma (2 f(u^{n-1}) - f(u^{n-2}))
    std::vector<const double*> ptrs(n);
    std::vector<double> coeff(n);
    for (int j = 0; j < n; ++j) {
        ptrs[j] = s.history_.field(j).data();
        coeff[j] = -g[j];
    }
    coeff[n - 1] += cfg.gamma * cfg.S * cfg.dt;
    kern::weighted_sum(ptrs, coeff, s.scratch_a_.values());

    s.force(s.history_.field(n - 1), s.scratch_b_);
    kern::axpby(1.0, s.scratch_a_.values(), -2.0 * cfg.gamma, s.scratch_b_.values(),
                s.scratch_a_.values());
    s.force(s.history_.field(n - 2), s.scratch_b_);
    kern::axpby(1.0, s.scratch_a_.values(), cfg.gamma, s.scratch_b_.values(),
                s.scratch_a_.values());

    s.solve_diag(s.scratch_a_, s.symbol_);
    s.commit(s.sol_);
}

void step_l1_ch(SimulationState& s) {
    const auto& cfg = s.cfg_;
    const int n = s.history_.last_index() + 1;
    extend_l1_weights(s.l1w_, n);
    auto g = l1_operator_coeffs(s.l1w_, n);

    std::vector<const double*> ptrs(n);
    std::vector<double> coeff(n);
    for (int j = 0; j < n; ++j) {
        ptrs[j] = s.history_.field(j).data();
        coeff[j] = -g[j];
    }
    kern::weighted_sum(ptrs, coeff, s.scratch_a_.values());

    // Laplacian-driven part: ksq .* FFT(gamma S u^{n-1} - gamma f(u^{n-1}))
    s.force(s.history_.field(n - 1), s.scratch_b_);
    kern::axpby(cfg.gamma * cfg.S, s.history_.field(n - 1).values(), -cfg.gamma,
                s.scratch_b_.values(), s.scratch_b_.values());

    s.solve_diag(s.scratch_a_, s.symbol_, &s.scratch_b_);
    s.commit(s.sol_);
}

void SimulationState::advance() {
    switch (cfg_.scheme) {
        case SchemeKind::L1_AC: step_l1_ac(*this); break;
        case SchemeKind::L1_CH: step_l1_ch(*this); break;
        case SchemeKind::L2_AC:
            if (history_.last_index() == 0)
                step_l1_ac(*this); // Eq-first-step policy: the n=1 L2 operator is the L1 one
            else
                step_l2_ac(*this);
            break;
    }
}

EnergyRecord SimulationState::energy_record(int n) const {
    switch (cfg_.scheme) {
        case SchemeKind::L1_AC:
            return l1_modified_energy(history_, l1w_, cfg_.gamma, cfg_.eps, n);
        case SchemeKind::L2_AC:
            return l2_modified_energy(history_, l2c_, cfg_.gamma, cfg_.eps, cfg_.M, n);
        case SchemeKind::L1_CH:
            return ch_modified_energy(history_, l1w_, cfg_.gamma, cfg_.eps, n);
    }
    throw std::logic_error("energy_record: bad scheme");
}

RunResult run(const SchemeConfig& cfg, const ScalarField2D& u0, const StepCallback& cb) {
    RunResult out;
    out.state = std::make_unique<SimulationState>(cfg, u0);
    auto& s = *out.state;

    auto track = [&](int n) {
        EnergyRecord rec = s.energy_record(n);
        out.records.push_back(rec);
        if (cb) cb(n, n * cfg.dt, s.history().field(n), &rec);
    };

    if (cfg.energy_tracking)
        track(0);
    else if (cb)
        cb(0, 0.0, s.history().field(0), nullptr);

    for (int n = 1; n <= cfg.n_steps; ++n) {
        s.advance();
        const bool tracked =
            cfg.energy_tracking && (n % cfg.energy_stride == 0 || n == cfg.n_steps);
        if (tracked) {
            track(n);
        } else if (cb) {
            cb(n, n * cfg.dt, s.history().field(n), nullptr);
        }
    }
    return out;
}

} // namespace tfp
