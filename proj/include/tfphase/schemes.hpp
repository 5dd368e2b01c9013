#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "tfphase/energy.hpp"
#include "tfphase/fields.hpp"
#include "tfphase/fracops.hpp"

namespace tfp {

enum class SchemeKind { L1_AC, L2_AC, L1_CH };

std::string to_string(SchemeKind k);
SchemeKind scheme_from_string(const std::string& s);

struct SchemeConfig {
    double alpha = 0.5;   // fractional order, validated to (0,1) at state setup
    double gamma = 1.0;   // mobility
    double eps = 0.1;     // interface width
    double dt = 0.01;
    double S = 0.0;       // stabilization constant
    double M = 1.0;       // potential truncation bound, >= 1
    SchemeKind scheme = SchemeKind::L1_AC;
    int n_steps = 0;
    bool energy_tracking = true;
    int energy_stride = 1;
    bool verify_solves = true;  // per-step residual check of the diagonal solve
    bool linear_only = false;   // test hook: drop the force term entirely

    /// Whether the dissipation theorem hypothesis for this scheme holds
    /// (L1_AC: S >= 2; L2_AC: S >= stab_bound_l2; L1_CH: S >= (3M^2-1)/2).
    bool guarantee_applies() const;
};

/// Truncated double-well potential: quartic inside [-M, M], quadratic growth
/// outside, C^1 at the seams. |F''| <= 3M^2 - 1 everywhere.
double truncated_F(double u, double M);
double truncated_f(double u, double M);

/// Sufficient stabilization for the L2 scheme's energy dissipation:
/// S >= (3 a L/(2(1+a))) (3 gamma Gamma(3-a) L / (2 a (1+a)))^{1/a}, L = 3M^2-1.
double stab_bound_l2(FractionalOrder alpha, double gamma, double M);

/// One simulation: the growing history, coefficient tables extended per step,
/// and the cached per-mode symbols of the implicit operators. Advances
/// strictly sequentially; distinct simulations are independent.
class SimulationState {
public:
    SimulationState(const SchemeConfig& cfg, ScalarField2D u0);

    const SchemeConfig& config() const { return cfg_; }
    const SolveHistory& history() const { return history_; }
    int step_index() const { return history_.last_index(); }
    double time() const { return step_index() * cfg_.dt; }
    /// Relative residual of the most recent implicit solve.
    double last_residual() const { return last_residual_; }
    const L1Weights& l1w() const { return l1w_; }
    const L2Coefficients& l2c() const;

    /// One step of the configured scheme (L2_AC takes its first step with
    /// the L1 operator, see step_l2_ac).
    void advance();

    EnergyRecord energy_record(int n) const;

private:
    friend void step_l1_ac(SimulationState&);
    friend void step_l2_ac(SimulationState&);
    friend void step_l1_ch(SimulationState&);

    void force(const ScalarField2D& u, ScalarField2D& out) const;
    void solve_diag(const ScalarField2D& rhs_a, std::span<const double> symbol,
                    const ScalarField2D* rhs_ksq = nullptr);
    void commit(ScalarField2D u_new);

    SchemeConfig cfg_;
    SolveHistory history_;
    std::shared_ptr<SpectralWorkspace> ws_;
    L1Weights l1w_;
    L2Coefficients l2c_;
    std::vector<double> symbol_;        // per-mode implicit symbol
    std::vector<double> symbol_first_;  // L1 symbol used for the L2 first step
    SpectralField2D rhs_hat_, sol_hat_, chk_hat_;
    ScalarField2D scratch_a_, scratch_b_, sol_;
    double last_residual_ = 0.0;
};

/// Stabilized L1-IMEX step for the Allen-Cahn equation. Uses the plain cubic
/// force when S >= 2 (maximum-principle regime), the truncated force below.
void step_l1_ac(SimulationState& s);

/// Second-order L2 Adams-Bashforth step (n >= 2); the n = 1 step is delegated
/// to the L1 operator, whose first-step formula the L2 one reduces to.
void step_l2_ac(SimulationState& s);

/// Stabilized L1-IMEX step for the Cahn-Hilliard equation; the zero mode is
/// untouched, so the mean of u is conserved to roundoff.
void step_l1_ch(SimulationState& s);

struct RunResult {
    std::unique_ptr<SimulationState> state;
    std::vector<EnergyRecord> records;
};

/// Called after every step; `rec` is non-null on tracked steps.
using StepCallback =
    std::function<void(int n, double t, const ScalarField2D& u, const EnergyRecord* rec)>;

/// Orchestrates n_steps steps from u0, producing the modified-energy records
/// that match the configured scheme. Records cover n = 0 and every
/// energy_stride-th step plus the final one.
RunResult run(const SchemeConfig& cfg, const ScalarField2D& u0, const StepCallback& cb = {});

} // namespace tfp
