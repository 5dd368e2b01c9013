#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tfphase/fields.hpp"

namespace tfp {

/// Fractional order alpha restricted to the open interval (0,1).
class FractionalOrder {
public:
    explicit FractionalOrder(double alpha);
    double value() const { return a_; }

private:
    double a_;
};

/// L1 weights b_k = [(k+1)^{1-a} - k^{1-a}] / (Gamma(2-a) dt^a), k = 0..n-1.
/// Strictly positive and strictly decreasing. Computed in long double: the
/// power difference cancels catastrophically for large k otherwise.
struct L1Weights {
    double alpha = 0.0;
    double dt = 0.0;
    std::vector<double> b;

    int n() const { return static_cast<int>(b.size()); }
};

L1Weights l1_weights(FractionalOrder alpha, double dt, int n);
/// Grow an existing weight table in place (b_k does not depend on n).
void extend_l1_weights(L1Weights& w, int n);

/// L2 coefficient families a_j, b_j, c_j (j >= 1), the derived d_j, and r1.
/// Index 0 of the arrays is unused padding so that indices match the math.
struct L2Coefficients {
    double alpha = 0.0;
    std::vector<double> a, b, c, d;
    double r1 = 0.0;

    int max_index() const { return static_cast<int>(a.size()) - 1; }
    /// Checks the sign/monotonicity structure the discrete energy relies on;
    /// returns a description of the first violation, if any.
    std::optional<std::string> validate(double sum_tol = 1e-11) const;
};

L2Coefficients l2_coefficients(FractionalOrder alpha, int n);
void extend_l2_coefficients(L2Coefficients& c, int n);

/// Ordered history u^0..u^n on one grid with uniform step dt. Optionally keeps
/// the spectrum of every field (the Cahn-Hilliard energy needs all pairwise
/// H^-1 distances) and caches the pairwise L2 distances used by the discrete
/// energies.
class SolveHistory {
public:
    SolveHistory(const GridDescriptor& g, double dt, bool keep_spectra = false);

    void append(ScalarField2D u);
    int last_index() const { return static_cast<int>(fields_.size()) - 1; }
    int count() const { return static_cast<int>(fields_.size()); }
    double dt() const { return dt_; }
    const GridDescriptor& grid() const { return grid_; }
    const ScalarField2D& field(int k) const { return fields_.at(k); }
    const SpectralField2D& spectrum(int k) const { return spectra_.at(k); }
    bool has_spectra() const { return keep_spectra_; }
    const SpectralWorkspace& workspace() const { return *ws_; }

    /// ||u^n - u^k||^2 for k = 0..n-1 where n = last_index(); cached per step.
    std::span<const double> pair_sq_dists() const;
    /// Direct recomputation, bypassing the cache (cache-consistency checks).
    std::vector<double> pair_sq_dists_direct(int n) const;

private:
    GridDescriptor grid_;
    double dt_;
    bool keep_spectra_;
    std::shared_ptr<SpectralWorkspace> ws_;
    std::vector<ScalarField2D> fields_;
    std::vector<SpectralField2D> spectra_;
    mutable std::vector<double> pair_cache_;
    mutable int pair_cache_n_ = -1;
};

// -- operator applications ---------------------------------------------------

/// Coefficients g_0..g_n such that the L1 operator applied at step n equals
/// sum_j g_j u^j (the recast telescoped form).
std::vector<double> l1_operator_coeffs(const L1Weights& w, int n);

/// Coefficients for the reformulated L2 operator L_n^a, n >= 1.
std::vector<double> l2_operator_coeffs(const L2Coefficients& c, double dt, int n);

/// Discrete Caputo derivative at the last step of the history.
ScalarField2D l1_apply(const SolveHistory& history, const L1Weights& w);
double l1_apply(std::span<const double> scalar_history, const L1Weights& w);

/// L2 approximation at step n (n = 1 uses the dedicated first-step formula).
ScalarField2D l2_apply(const SolveHistory& history, const L2Coefficients& c, double dt, int n);
double l2_apply(std::span<const double> scalar_history, const L2Coefficients& c, double dt, int n);

/// Exact Caputo derivative of t^m: Gamma(m+1)/Gamma(m+1-a) * t^{m-a}.
double caputo_exact_monomial(FractionalOrder alpha, int m, double t);

} // namespace tfp
