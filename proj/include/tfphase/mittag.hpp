#pragma once

#include <span>
#include <utility>
#include <vector>

namespace tfp {

/// One Mittag-Leffler evaluation request. Primary support is the negative
/// real axis with alpha in (0,2); tol is the target absolute accuracy.
struct MLQuery {
    double alpha = 0.5;
    double beta = 1.0;
    double z = 0.0;
    double tol = 1e-12;
};

/// E_{alpha,beta}(z) = sum_k z^k / Gamma(alpha k + beta).
///
/// Two regimes: a compensated Taylor sum in long double, and the negative-axis
/// asymptotic series truncated at its envelope minimum. Each carries an error
/// estimate; the better one wins if it meets tol, otherwise the two values
/// must agree within tol or ConvergenceFailure is thrown.
double ml(const MLQuery& q);

/// Both derivative identities for E_{a,1}(-lambda t^a) evaluated at t:
/// finite-difference left sides (central, step h) vs the closed forms.
struct MLDerivativePair {
    double fd = 0.0;
    double closed_form = 0.0;
};
struct MLDerivativeCheck {
    MLDerivativePair decay;       // d/dt E_{a,1}(-l t^a) = -l t^{a-1} E_{a,a}(-l t^a)
    MLDerivativePair kernel;      // d/dt (t^{a-1} E_{a,a}(-l t^a)) = t^{a-2} E_{a,a-1}(-l t^a)
};
MLDerivativeCheck ml_derivative_check(double alpha, double lambda, double t, double h,
                                      double tol = 1e-11);

/// Per-mode exact solution of d_t^a u = gamma eps2 lap u: each coefficient is
/// damped by E_{a,1}(-gamma eps2 lambda t^a).
struct LinearMode {
    double lambda = 0.0; // |k|^2 of the mode
    double coeff0 = 0.0;
};
std::vector<double> linear_reference(double alpha, std::span<const LinearMode> modes,
                                     double gamma, double eps2, double t,
                                     double tol = 1e-11);

} // namespace tfp
