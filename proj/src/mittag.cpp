#include "tfphase/mittag.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "tfphase/errors.hpp"

namespace tfp {

namespace {

constexpr long double kEps = std::numeric_limits<long double>::epsilon();

// 1/Gamma(x) in long double, exactly zero at the poles x = 0, -1, -2, ...
long double rgamma(long double x) {
    if (x > 0.5L) {
        if (x > 1755.0L) return 0.0L; // Gamma overflows long double
        return 1.0L / std::tgamma(x);
    }
    // Reflection: 1/Gamma(x) = Gamma(1-x) sin(pi x) / pi. Compute sin(pi x)
    // through the fractional part so large |x| keeps full accuracy.
    long double r = std::fmod(x, 2.0L);
    const long double s = std::sin(std::numbers::pi_v<long double> * r);
    if (s == 0.0L) return 0.0L;
    const long double lg = std::lgamma(1.0L - x);
    if (lg > 11300.0L) return 0.0L;
    return s * std::exp(lg) / std::numbers::pi_v<long double>;
}

struct Estimate {
    long double value;
    long double err;
};

std::optional<Estimate> ml_taylor(double alpha, double beta, double z) {
    const long double zL = z;
    const long double aL = alpha, bL = beta;
    long double sum = 0.0L, comp = 0.0L, absum = 0.0L, zk = 1.0L;
    const double hump = std::pow(std::fabs(z), 1.0 / alpha) / alpha + 10.0;
    const int kmax = 6000;
    long double term = 0.0L;
    for (int k = 0; k < kmax; ++k) {
        term = zk * rgamma(aL * k + bL);
        const long double y = term - comp;
        const long double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        absum += std::fabs(term);
        zk *= zL;
        if (!std::isfinite((double)zk) || absum > 1e4000L) return std::nullopt;
        if (k > hump && std::fabs(term) < kEps * std::max(std::fabs(sum), 1e-300L))
            return Estimate{sum, 4.0L * kEps * absum + std::fabs(term)};
    }
    return std::nullopt;
}

// E_{a,b}(-xi) ~ sum_{k>=1} (-1)^{k+1} xi^{-k} / Gamma(b - a k). Truncated at
// the minimum of the envelope xi^{-k} Gamma(1 + a k - b)/pi, which bounds each
// term (the sine factor of the reflection formula is at most one). The true
// remainder can exceed the first omitted envelope because the sign pattern is
// not strictly alternating; measured excesses reach ~40x around alpha = 0.7,
// hence the safety factor on the reported estimate.
constexpr long double kAsymSafety = 200.0L;

std::optional<Estimate> ml_asymptotic(double alpha, double beta, double z) {
    if (z >= -1.0) return std::nullopt;
    const long double xi = -static_cast<long double>(z);
    const double lxi = std::log((double)xi);
    long double sum = 0.0L, xik = 1.0L;
    double best_env = std::numeric_limits<double>::infinity();
    const int kmax = 600;
    for (int k = 1; k < kmax; ++k) {
        xik /= xi;
        const double env_ln =
            -k * lxi + std::lgamma(1.0 + alpha * k - beta) - std::log(std::numbers::pi);
        const double env = std::exp(std::min(env_ln, 700.0));
        if (env > best_env) return Estimate{sum, kAsymSafety * best_env};
        long double term = xik * rgamma((long double)beta - (long double)alpha * k);
        if (k % 2 == 0) term = -term;
        sum += term;
        best_env = env;
        if (env < (double)(kEps * std::max(std::fabs(sum), 1e-300L)))
            return Estimate{sum, kAsymSafety * env + kEps * std::fabs(sum)};
    }
    return Estimate{sum, kAsymSafety * best_env};
}

} // namespace

double ml(const MLQuery& q) {
    if (!(q.alpha > 0.0)) throw std::invalid_argument("ml: alpha must be positive");
    if (!(q.tol >= 1e-14)) throw std::invalid_argument("ml: tol must be >= 1e-14");
    if (q.z == 0.0) return static_cast<double>(rgamma(q.beta));

    const auto taylor = ml_taylor(q.alpha, q.beta, q.z);
    const auto asym = ml_asymptotic(q.alpha, q.beta, q.z);

    const Estimate* best = nullptr;
    if (taylor && taylor->err <= q.tol) best = &*taylor;
    if (asym && asym->err <= q.tol && (!best || asym->err < best->err)) best = &*asym;
    if (best) return static_cast<double>(best->value);

    // Crossover zone: accept if the two regimes agree within tol.
    if (taylor && asym && std::fabs((double)(taylor->value - asym->value)) <= q.tol)
        return static_cast<double>(asym->err < taylor->err ? asym->value : taylor->value);

    std::ostringstream os;
    os << "ml: no regime reached tol=" << q.tol << " for alpha=" << q.alpha
       << " beta=" << q.beta << " z=" << q.z;
    if (taylor) os << " (series err ~" << (double)taylor->err << ")";
    if (asym) os << " (asymptotic err ~" << (double)asym->err << ")";
    throw ConvergenceFailure(os.str());
}

MLDerivativeCheck ml_derivative_check(double alpha, double lambda, double t, double h,
                                      double tol) {
    if (!(t > 0.0) || !(h > 0.0) || !(t - h > 0.0))
        throw std::invalid_argument("ml_derivative_check: need 0 < h < t");
    auto E = [&](double beta, double tt) {
        return ml({alpha, beta, -lambda * std::pow(tt, alpha), tol});
    };
    MLDerivativeCheck out;
    out.decay.fd = (E(1.0, t + h) - E(1.0, t - h)) / (2.0 * h);
    out.decay.closed_form = -lambda * std::pow(t, alpha - 1.0) * E(alpha, t);

    auto kernel_fn = [&](double tt) {
        return std::pow(tt, alpha - 1.0) * E(alpha, tt);
    };
    out.kernel.fd = (kernel_fn(t + h) - kernel_fn(t - h)) / (2.0 * h);
    out.kernel.closed_form = std::pow(t, alpha - 2.0) * E(alpha - 1.0, t);
    return out;
}

std::vector<double> linear_reference(double alpha, std::span<const LinearMode> modes,
                                     double gamma, double eps2, double t, double tol) {
    std::vector<double> out;
    out.reserve(modes.size());
    for (const auto& m : modes) {
        if (t == 0.0) {
            out.push_back(m.coeff0);
            continue;
        }
        const double factor = (alpha == 1.0)
                                  ? std::exp(-gamma * eps2 * m.lambda * t)
                                  : ml({alpha, 1.0, -gamma * eps2 * m.lambda * std::pow(t, alpha), tol});
        out.push_back(m.coeff0 * factor);
    }
    return out;
}

} // namespace tfp
