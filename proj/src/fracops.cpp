#include "tfphase/fracops.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "tfphase/kernels.hpp"

namespace tfp {

FractionalOrder::FractionalOrder(double alpha) : a_(alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("FractionalOrder: alpha must lie strictly in (0,1)");
}

namespace {

// (k+1)^s - k^s without cancellation: k^s * expm1(s * log1p(1/k)).
long double pow_diff(long double k, long double s) {
    if (k == 0.0L) return 1.0L; // 1^s - 0^s for s > 0
    return std::pow(k, s) * std::expm1(s * std::log1p(1.0L / k));
}

} // namespace

L1Weights l1_weights(FractionalOrder alpha, double dt, int n) {
    if (!(dt > 0.0)) throw std::invalid_argument("l1_weights: dt must be positive");
    if (n < 1) throw std::invalid_argument("l1_weights: n must be >= 1");
    L1Weights w;
    w.alpha = alpha.value();
    w.dt = dt;
    extend_l1_weights(w, n);
    return w;
}

void extend_l1_weights(L1Weights& w, int n) {
    const long double a = w.alpha;
    const long double s = 1.0L - a;
    const long double scale = 1.0L / (std::tgamma(2.0L - a) * std::pow((long double)w.dt, a));
    w.b.reserve(n);
    for (int k = w.n(); k < n; ++k)
        w.b.push_back(static_cast<double>(pow_diff(k, s) * scale));
}

namespace {

struct L2Row {
    long double a, b, c;
};

L2Row l2_row(long double alpha, long double j) {
    const long double s1 = 1.0L - alpha;
    const long double s2 = 2.0L - alpha;
    const long double p1j = std::pow(j, s1), p1j1 = std::pow(j + 1, s1);
    const long double d2 = pow_diff(j, s2); // (j+1)^{2-a} - j^{2-a}
    L2Row r;
    r.a = -1.5L * s2 * p1j1 + 0.5L * s2 * p1j + d2;
    r.b = 2.0L * s2 * p1j1 - 2.0L * d2;
    r.c = -0.5L * s2 * (p1j1 + p1j) + d2;
    return r;
}

} // namespace

L2Coefficients l2_coefficients(FractionalOrder alpha, int n) {
    if (n < 2) throw std::invalid_argument("l2_coefficients: n must be >= 2");
    L2Coefficients c;
    c.alpha = alpha.value();
    const long double a = alpha.value();
    c.r1 = static_cast<double>(2.0L + a / 2.0L - (a / 2.0L + 1.0L) * std::pow(2.0L, 1.0L - a));
    c.a.assign(1, 0.0);
    c.b.assign(1, 0.0);
    c.c.assign(1, 0.0);
    c.d.assign(1, 0.0);
    extend_l2_coefficients(c, n);
    return c;
}

void extend_l2_coefficients(L2Coefficients& c, int n) {
    const long double a = c.alpha;
    long double prev_a = c.max_index() >= 1 ? (long double)c.a.back() : 0.0L;
    for (int j = c.max_index() + 1; j <= n; ++j) {
        const L2Row r = l2_row(a, j);
        c.a.push_back(static_cast<double>(r.a));
        c.b.push_back(static_cast<double>(r.b));
        c.c.push_back(static_cast<double>(r.c));
        if (j == 1)
            c.d.push_back(static_cast<double>(r.c + 2.0L - 2.0L * a));
        else
            c.d.push_back(static_cast<double>(r.c - prev_a));
        prev_a = r.a;
    }
}

std::optional<std::string> L2Coefficients::validate(double sum_tol) const {
    std::ostringstream os;
    const int n = max_index();
    if (!(r1 > 0.0)) {
        os << "r1 = " << r1 << " is not positive";
        return os.str();
    }
    for (int j = 1; j <= n; ++j) {
        if (std::fabs(a[j] + b[j] + c[j]) > sum_tol) {
            os << "a+b+c = " << a[j] + b[j] + c[j] << " at j=" << j;
            return os.str();
        }
        if (!(a[j] < 0.0)) {
            os << "a_" << j << " = " << a[j] << " is not negative";
            return os.str();
        }
    }
    for (int j = 2; j <= n; ++j) {
        if (c[j - 1] < c[j]) {
            os << "c not nonincreasing at j=" << j;
            return os.str();
        }
        if (d[j - 1] - d[j] < c[j - 1] - c[j] - 1e-13) {
            os << "d-difference below c-difference at j=" << j;
            return os.str();
        }
    }
    for (int j = 2; j + 1 <= n; ++j) {
        if (d[j] - d[j + 1] > d[j - 1] - d[j] + 1e-13) {
            os << "d-differences not nonincreasing at j=" << j;
            return os.str();
        }
    }
    return std::nullopt;
}

SolveHistory::SolveHistory(const GridDescriptor& g, double dt, bool keep_spectra)
    : grid_(g), dt_(dt), keep_spectra_(keep_spectra), ws_(SpectralWorkspace::get(g)) {
    if (!(dt > 0.0)) throw std::invalid_argument("SolveHistory: dt must be positive");
}

void SolveHistory::append(ScalarField2D u) {
    if (u.grid() != grid_) throw std::invalid_argument("SolveHistory::append: grid mismatch");
    if (keep_spectra_) {
        SpectralField2D s(grid_);
        ws_->forward(u, s);
        spectra_.push_back(std::move(s));
    }
    fields_.push_back(std::move(u));
    pair_cache_n_ = -1;
}

std::span<const double> SolveHistory::pair_sq_dists() const {
    const int n = last_index();
    if (pair_cache_n_ != n) {
        pair_cache_ = pair_sq_dists_direct(n);
        pair_cache_n_ = n;
    }
    return pair_cache_;
}

std::vector<double> SolveHistory::pair_sq_dists_direct(int n) const {
    std::vector<double> out(n);
    for (int k = 0; k < n; ++k) out[k] = l2_sq_diff(fields_[n], fields_[k]);
    return out;
}

std::vector<double> l1_operator_coeffs(const L1Weights& w, int n) {
    if (n < 1) throw std::invalid_argument("l1_operator_coeffs: n must be >= 1");
    if (w.n() < n) throw std::invalid_argument("l1_operator_coeffs: weights shorter than n");
    std::vector<double> g(n + 1, 0.0);
    g[n] = w.b[0];
    for (int j = 1; j <= n - 1; ++j) g[j] = w.b[n - j] - w.b[n - j - 1];
    g[0] = -w.b[n - 1];
    return g;
}

std::vector<double> l2_operator_coeffs(const L2Coefficients& c, double dt, int n) {
    if (n < 1) throw std::invalid_argument("l2_operator_coeffs: n must be >= 1");
    if (c.max_index() < n) throw std::invalid_argument("l2_operator_coeffs: coefficients shorter than n");
    const double alpha = c.alpha;
    const double ca = 1.0 / (std::tgamma(3.0 - alpha) * std::pow(dt, alpha));
    std::vector<double> g(n + 1, 0.0);
    if (n == 1) {
        // L_1^a u = (r1 + d_1)/(Gamma(3-a) dt^a) (u^1 - u^0), and r1 + d_1 = 2 - a.
        g[1] = ca * (c.r1 + c.d[1]);
        g[0] = -g[1];
        return g;
    }
    // delta u^n terms
    g[n] += 1.5 * alpha;
    g[n - 1] -= 1.5 * alpha;
    // -(a/2) delta u^{n-1}
    g[n - 1] -= 0.5 * alpha;
    g[n - 2] += 0.5 * alpha;
    // sum_{j=1}^n d_j delta u^{n-j+1}
    for (int j = 1; j <= n; ++j) {
        g[n - j + 1] += c.d[j];
        g[n - j] -= c.d[j];
    }
    // -c_n delta u^1
    g[1] -= c.c[n];
    g[0] += c.c[n];
    for (auto& v : g) v *= ca;
    return g;
}

namespace {

ScalarField2D apply_coeffs(const SolveHistory& h, std::span<const double> g) {
    const int n = static_cast<int>(g.size()) - 1;
    std::vector<const double*> ptrs(n + 1);
    for (int j = 0; j <= n; ++j) ptrs[j] = h.field(j).data();
    ScalarField2D out(h.grid());
    kern::weighted_sum(ptrs, g, out.values());
    return out;
}

double apply_coeffs(std::span<const double> u, std::span<const double> g) {
    double s = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) s += g[j] * u[j];
    return s;
}

} // namespace

ScalarField2D l1_apply(const SolveHistory& history, const L1Weights& w) {
    const int n = history.last_index();
    if (n < 1) throw std::invalid_argument("l1_apply: history needs at least two fields");
    if (w.n() != n) {
        std::ostringstream os;
        os << "l1_apply: " << w.n() << " weights for step " << n;
        throw std::invalid_argument(os.str());
    }
    return apply_coeffs(history, l1_operator_coeffs(w, n));
}

double l1_apply(std::span<const double> scalar_history, const L1Weights& w) {
    const int n = static_cast<int>(scalar_history.size()) - 1;
    if (n < 1) throw std::invalid_argument("l1_apply: history needs at least two values");
    if (w.n() != n) throw std::invalid_argument("l1_apply: weight/history length mismatch");
    return apply_coeffs(scalar_history, l1_operator_coeffs(w, n));
}

ScalarField2D l2_apply(const SolveHistory& history, const L2Coefficients& c, double dt, int n) {
    if (history.last_index() < n)
        throw std::invalid_argument("l2_apply: history has fewer than n+1 fields");
    return apply_coeffs(history, l2_operator_coeffs(c, dt, n));
}

double l2_apply(std::span<const double> scalar_history, const L2Coefficients& c, double dt, int n) {
    if (static_cast<int>(scalar_history.size()) < n + 1)
        throw std::invalid_argument("l2_apply: history has fewer than n+1 values");
    return apply_coeffs(scalar_history, l2_operator_coeffs(c, dt, n));
}

double caputo_exact_monomial(FractionalOrder alpha, int m, double t) {
    if (m < 1) throw std::invalid_argument("caputo_exact_monomial: m must be >= 1");
    if (!(t > 0.0)) throw std::invalid_argument("caputo_exact_monomial: t must be positive");
    const double a = alpha.value();
    return std::tgamma(m + 1.0) / std::tgamma(m + 1.0 - a) * std::pow(t, m - a);
}

} // namespace tfp
