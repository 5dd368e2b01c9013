#include "tfphase/kernels.hpp"

#include <cmath>

namespace tfp::kern {

namespace ref {
void weighted_sum(std::span<const double* const>, std::span<const double>, std::span<double>);
void axpby(double, std::span<const double>, double, std::span<const double>, std::span<double>);
void double_well_force(std::span<const double>, std::span<double>);
void truncated_force(std::span<const double>, double, std::span<double>);
} // namespace ref

double pairwise_combine(std::vector<double>& p) {
    std::size_t n = p.size();
    if (n == 0) return 0.0;
    while (n > 1) {
        const std::size_t half = n / 2;
        for (std::size_t i = 0; i < half; ++i) p[i] = p[2 * i] + p[2 * i + 1];
        if (n % 2) {
            p[half] = p[n - 1];
            n = half + 1;
        } else {
            n = half;
        }
    }
    return p[0];
}

namespace {

// Below this many points the thread-team startup costs more than the loop;
// the serial path computes the identical row partials, so results match
// bit-for-bit either way.
constexpr std::size_t kParallelCutoff = 1 << 16;

template <class RowSum>
double reduce_rows_serial(std::size_t total, std::size_t row_len, RowSum row_sum) {
    if (row_len == 0) row_len = total ? total : 1;
    const std::size_t nrows = (total + row_len - 1) / row_len;
    std::vector<double> partials(nrows, 0.0);
    for (std::size_t r = 0; r < nrows; ++r) {
        const std::size_t lo = r * row_len;
        const std::size_t hi = lo + row_len < total ? lo + row_len : total;
        partials[r] = row_sum(lo, hi);
    }
    return pairwise_combine(partials);
}

// Partial sums per fixed-length row; the row partition does not depend on the
// thread count, so the combined result is reproducible.
template <class RowSum>
double reduce_rows(std::size_t total, std::size_t row_len, RowSum row_sum) {
    if (total < kParallelCutoff) return reduce_rows_serial(total, row_len, row_sum);
    if (row_len == 0) row_len = total ? total : 1;
    const std::size_t nrows = (total + row_len - 1) / row_len;
    std::vector<double> partials(nrows, 0.0);
#pragma omp parallel for schedule(static)
    for (long long r = 0; r < static_cast<long long>(nrows); ++r) {
        const std::size_t lo = static_cast<std::size_t>(r) * row_len;
        const std::size_t hi = lo + row_len < total ? lo + row_len : total;
        partials[static_cast<std::size_t>(r)] = row_sum(lo, hi);
    }
    return pairwise_combine(partials);
}

} // namespace

void weighted_sum(std::span<const double* const> fields,
                  std::span<const double> coeffs,
                  std::span<double> out) {
    const std::size_t nf = fields.size();
    if (nf * out.size() < kParallelCutoff) {
        ref::weighted_sum(fields, coeffs, out);
        return;
    }
    const long long n = static_cast<long long>(out.size());
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < nf; ++j) acc += coeffs[j] * fields[j][i];
        out[static_cast<std::size_t>(i)] = acc;
    }
}

void axpby(double a, std::span<const double> x,
           double b, std::span<const double> y,
           std::span<double> out) {
    if (out.size() < kParallelCutoff) {
        ref::axpby(a, x, b, y, out);
        return;
    }
    const long long n = static_cast<long long>(out.size());
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = a * x[static_cast<std::size_t>(i)] + b * y[static_cast<std::size_t>(i)];
}

double dot(std::span<const double> x, std::span<const double> y, std::size_t row_len) {
    return reduce_rows(x.size(), row_len, [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += x[i] * y[i];
        return s;
    });
}

double sum_sq_diff(std::span<const double> x, std::span<const double> y, std::size_t row_len) {
    return reduce_rows(x.size(), row_len, [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            const double d = x[i] - y[i];
            s += d * d;
        }
        return s;
    });
}

double sum(std::span<const double> x, std::size_t row_len) {
    return reduce_rows(x.size(), row_len, [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += x[i];
        return s;
    });
}

std::pair<double, bool> max_abs_finite(std::span<const double> x) {
    double m = 0.0;
    bool finite = true;
    const long long n = static_cast<long long>(x.size());
#pragma omp parallel for schedule(static) reduction(max : m) reduction(&& : finite)
    for (long long i = 0; i < n; ++i) {
        const double v = x[static_cast<std::size_t>(i)];
        finite = finite && std::isfinite(v);
        const double a = std::fabs(v);
        if (a > m) m = a;
    }
    return {m, finite};
}

void double_well_force(std::span<const double> u, std::span<double> out) {
    if (u.size() < kParallelCutoff) {
        ref::double_well_force(u, out);
        return;
    }
    const long long n = static_cast<long long>(u.size());
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) {
        const double v = u[static_cast<std::size_t>(i)];
        out[static_cast<std::size_t>(i)] = v * v * v - v;
    }
}

void truncated_force(std::span<const double> u, double M, std::span<double> out) {
    if (u.size() < kParallelCutoff) {
        ref::truncated_force(u, M, out);
        return;
    }
    const double L = 3.0 * M * M - 1.0;
    const double edge = M * M * M - M;
    const long long n = static_cast<long long>(u.size());
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) {
        const double v = u[static_cast<std::size_t>(i)];
        double f;
        if (v > M)
            f = L * (v - M) + edge;
        else if (v < -M)
            f = L * (v + M) - edge;
        else
            f = v * v * v - v;
        out[static_cast<std::size_t>(i)] = f;
    }
}

double double_well_sum(std::span<const double> u, std::size_t row_len) {
    return reduce_rows(u.size(), row_len, [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            const double q = u[i] * u[i] - 1.0;
            s += 0.25 * q * q;
        }
        return s;
    });
}

namespace ref {

void weighted_sum(std::span<const double* const> fields,
                  std::span<const double> coeffs,
                  std::span<double> out) {
    const std::size_t nf = fields.size();
    for (std::size_t i = 0; i < out.size(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < nf; ++j) acc += coeffs[j] * fields[j][i];
        out[i] = acc;
    }
}

void axpby(double a, std::span<const double> x,
           double b, std::span<const double> y,
           std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * x[i] + b * y[i];
}

double dot(std::span<const double> x, std::span<const double> y, std::size_t row_len) {
    return reduce_rows_serial(x.size(), row_len, [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += x[i] * y[i];
        return s;
    });
}

double sum_sq_diff(std::span<const double> x, std::span<const double> y, std::size_t row_len) {
    return reduce_rows_serial(x.size(), row_len, [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            const double d = x[i] - y[i];
            s += d * d;
        }
        return s;
    });
}

double sum(std::span<const double> x, std::size_t row_len) {
    return reduce_rows_serial(x.size(), row_len, [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += x[i];
        return s;
    });
}

std::pair<double, bool> max_abs_finite(std::span<const double> x) {
    double m = 0.0;
    bool finite = true;
    for (const double v : x) {
        finite = finite && std::isfinite(v);
        const double a = std::fabs(v);
        if (a > m) m = a;
    }
    return {m, finite};
}

void double_well_force(std::span<const double> u, std::span<double> out) {
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] * u[i] * u[i] - u[i];
}

void truncated_force(std::span<const double> u, double M, std::span<double> out) {
    const double L = 3.0 * M * M - 1.0;
    const double edge = M * M * M - M;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double v = u[i];
        if (v > M)
            out[i] = L * (v - M) + edge;
        else if (v < -M)
            out[i] = L * (v + M) - edge;
        else
            out[i] = v * v * v - v;
    }
}

double double_well_sum(std::span<const double> u, std::size_t row_len) {
    return reduce_rows_serial(u.size(), row_len, [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            const double q = u[i] * u[i] - 1.0;
            s += 0.25 * q * q;
        }
        return s;
    });
}

} // namespace ref
} // namespace tfp::kern
