#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

// Grid-pointwise kernels and reductions. The OpenMP versions in tfp::kern are
// the production path; tfp::kern::ref holds the serial reference
// implementations used by the tests and the benchmark.
//
// All reductions use a fixed shape: one serial partial sum per row of length
// `row_len`, combined by a serial pairwise tree. The result is bit-identical
// for any thread count, and ref:: produces the same bits as kern::.

namespace tfp::kern {

/// Pairwise tree combine. Consumes `partials` in place.
double pairwise_combine(std::vector<double>& partials);

/// out[i] = sum_j coeffs[j] * fields[j][i]
void weighted_sum(std::span<const double* const> fields,
                  std::span<const double> coeffs,
                  std::span<double> out);

/// out[i] = a*x[i] + b*y[i]
void axpby(double a, std::span<const double> x,
           double b, std::span<const double> y,
           std::span<double> out);

/// sum_i x[i]*y[i], deterministic
double dot(std::span<const double> x, std::span<const double> y, std::size_t row_len);

/// sum_i (x[i]-y[i])^2, deterministic
double sum_sq_diff(std::span<const double> x, std::span<const double> y, std::size_t row_len);

/// sum_i x[i], deterministic
double sum(std::span<const double> x, std::size_t row_len);

/// (max_i |x[i]|, all values finite)
std::pair<double, bool> max_abs_finite(std::span<const double> x);

/// out[i] = u[i]^3 - u[i]
void double_well_force(std::span<const double> u, std::span<double> out);

/// out[i] = truncated force: cubic inside [-M,M], linear growth outside
void truncated_force(std::span<const double> u, double M, std::span<double> out);

/// sum_i (1/4)(u[i]^2 - 1)^2, deterministic
double double_well_sum(std::span<const double> u, std::size_t row_len);

namespace ref {

void weighted_sum(std::span<const double* const> fields,
                  std::span<const double> coeffs,
                  std::span<double> out);
void axpby(double a, std::span<const double> x,
           double b, std::span<const double> y,
           std::span<double> out);
double dot(std::span<const double> x, std::span<const double> y, std::size_t row_len);
double sum_sq_diff(std::span<const double> x, std::span<const double> y, std::size_t row_len);
double sum(std::span<const double> x, std::size_t row_len);
std::pair<double, bool> max_abs_finite(std::span<const double> x);
void double_well_force(std::span<const double> u, std::span<double> out);
void truncated_force(std::span<const double> u, double M, std::span<double> out);
double double_well_sum(std::span<const double> u, std::size_t row_len);

} // namespace ref
} // namespace tfp::kern
