// Serial-vs-OpenMP timing for the grid kernels that dominate a run: the
// weighted history sum, the pairwise squared distances behind the modified
// energies, and the pointwise force. Results of the two paths are checked
// bit-for-bit before timing.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "tfphase/kernels.hpp"

using namespace tfp;
using clock_type = std::chrono::steady_clock;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
    return v;
}

template <class Fn>
double time_best_of(int reps, Fn&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = clock_type::now();
        fn();
        const double s = std::chrono::duration<double>(clock_type::now() - t0).count();
        best = std::min(best, s);
    }
    return best;
}

void bench_weighted_sum(int grid_n, int nfields) {
    const std::size_t npts = static_cast<std::size_t>(grid_n) * grid_n;
    std::vector<std::vector<double>> fields(nfields);
    std::vector<const double*> ptrs(nfields);
    std::vector<double> coeffs(nfields);
    for (int j = 0; j < nfields; ++j) {
        fields[j] = random_vec(npts, 100 + j);
        ptrs[j] = fields[j].data();
        coeffs[j] = 1.0 / (j + 1.0);
    }
    std::vector<double> out_par(npts), out_ser(npts);
    kern::weighted_sum(ptrs, coeffs, out_par);
    kern::ref::weighted_sum(ptrs, coeffs, out_ser);
    if (out_par != out_ser) {
        std::printf("MISMATCH weighted_sum %d fields\n", nfields);
        return;
    }
    const double tp = time_best_of(5, [&] { kern::weighted_sum(ptrs, coeffs, out_par); });
    const double ts = time_best_of(5, [&] { kern::ref::weighted_sum(ptrs, coeffs, out_ser); });
    std::printf("weighted_sum   %4dx%-4d x%4d fields  serial %8.3f ms  omp %8.3f ms  speedup %.2f\n",
                grid_n, grid_n, nfields, ts * 1e3, tp * 1e3, ts / tp);
}

void bench_sq_diff(int grid_n, int pairs) {
    const std::size_t npts = static_cast<std::size_t>(grid_n) * grid_n;
    const auto a = random_vec(npts, 7);
    const auto b = random_vec(npts, 8);
    volatile double sink = 0.0;
    if (kern::sum_sq_diff(a, b, grid_n) != kern::ref::sum_sq_diff(a, b, grid_n)) {
        std::printf("MISMATCH sum_sq_diff\n");
        return;
    }
    const double tp = time_best_of(5, [&] {
        for (int r = 0; r < pairs; ++r) sink = sink + kern::sum_sq_diff(a, b, grid_n);
    });
    const double ts = time_best_of(5, [&] {
        for (int r = 0; r < pairs; ++r) sink = sink + kern::ref::sum_sq_diff(a, b, grid_n);
    });
    std::printf("sum_sq_diff    %4dx%-4d x%4d pairs   serial %8.3f ms  omp %8.3f ms  speedup %.2f\n",
                grid_n, grid_n, pairs, ts * 1e3, tp * 1e3, ts / tp);
}

void bench_force(int grid_n, int reps) {
    const std::size_t npts = static_cast<std::size_t>(grid_n) * grid_n;
    const auto u = random_vec(npts, 9);
    std::vector<double> out_par(npts), out_ser(npts);
    kern::truncated_force(u, 1.0, out_par);
    kern::ref::truncated_force(u, 1.0, out_ser);
    if (out_par != out_ser) {
        std::printf("MISMATCH truncated_force\n");
        return;
    }
    const double tp =
        time_best_of(5, [&] { for (int r = 0; r < reps; ++r) kern::truncated_force(u, 1.0, out_par); });
    const double ts = time_best_of(
        5, [&] { for (int r = 0; r < reps; ++r) kern::ref::truncated_force(u, 1.0, out_ser); });
    std::printf("trunc_force    %4dx%-4d x%4d reps    serial %8.3f ms  omp %8.3f ms  speedup %.2f\n",
                grid_n, grid_n, reps, ts * 1e3, tp * 1e3, ts / tp);
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP disabled (serial build); both columns run the same loops\n");
#endif
    for (int n : {64, 128}) {
        bench_weighted_sum(n, 64);
        bench_weighted_sum(n, 512);
        bench_sq_diff(n, 256);
        bench_force(n, 256);
    }
    return 0;
}
