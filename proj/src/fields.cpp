#include "tfphase/fields.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "tfphase/kernels.hpp"

namespace tfp {

GridDescriptor::GridDescriptor(int nx_, int ny_, double Lx_, double Ly_, double x0_, double y0_)
    : nx(nx_), ny(ny_), Lx(Lx_), Ly(Ly_), x0(x0_), y0(y0_) {
    if (nx < 4 || ny < 4 || nx % 2 || ny % 2)
        throw std::invalid_argument("GridDescriptor: nx, ny must be even and >= 4");
    if (!(Lx > 0.0) || !(Ly > 0.0))
        throw std::invalid_argument("GridDescriptor: Lx, Ly must be positive");
}

namespace {

std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

void check_same_grid(const GridDescriptor& a, const GridDescriptor& b, const char* who) {
    if (!(a == b)) {
        std::ostringstream os;
        os << who << ": grid mismatch (" << a.nx << "x" << a.ny << " vs " << b.nx << "x" << b.ny << ")";
        throw std::invalid_argument(os.str());
    }
}

} // namespace

struct SpectralWorkspace::Impl {
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
    double* real_buf = nullptr;
    fftw_complex* cplx_buf = nullptr;
    std::mutex exec_mutex;
};

SpectralWorkspace::SpectralWorkspace(const GridDescriptor& g)
    : grid_(g), impl_(new Impl) {
    const int nx = g.nx, ny = g.ny;
    const std::size_t nc = static_cast<std::size_t>(nx) * (ny / 2 + 1);
    impl_->real_buf = fftw_alloc_real(g.size());
    impl_->cplx_buf = fftw_alloc_complex(nc);
    {
        // FFTW plan creation is not thread-safe.
        std::lock_guard<std::mutex> lk(plan_mutex());
        impl_->fwd = fftw_plan_dft_r2c_2d(nx, ny, impl_->real_buf, impl_->cplx_buf, FFTW_ESTIMATE);
        impl_->inv = fftw_plan_dft_c2r_2d(nx, ny, impl_->cplx_buf, impl_->real_buf, FFTW_ESTIMATE);
    }

    ksq_.resize(nc);
    weight_.resize(nc);
    const double two_pi = 2.0 * std::numbers::pi;
    for (int i = 0; i < nx; ++i) {
        const int mi = (i <= nx / 2) ? i : i - nx;
        const double kx = two_pi * mi / g.Lx;
        for (int j = 0; j <= ny / 2; ++j) {
            const double ky = two_pi * j / g.Ly;
            const std::size_t idx = static_cast<std::size_t>(i) * (ny / 2 + 1) + j;
            ksq_[idx] = kx * kx + ky * ky;
            weight_[idx] = (j == 0 || j == ny / 2) ? 1.0 : 2.0;
        }
    }
}

SpectralWorkspace::~SpectralWorkspace() {
    std::lock_guard<std::mutex> lk(plan_mutex());
    if (impl_->fwd) fftw_destroy_plan(impl_->fwd);
    if (impl_->inv) fftw_destroy_plan(impl_->inv);
    fftw_free(impl_->real_buf);
    fftw_free(impl_->cplx_buf);
}

std::shared_ptr<SpectralWorkspace> SpectralWorkspace::get(const GridDescriptor& g) {
    struct Key {
        int nx, ny;
        double Lx, Ly;
        bool operator<(const Key& o) const {
            return std::tie(nx, ny, Lx, Ly) < std::tie(o.nx, o.ny, o.Lx, o.Ly);
        }
    };
    static std::map<Key, std::weak_ptr<SpectralWorkspace>> cache;
    static std::mutex cache_mutex;
    const Key key{g.nx, g.ny, g.Lx, g.Ly};
    std::lock_guard<std::mutex> lk(cache_mutex);
    if (auto sp = cache[key].lock()) return sp;
    auto sp = std::make_shared<SpectralWorkspace>(g);
    cache[key] = sp;
    return sp;
}

void SpectralWorkspace::forward(const ScalarField2D& in, SpectralField2D& out) {
    check_same_grid(in.grid(), grid_, "SpectralWorkspace::forward");
    if (out.grid() != grid_) out = SpectralField2D(grid_);
    std::lock_guard<std::mutex> lk(impl_->exec_mutex);
    std::memcpy(impl_->real_buf, in.data(), in.size() * sizeof(double));
    fftw_execute(impl_->fwd);
    std::memcpy(static_cast<void*>(out.coeffs().data()), impl_->cplx_buf,
                out.size() * sizeof(fftw_complex));
}

void SpectralWorkspace::inverse(const SpectralField2D& in, ScalarField2D& out) {
    check_same_grid(in.grid(), grid_, "SpectralWorkspace::inverse");
    if (out.grid() != grid_) out = ScalarField2D(grid_);
    const double scale = 1.0 / static_cast<double>(grid_.size());
    std::lock_guard<std::mutex> lk(impl_->exec_mutex);
    // c2r destroys its input, so the scratch copy is mandatory anyway.
    std::memcpy(impl_->cplx_buf, static_cast<const void*>(in.coeffs().data()),
                in.size() * sizeof(fftw_complex));
    fftw_execute(impl_->inv);
    double* o = out.data();
    const double* r = impl_->real_buf;
    const long long n = static_cast<long long>(out.size());
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) o[i] = r[i] * scale;
}

ScalarField2D laplacian(const ScalarField2D& u) {
    auto ws = SpectralWorkspace::get(u.grid());
    SpectralField2D uh(u.grid());
    ws->forward(u, uh);
    auto c = uh.coeffs();
    auto k2 = ws->ksq();
    const long long n = static_cast<long long>(c.size());
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) c[i] *= -k2[i];
    ScalarField2D out(u.grid());
    ws->inverse(uh, out);
    return out;
}

namespace {

void require_small_mean(const ScalarField2D& v, double tol, const char* who) {
    const double m = mean(v);
    const double nrm = l2_norm(v);
    if (std::fabs(m) * std::sqrt(v.grid().area()) > tol * nrm && nrm > 0.0) {
        std::ostringstream os;
        os << who << ": input mean " << m << " exceeds tolerance " << tol << " * ||v||/sqrt(|O|) (||v|| = "
           << nrm << "); mass conservation lost upstream";
        throw MeanTooLarge(os.str());
    }
}

} // namespace

ScalarField2D inv_neg_laplacian_zero_mean(const ScalarField2D& v, double tol) {
    require_small_mean(v, tol, "inv_neg_laplacian_zero_mean");
    auto ws = SpectralWorkspace::get(v.grid());
    SpectralField2D vh(v.grid());
    ws->forward(v, vh);
    auto c = vh.coeffs();
    auto k2 = ws->ksq();
    c[0] = 0.0; // drop the mean
    const long long n = static_cast<long long>(c.size());
#pragma omp parallel for schedule(static)
    for (long long i = 1; i < n; ++i) c[i] /= k2[i];
    ScalarField2D out(v.grid());
    ws->inverse(vh, out);
    return out;
}

double hminus1_seminorm(const ScalarField2D& v, double tol) {
    require_small_mean(v, tol, "hminus1_seminorm");
    auto ws = SpectralWorkspace::get(v.grid());
    SpectralField2D vh(v.grid());
    ws->forward(v, vh);
    auto c = vh.coeffs();
    auto k2 = ws->ksq();
    auto w = ws->mode_weight();
    std::vector<double> partials(v.grid().nx, 0.0);
    const int stride = v.grid().ny / 2 + 1;
    for (int i = 0; i < v.grid().nx; ++i) {
        double s = 0.0;
        for (int j = 0; j < stride; ++j) {
            const std::size_t idx = static_cast<std::size_t>(i) * stride + j;
            if (k2[idx] > 0.0) s += w[idx] * std::norm(c[idx]) / k2[idx];
        }
        partials[i] = s;
    }
    const double total = kern::pairwise_combine(partials);
    return std::sqrt(total * v.grid().cell_area() / static_cast<double>(v.grid().size()));
}

double hminus1_sq_diff(const SpectralField2D& a, const SpectralField2D& b,
                       const SpectralWorkspace& ws) {
    auto ca = a.coeffs();
    auto cb = b.coeffs();
    auto k2 = ws.ksq();
    auto w = ws.mode_weight();
    const auto& g = ws.grid();
    std::vector<double> partials(g.nx, 0.0);
    const int stride = g.ny / 2 + 1;
    for (int i = 0; i < g.nx; ++i) {
        double s = 0.0;
        for (int j = 0; j < stride; ++j) {
            const std::size_t idx = static_cast<std::size_t>(i) * stride + j;
            if (k2[idx] > 0.0) s += w[idx] * std::norm(ca[idx] - cb[idx]) / k2[idx];
        }
        partials[i] = s;
    }
    return kern::pairwise_combine(partials) * g.cell_area() / static_cast<double>(g.size());
}

double l2_inner(const ScalarField2D& u, const ScalarField2D& v) {
    check_same_grid(u.grid(), v.grid(), "l2_inner");
    return u.grid().cell_area() * kern::dot(u.values(), v.values(), u.grid().ny);
}

double l2_norm(const ScalarField2D& u) {
    return std::sqrt(l2_inner(u, u));
}

double l2_sq_diff(const ScalarField2D& u, const ScalarField2D& v) {
    check_same_grid(u.grid(), v.grid(), "l2_sq_diff");
    return u.grid().cell_area() * kern::sum_sq_diff(u.values(), v.values(), u.grid().ny);
}

double mean(const ScalarField2D& u) {
    return kern::sum(u.values(), u.grid().ny) / static_cast<double>(u.grid().size());
}

double max_abs(const ScalarField2D& u) {
    return kern::max_abs_finite(u.values()).first;
}

double grad_sq_norm(const ScalarField2D& u) {
    auto ws = SpectralWorkspace::get(u.grid());
    SpectralField2D uh(u.grid());
    ws->forward(u, uh);
    auto c = uh.coeffs();
    auto k2 = ws->ksq();
    auto w = ws->mode_weight();
    const auto& g = u.grid();
    std::vector<double> partials(g.nx, 0.0);
    const int stride = g.ny / 2 + 1;
    for (int i = 0; i < g.nx; ++i) {
        double s = 0.0;
        for (int j = 0; j < stride; ++j) {
            const std::size_t idx = static_cast<std::size_t>(i) * stride + j;
            s += w[idx] * k2[idx] * std::norm(c[idx]);
        }
        partials[i] = s;
    }
    return kern::pairwise_combine(partials) * g.cell_area() / static_cast<double>(g.size());
}

} // namespace tfp
