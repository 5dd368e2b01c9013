#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "tfphase/errors.hpp"

namespace tfp {

/// Uniform periodic grid on [x0, x0+Lx) x [y0, y0+Ly). Samples are taken at
/// the lower-left corners; the right/top edges are identified with the left/
/// bottom ones.
struct GridDescriptor {
    int nx = 0, ny = 0;
    double Lx = 0.0, Ly = 0.0;
    double x0 = 0.0, y0 = 0.0;

    GridDescriptor() = default;
    GridDescriptor(int nx_, int ny_, double Lx_, double Ly_, double x0_ = 0.0, double y0_ = 0.0);

    double hx() const { return Lx / nx; }
    double hy() const { return Ly / ny; }
    double cell_area() const { return hx() * hy(); }
    double area() const { return Lx * Ly; }
    std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
    double x(int i) const { return x0 + hx() * i; }
    double y(int j) const { return y0 + hy() * j; }

    bool operator==(const GridDescriptor&) const = default;
};

/// Real samples of u on a GridDescriptor, row-major with x as the slow index:
/// value(i, j) = values[i*ny + j].
class ScalarField2D {
public:
    ScalarField2D() = default;
    explicit ScalarField2D(const GridDescriptor& g, double fill = 0.0)
        : grid_(g), v_(g.size(), fill) {}

    const GridDescriptor& grid() const { return grid_; }
    std::span<double> values() { return v_; }
    std::span<const double> values() const { return v_; }
    double& operator()(int i, int j) { return v_[static_cast<std::size_t>(i) * grid_.ny + j]; }
    double operator()(int i, int j) const { return v_[static_cast<std::size_t>(i) * grid_.ny + j]; }
    std::size_t size() const { return v_.size(); }
    const double* data() const { return v_.data(); }
    double* data() { return v_.data(); }

private:
    GridDescriptor grid_;
    std::vector<double> v_;
};

/// Half-complex spectrum of a real field: nx x (ny/2 + 1) coefficients of the
/// unnormalized forward DFT; conjugate symmetry supplies the missing modes.
class SpectralField2D {
public:
    SpectralField2D() = default;
    explicit SpectralField2D(const GridDescriptor& g)
        : grid_(g), c_(static_cast<std::size_t>(g.nx) * (g.ny / 2 + 1)) {}

    const GridDescriptor& grid() const { return grid_; }
    std::span<std::complex<double>> coeffs() { return c_; }
    std::span<const std::complex<double>> coeffs() const { return c_; }
    std::size_t size() const { return c_.size(); }

private:
    GridDescriptor grid_;
    std::vector<std::complex<double>> c_;
};

/// FFTW plans plus scratch for one grid. Execution is internally serialized;
/// distinct simulations normally hold their own workspace via get().
class SpectralWorkspace {
public:
    explicit SpectralWorkspace(const GridDescriptor& g);
    ~SpectralWorkspace();
    SpectralWorkspace(const SpectralWorkspace&) = delete;
    SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

    /// Shared per-grid instance for the free-function operators.
    static std::shared_ptr<SpectralWorkspace> get(const GridDescriptor& g);

    void forward(const ScalarField2D& in, SpectralField2D& out);
    void inverse(const SpectralField2D& in, ScalarField2D& out);

    const GridDescriptor& grid() const { return grid_; }
    /// |k|^2 for each stored half-spectrum entry, same layout as coefficients.
    std::span<const double> ksq() const { return ksq_; }
    /// Conjugate-symmetry multiplicity (1 or 2) per stored entry.
    std::span<const double> mode_weight() const { return weight_; }

private:
    struct Impl;
    GridDescriptor grid_;
    std::vector<double> ksq_;
    std::vector<double> weight_;
    std::unique_ptr<Impl> impl_;
};

// -- spectral differential operators ----------------------------------------

ScalarField2D laplacian(const ScalarField2D& u);

/// Solve -lap(psi) = v - mean(v) with mean(psi) = 0. The zero mode of v is
/// dropped when |mean(v)| <= tol*||v||, otherwise MeanTooLarge is thrown.
ScalarField2D inv_neg_laplacian_zero_mean(const ScalarField2D& v, double tol = 1e-10);

/// ||grad(psi)|| with -lap(psi) = v, computed directly from the spectrum.
double hminus1_seminorm(const ScalarField2D& v, double tol = 1e-10);

/// Same seminorm squared for a spectral difference a - b (used by the
/// Cahn-Hilliard history energies, avoids one transform per pair).
double hminus1_sq_diff(const SpectralField2D& a, const SpectralField2D& b,
                       const SpectralWorkspace& ws);

// -- quadrature --------------------------------------------------------------

double l2_inner(const ScalarField2D& u, const ScalarField2D& v);
double l2_norm(const ScalarField2D& u);
double l2_sq_diff(const ScalarField2D& u, const ScalarField2D& v);
double mean(const ScalarField2D& u);
double max_abs(const ScalarField2D& u);

/// ||grad u||^2 by Parseval.
double grad_sq_norm(const ScalarField2D& u);

} // namespace tfp
