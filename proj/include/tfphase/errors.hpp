#pragma once

#include <stdexcept>
#include <string>

namespace tfp {

/// Input to an inverse-Laplacian style operation is not zero-mean within
/// tolerance. In a Cahn-Hilliard run this means mass conservation broke
/// upstream, so it is surfaced as its own type.
struct MeanTooLarge : std::runtime_error {
    explicit MeanTooLarge(const std::string& what) : std::runtime_error(what) {}
};

/// A quadrature over a sampled trajectory was asked for more refinement
/// than the stored samples can support.
struct InsufficientSamples : std::runtime_error {
    explicit InsufficientSamples(const std::string& what) : std::runtime_error(what) {}
};

/// Neither evaluation regime of a special function reached the requested
/// accuracy.
struct ConvergenceFailure : std::runtime_error {
    explicit ConvergenceFailure(const std::string& what) : std::runtime_error(what) {}
};

/// A time stepper produced nonfinite values; carries step diagnostics.
struct SolverDiverged : std::runtime_error {
    explicit SolverDiverged(const std::string& what) : std::runtime_error(what) {}
};

} // namespace tfp
