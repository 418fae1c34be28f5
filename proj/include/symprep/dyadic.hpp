#pragma once

#include <cstddef>
#include <vector>

#include "symprep/division.hpp"
#include "symprep/matrix.hpp"

namespace symprep {

struct UniformGrid {
    double start = 0.0;
    double step = 1.0;
    std::size_t count = 0;

    double at(std::size_t k) const noexcept { return start + step * static_cast<double>(k); }
};

/// Finite Fourier sum  sum_k a_k exp(i tau_k (s - origin)), entire in s.
class BandLimitedFunction {
public:
    BandLimitedFunction(std::size_t dim, double origin, std::vector<double> frequencies, std::vector<Matrix> amplitudes);

    Matrix operator()(complex s) const;

    std::size_t dim() const noexcept { return dim_; }
    std::size_t modes() const noexcept { return freqs_.size(); }
    double max_frequency() const noexcept;
    /// sup over |Im s| <= eps of the Frobenius-norm bound sum_k ||a_k|| e^{|tau_k| eps}.
    double strip_bound(double eps) const noexcept;

private:
    std::size_t dim_;
    double origin_;
    std::vector<double> freqs_;
    std::vector<Matrix> amps_;
};

/// Cutoff psi: 1 on [-1, 1], 0 outside [-2, 2], quintic smoothstep in between.
double dyadic_cutoff(double tau);

/// Band window: psi(tau) for j = 0, psi(2^-j tau) - psi(2^{1-j} tau) for j >= 1.
double band_weight(int j, double tau);

/// Splits the trigonometric interpolant of the samples into bands 0..J.
/// Band j only carries frequencies 2^{j-1} <= |tau| <= 2^{j+1}, so it extends
/// to the strip |Im s| < 2^-j with bound e^2 times its real-axis amplitude.
/// Transform coefficients within 16 ulp of the peak are treated as zero.
std::vector<BandLimitedFunction> dyadic_bands(const std::vector<Matrix>& samples, const UniformGrid& grid, int J);

struct DyadicBand {
    int j = 0;
    double eps = 0.0;
    std::size_t modes = 0;
    /// sum_k ||a_k||_F: bounds sup ||G_j|| on the real axis.
    double amplitude = 0.0;
    double norm_R = 0.0;
    double sup_norm_Q = 0.0;
};

struct DyadicOptions {
    int bands = 8;              ///< J; bands 0..J are divided
    double window = 1.0;        ///< Q is reported at grid points with |t| <= window (< 2)
    int panels = kDefaultPanelsPerUnit;
    double decay_tol = 1e-10;   ///< relative decay required at the grid ends and the top of the spectrum
};

struct DyadicResult {
    std::vector<double> t_points;
    std::vector<Matrix> Q_values;
    Matrix R;
    std::vector<DyadicBand> bands;
    /// max over t_points of ||G(t) - Q(t) P(t, B) - R||.
    double residual_max = 0.0;
    /// residual_max after summing bands 0..J' for each J' = 0..J.
    std::vector<double> residual_by_bands;
    /// max ||G|| over the grid.
    double sup_norm_G = 0.0;
};

/// Division of a rapidly decaying smooth G sampled on a uniform grid: each
/// dyadic band is divided by contour_divide at eps = 2^-j and the pieces are
/// summed.
///
/// Throws PreconditionError when the samples (or their transform) do not decay
/// below decay_tol at the grid ends (top of the spectrum), when band amplitudes
/// stop decaying, or when J > 12.
DyadicResult smooth_divide_dyadic(const std::vector<Matrix>& samples, const UniformGrid& grid, const Pencil& pencil,
                                  const DyadicOptions& options = {});

} // namespace symprep
