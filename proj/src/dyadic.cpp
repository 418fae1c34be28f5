#include "symprep/dyadic.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>
#include <type_traits>

#include "symprep/errors.hpp"

namespace symprep {

BandLimitedFunction::BandLimitedFunction(std::size_t dim, double origin, std::vector<double> frequencies,
                                         std::vector<Matrix> amplitudes)
    : dim_(dim), origin_(origin), freqs_(std::move(frequencies)), amps_(std::move(amplitudes))
{
    if (freqs_.size() != amps_.size()) {
        throw DimensionError("BandLimitedFunction: frequency and amplitude counts differ");
    }
    for (const auto& a : amps_) {
        if (a.dim() != dim_) {
            throw DimensionError("BandLimitedFunction: amplitude dimension mismatch");
        }
    }
}

Matrix BandLimitedFunction::operator()(complex s) const
{
    Matrix acc(dim_);
    const complex shift = s - origin_;
    for (std::size_t k = 0; k < freqs_.size(); ++k) {
        acc += amps_[k] * std::exp(complex{0.0, freqs_[k]} * shift);
    }
    return acc;
}

double BandLimitedFunction::max_frequency() const noexcept
{
    double m = 0.0;
    for (double f : freqs_) {
        m = std::max(m, std::abs(f));
    }
    return m;
}

double BandLimitedFunction::strip_bound(double eps) const noexcept
{
    double b = 0.0;
    for (std::size_t k = 0; k < freqs_.size(); ++k) {
        b += amps_[k].frobenius_norm() * std::exp(std::abs(freqs_[k]) * eps);
    }
    return b;
}

double dyadic_cutoff(double tau)
{
    const double a = std::abs(tau);
    if (a <= 1.0) {
        return 1.0;
    }
    if (a >= 2.0) {
        return 0.0;
    }
    const double x = a - 1.0;
    return 1.0 - x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
}

double band_weight(int j, double tau)
{
    if (j == 0) {
        return dyadic_cutoff(tau);
    }
    return dyadic_cutoff(std::ldexp(tau, -j)) - dyadic_cutoff(std::ldexp(tau, 1 - j));
}

namespace {

constexpr int kMaxBands = 12;
constexpr double kSpectralNoise = 16.0 * std::numeric_limits<double>::epsilon();

struct Spectrum {
    std::vector<double> freqs;      // tau_m
    std::vector<Matrix> coeffs;     // (1/K) * DFT, so that G(t_k) = sum_m coeffs_m e^{i tau_m (t_k - t_0)}
};

Spectrum transform(const std::vector<Matrix>& samples, const UniformGrid& grid)
{
    const std::size_t K = samples.size();
    const std::size_t n = samples.front().dim();
    Spectrum spec;
    spec.freqs.resize(K);
    spec.coeffs.assign(K, Matrix(n));
    for (std::size_t m = 0; m < K; ++m) {
        const double signed_m = m < (K + 1) / 2 ? static_cast<double>(m) : static_cast<double>(m) - static_cast<double>(K);
        spec.freqs[m] = 2.0 * std::numbers::pi * signed_m / (static_cast<double>(K) * grid.step);
    }

    auto* in = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * K));
    auto* out = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * K));
    std::unique_ptr<fftw_complex, decltype(&fftw_free)> in_guard(in, &fftw_free);
    std::unique_ptr<fftw_complex, decltype(&fftw_free)> out_guard(out, &fftw_free);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(K), in, out, FFTW_FORWARD, FFTW_ESTIMATE);
    std::unique_ptr<std::remove_pointer_t<fftw_plan>, decltype(&fftw_destroy_plan)> plan_guard(plan, &fftw_destroy_plan);

    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            for (std::size_t k = 0; k < K; ++k) {
                in[k][0] = samples[k](r, c).real();
                in[k][1] = samples[k](r, c).imag();
            }
            fftw_execute(plan);
            for (std::size_t m = 0; m < K; ++m) {
                spec.coeffs[m](r, c) = complex{out[m][0], out[m][1]} / static_cast<double>(K);
            }
        }
    }
    // Coefficients at the DFT's rounding level carry no information; dividing
    // them only adds noise to the band sums.
    double peak = 0.0;
    for (const auto& a : spec.coeffs) {
        peak = std::max(peak, a.frobenius_norm());
    }
    for (auto& a : spec.coeffs) {
        if (a.frobenius_norm() <= kSpectralNoise * peak) {
            a = Matrix(n);
        }
    }
    return spec;
}

void check_decay(const std::vector<Matrix>& samples, const Spectrum& spec, double tol)
{
    double sup = 0.0;
    for (const auto& s : samples) {
        sup = std::max(sup, s.frobenius_norm());
    }
    const double ends = std::max(samples.front().frobenius_norm(), samples.back().frobenius_norm());
    if (ends > tol * sup) {
        std::ostringstream msg;
        msg << "smooth_divide_dyadic: G does not decay at the grid ends (" << ends << " vs sup " << sup << ")";
        throw PreconditionError(msg.str());
    }
    double top = 0.0;
    double peak = 0.0;
    const double nyquist = *std::max_element(spec.freqs.begin(), spec.freqs.end());
    for (std::size_t m = 0; m < spec.freqs.size(); ++m) {
        const double a = spec.coeffs[m].frobenius_norm();
        peak = std::max(peak, a);
        if (std::abs(spec.freqs[m]) >= 0.75 * nyquist) {
            top = std::max(top, a);
        }
    }
    if (top > tol * peak) {
        std::ostringstream msg;
        msg << "smooth_divide_dyadic: transform of G does not decay at the top of the grid spectrum (" << top
            << " vs peak " << peak << "); refine the grid";
        throw PreconditionError(msg.str());
    }
}

BandLimitedFunction band(const Spectrum& spec, const UniformGrid& grid, std::size_t dim, int j)
{
    std::vector<double> freqs;
    std::vector<Matrix> amps;
    for (std::size_t m = 0; m < spec.freqs.size(); ++m) {
        const double w = band_weight(j, spec.freqs[m]);
        if (w > 0.0 && !spec.coeffs[m].is_zero()) {
            freqs.push_back(spec.freqs[m]);
            amps.push_back(spec.coeffs[m] * w);
        }
    }
    return BandLimitedFunction(dim, grid.start, std::move(freqs), std::move(amps));
}

double amplitude(const BandLimitedFunction& f)
{
    return f.strip_bound(0.0);
}

} // namespace

std::vector<BandLimitedFunction> dyadic_bands(const std::vector<Matrix>& samples, const UniformGrid& grid, int J)
{
    if (samples.size() != grid.count || samples.size() < 4) {
        throw Error("dyadic_bands: sample count must match the grid (and be at least 4)");
    }
    const Spectrum spec = transform(samples, grid);
    std::vector<BandLimitedFunction> out;
    for (int j = 0; j <= J; ++j) {
        out.push_back(band(spec, grid, samples.front().dim(), j));
    }
    return out;
}

DyadicResult smooth_divide_dyadic(const std::vector<Matrix>& samples, const UniformGrid& grid, const Pencil& pencil,
                                  const DyadicOptions& options)
{
    if (options.bands < 0 || options.bands > kMaxBands) {
        throw PreconditionError("smooth_divide_dyadic: band count J must lie in [0, " + std::to_string(kMaxBands) + "]");
    }
    if (!(options.window > 0.0 && options.window < 2.0)) {
        throw PreconditionError("smooth_divide_dyadic: evaluation window must lie in (0, 2)");
    }
    if (samples.size() != grid.count || samples.size() < 4 || !(grid.step > 0.0)) {
        throw Error("smooth_divide_dyadic: sample count must match a grid of at least 4 points with positive step");
    }
    const std::size_t n = pencil.dim();
    for (const auto& s : samples) {
        if (s.dim() != n) {
            throw DimensionError("smooth_divide_dyadic: sample and pencil dimensions differ");
        }
    }

    const Spectrum spec = transform(samples, grid);
    check_decay(samples, spec, options.decay_tol);

    // Amplitude of every band the grid can represent; the last nonempty one must be negligible.
    const double nyquist = *std::max_element(spec.freqs.begin(), spec.freqs.end());
    double max_amp = 0.0;
    double last_amp = 0.0;
    for (int j = 0; std::ldexp(1.0, j - 1) <= nyquist; ++j) {
        const double a = amplitude(band(spec, grid, n, j));
        max_amp = std::max(max_amp, a);
        last_amp = a;
    }
    if (last_amp > 1e-6 * max_amp) {
        std::ostringstream msg;
        msg << "smooth_divide_dyadic: band amplitudes do not decay (top band " << last_amp << " vs largest " << max_amp
            << "); G is not resolved as a smooth decaying function on this grid";
        throw PreconditionError(msg.str());
    }

    DyadicResult res;
    std::vector<Matrix> g_at_points;
    for (std::size_t k = 0; k < grid.count; ++k) {
        res.sup_norm_G = std::max(res.sup_norm_G, operator_norm(samples[k]));
        if (std::abs(grid.at(k)) <= options.window) {
            res.t_points.push_back(grid.at(k));
            g_at_points.push_back(samples[k]);
        }
    }
    res.Q_values.assign(res.t_points.size(), Matrix(n));
    res.R = Matrix(n);

    for (int j = 0; j <= options.bands; ++j) {
        const BandLimitedFunction g = band(spec, grid, n, j);
        DyadicBand info;
        info.j = j;
        info.eps = std::ldexp(1.0, -j);
        info.modes = g.modes();
        info.amplitude = amplitude(g);
        if (g.modes() > 0) {
            const auto sampler = StripFunction::sampler(
                n, [g](complex s) { return g(s); }, info.eps, std::max(g.strip_bound(info.eps), 1e-300));
            const DivisionResult d = contour_divide(sampler, pencil, info.eps, res.t_points, options.panels);
            for (std::size_t k = 0; k < res.t_points.size(); ++k) {
                res.Q_values[k] += d.Q_values[k];
                info.sup_norm_Q = std::max(info.sup_norm_Q, operator_norm(d.Q_values[k]));
            }
            res.R += d.R;
            info.norm_R = operator_norm(d.R);
        }
        res.bands.push_back(info);

        double resid = 0.0;
        for (std::size_t k = 0; k < res.t_points.size(); ++k) {
            const Matrix r = g_at_points[k] - res.Q_values[k] * pencil_eval(pencil, res.t_points[k]) - res.R;
            resid = std::max(resid, operator_norm(r));
        }
        res.residual_by_bands.push_back(resid);
    }
    res.residual_max = res.residual_by_bands.back();
    return res;
}

} // namespace symprep
