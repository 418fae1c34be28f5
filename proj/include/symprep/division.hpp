#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "symprep/linalg.hpp"
#include "symprep/matrix.hpp"

namespace symprep {

/// P(t, B) = t I + B for Hermitian B with ||B|| < 1.
class Pencil {
public:
    /// Throws PreconditionError if B is not Hermitian within 1e-12 or ||B|| >= 1.
    explicit Pencil(Matrix b);

    const Matrix& matrix() const noexcept { return b_; }
    std::size_t dim() const noexcept { return b_.dim(); }
    double norm() const noexcept { return norm_; }
    const HermitianEigen& spectrum() const noexcept { return eig_; }

    /// Pencil of B^T, used for left division.
    Pencil transposed() const;

private:
    Matrix b_;
    HermitianEigen eig_;
    double norm_ = 0.0;
};

/// Points closer than this to the real axis count as "on" it for the resolvent.
inline constexpr double kResolventFloor = 1e-10;

Matrix pencil_eval(const Pencil& p, complex t);

/// P(t, B)^{-1} through B's eigendecomposition. Throws PreconditionError for
/// |Im t| < kResolventFloor with |Re t| < 1 + ||B||.
Matrix pencil_resolvent(const Pencil& p, complex t);

/// ||P(t, B)^{-1}|| = 1 / min_j |t + beta_j|.
double resolvent_norm(const Pencil& p, complex t);

/// Coefficients G_0..G_d of G(t) = sum_k G_k t^k.
using MatrixPolynomial = std::vector<Matrix>;

Matrix eval_polynomial(const MatrixPolynomial& g, complex t);

/// An N x N matrix function analytic and bounded on the strip |Im t| < width.
/// Polynomials are entire; samplers are trusted to honor their declared width
/// and bound.
class StripFunction {
public:
    using Sampler = std::function<Matrix(complex)>;

    static StripFunction polynomial(MatrixPolynomial coefficients);
    static StripFunction sampler(std::size_t dim, Sampler f, double strip_half_width, double sup_bound);

    Matrix operator()(complex t) const;

    std::size_t dim() const noexcept { return dim_; }
    bool is_polynomial() const noexcept { return !sampler_; }
    const MatrixPolynomial& coefficients() const noexcept { return coeffs_; }
    /// Infinite for polynomials.
    double strip_half_width() const noexcept { return width_; }
    /// Declared sup bound; empty for polynomials (measured on the contour instead).
    std::optional<double> declared_bound() const noexcept { return bound_; }

private:
    std::size_t dim_ = 0;
    MatrixPolynomial coeffs_;
    Sampler sampler_;
    double width_ = 0.0;
    std::optional<double> bound_;
};

inline constexpr int kMinPanelsPerUnit = 8;
inline constexpr int kDefaultPanelsPerUnit = 32;

struct DivisionResult {
    std::vector<double> t_points;
    std::vector<Matrix> Q_values;
    Matrix R;
    double eps = 0.0;
    int panels = 0;
    std::size_t quadrature_nodes = 0;
    /// max_t ||G(t) - Q(t) P(t, B) - R||.
    double residual_max = 0.0;
    /// M_G: the declared bound, or the largest ||G|| on the quadrature nodes for polynomials.
    double sup_bound = 0.0;
    /// max_t ||Q(t)|| eps^2 / M_G
    double est_Q = 0.0;
    /// ||R|| eps / M_G
    double est_R = 0.0;
    /// Largest ||P(s, B)^{-1}|| over the quadrature nodes (at most 1/eps).
    double max_resolvent_norm = 0.0;
};

/// Right division G(t) = Q(t) P(t, B) + R by Cauchy integrals,
///   R = (2 pi i)^{-1} \oint G(s) P(s)^{-1} ds,  Q(t) = (2 pi i)^{-1} \oint G(s) P(s)^{-1} (s - t)^{-1} ds.
/// R uses the boundary of [-2, 2] x [-eps, eps]; Q uses the boundary of
/// [min(-2, t_min - 2), max(2, t_max + 2)] x [-eps, eps], which contains every
/// per-point rectangle and on which P is invertible.
///
/// Each edge is integrated by composite 10-point Gauss-Legendre with panel
/// width min(1 / panels, eps).
///
/// Throws PreconditionError unless 0 < eps <= min(1, strip width) and every
/// |t| < 2; Error if panels < kMinPanelsPerUnit.
DivisionResult contour_divide(const StripFunction& G, const Pencil& pencil, double eps,
                              const std::vector<double>& t_points, int panels = kDefaultPanelsPerUnit);

/// Left division G(t) = P(t, B) Q(t) + R, through the transpose of a right
/// division of G^T by P(t, B^T).
DivisionResult contour_divide_left(const StripFunction& G, const Pencil& pencil, double eps,
                                   const std::vector<double>& t_points, int panels = kDefaultPanelsPerUnit);

/// Exact synthetic right division: Q_{d-1} = G_d, Q_{k-1} = G_k - Q_k B,
/// R = G_0 - Q_0 B (= sum_k G_k (-B)^k).
std::pair<MatrixPolynomial, Matrix> polynomial_divide(const MatrixPolynomial& G, const Pencil& pencil);

/// One x-slice of G(t, x) = Q(t, x) P(t, M(x)) + R(x).
struct SliceDivision {
    std::vector<double> x;
    DivisionResult result;
};

/// Division with x-dependent pencil M(x), mapped over the given slices.
std::vector<SliceDivision> divide_on_slices(const std::function<StripFunction(const std::vector<double>&)>& G_at,
                                            const std::function<Matrix(const std::vector<double>&)>& M_at,
                                            const std::vector<std::vector<double>>& slices, double eps,
                                            const std::vector<double>& t_points, bool left = false,
                                            int panels = kDefaultPanelsPerUnit);

struct EstimateRow {
    std::string function_id;
    double eps = 0.0;
    double sup_norm_Q = 0.0;
    double norm_R = 0.0;
    double est_Q = 0.0;
    double est_R = 0.0;
};

struct EstimateTable {
    std::vector<EstimateRow> rows;
    double max_est_Q = 0.0;
    double max_est_R = 0.0;
};

struct NamedStripFunction {
    std::string id;
    StripFunction G;
};

/// Runs contour_divide over every (G, eps) and tabulates the scaled norms
/// ||Q|| eps^2 / M_G and ||R|| eps / M_G.
EstimateTable estimate_report(const std::vector<NamedStripFunction>& family, const Pencil& pencil,
                              const std::vector<double>& eps_list, const std::vector<double>& t_points,
                              int panels = kDefaultPanelsPerUnit);

/// Evaluation points used when none are given: 17 equispaced points in [-1.6, 1.6].
std::vector<double> default_t_points();

} // namespace symprep
