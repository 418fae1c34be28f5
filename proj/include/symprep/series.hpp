#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "symprep/matrix.hpp"

namespace symprep {

/// Exponent of t^j x^alpha.
struct MultiIndex {
    int j = 0;
    std::vector<int> alpha;

    int total() const noexcept;
    std::size_t num_vars() const noexcept { return alpha.size(); }

    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

MultiIndex operator+(const MultiIndex& a, const MultiIndex& b);
/// Componentwise difference; requires b <= a.
MultiIndex operator-(const MultiIndex& a, const MultiIndex& b);
/// Componentwise partial order.
bool le(const MultiIndex& a, const MultiIndex& b);

/// Graded-lexicographic: total degree, then j descending, then alpha lexicographic.
struct GradedLexLess {
    bool operator()(const MultiIndex& a, const MultiIndex& b) const;
};

/// All indices with total degree exactly `degree`, in graded-lex order.
std::vector<MultiIndex> indices_of_degree(std::size_t num_vars, int degree);
/// All indices with total degree <= `order`, in graded-lex order.
std::vector<MultiIndex> indices_up_to(std::size_t num_vars, int order);
/// All b with b <= a componentwise.
std::vector<MultiIndex> sub_indices(const MultiIndex& a);

/// Truncated power series in (t, x_1..x_n) with N x N matrix coefficients,
/// keeping total degree j + |alpha| <= order. Zero coefficients are never
/// stored, and iteration follows GradedLexLess.
class MSeries {
public:
    using CoeffMap = std::map<MultiIndex, Matrix, GradedLexLess>;

    MSeries() = default;
    MSeries(std::size_t num_vars, std::size_t dim, int order);

    static MSeries constant(std::size_t num_vars, int order, const Matrix& c);
    static MSeries monomial(const MultiIndex& idx, int order, const Matrix& c);

    std::size_t num_vars() const noexcept { return num_vars_; }
    std::size_t dim() const noexcept { return dim_; }
    int order() const noexcept { return order_; }

    const CoeffMap& coefficients() const noexcept { return coeffs_; }
    auto begin() const { return coeffs_.begin(); }
    auto end() const { return coeffs_.end(); }
    bool empty() const noexcept { return coeffs_.empty(); }
    std::size_t size() const noexcept { return coeffs_.size(); }

    /// Coefficient at idx, the zero matrix when absent.
    Matrix coeff(const MultiIndex& idx) const;
    const Matrix* find(const MultiIndex& idx) const;

    /// Stores c at idx. Zero matrices erase; indices above the order are
    /// dropped and recorded as truncation loss.
    void set(const MultiIndex& idx, Matrix c);
    void accumulate(const MultiIndex& idx, const Matrix& c);

    /// Set when a nonzero contribution was dropped above the order.
    bool truncation_loss() const noexcept { return truncation_loss_; }
    void mark_truncation_loss() noexcept { truncation_loss_ = true; }

    bool is_t_free() const;
    /// Largest coefficient operator norm.
    double max_norm() const;
    /// Largest coefficient operator norm among indices of total degree `degree`.
    double max_norm_at_degree(int degree) const;
    /// Largest ||c - c^*|| over coefficients.
    double max_asymmetry() const;

    /// Same coefficients, re-truncated to a (lower or higher) order.
    MSeries with_order(int order) const;

    friend bool operator==(const MSeries& a, const MSeries& b)
    {
        return a.num_vars_ == b.num_vars_ && a.dim_ == b.dim_ && a.order_ == b.order_ && a.coeffs_ == b.coeffs_;
    }

private:
    void check_index(const MultiIndex& idx) const;
    void check_matrix(const Matrix& c) const;

    std::size_t num_vars_ = 0;
    std::size_t dim_ = 0;
    int order_ = 0;
    CoeffMap coeffs_;
    bool truncation_loss_ = false;
};

/// A t-free series (every stored index has j = 0).
class XSeries {
public:
    XSeries() = default;
    XSeries(std::size_t num_vars, std::size_t dim, int order);
    /// Throws Error if `s` has any coefficient with j > 0.
    explicit XSeries(MSeries s);

    const MSeries& series() const noexcept { return s_; }
    operator const MSeries&() const noexcept { return s_; }

    std::size_t num_vars() const noexcept { return s_.num_vars(); }
    std::size_t dim() const noexcept { return s_.dim(); }
    int order() const noexcept { return s_.order(); }

    Matrix coeff(const std::vector<int>& alpha) const;
    void set(const std::vector<int>& alpha, Matrix c);

    bool is_hermitian(double tol = 1e-12) const;

    friend bool operator==(const XSeries&, const XSeries&) = default;

private:
    MSeries s_;
};

MSeries add(const MSeries& a, const MSeries& b);
MSeries subtract(const MSeries& a, const MSeries& b);
MSeries scale(const MSeries& a, complex c);

/// Truncated Cauchy product with non-commutative coefficient products.
MSeries mul(const MSeries& a, const MSeries& b);

/// Coefficientwise conjugate transpose: the series of U^*(t,x) for real (t,x).
MSeries adjoint_series(const MSeries& a);

/// Coefficientwise hermitian_part.
MSeries hermitian_part_series(const MSeries& a);

MSeries dt(const MSeries& a);
/// Antiderivative in t vanishing at t = 0; coefficients pushed above the
/// order are dropped and flagged.
MSeries integrate_t(const MSeries& a);
/// Shifts j -> j-1. Throws Error when the j = 0 layer exceeds
/// rel_tol * max_norm(a) (default 1e-11).
MSeries divide_by_t(const MSeries& a, double rel_tol = 1e-11);

/// The j = 0 layer a(0, x).
XSeries t_zero_slice(const MSeries& a);

/// Multiplicative inverse; requires an invertible constant term.
MSeries series_inverse(const MSeries& a);

Matrix eval(const MSeries& a, double t, std::span<const double> x);

} // namespace symprep
