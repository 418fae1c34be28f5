#include "symprep/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "symprep/errors.hpp"

namespace symprep {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kOffDiagonalThreshold = 1e-14;
constexpr double kHermitianTol = 1e-12;
constexpr double kPhaseTieTol = 1e-12;

double off_diagonal_norm(const Matrix& a)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < a.dim(); ++j) {
            if (i != j) {
                s += std::norm(a(i, j));
            }
        }
    }
    return std::sqrt(s);
}

// Eigenvalues and eigenvectors of a matrix that is Hermitian by construction.
// Columns of the returned basis are unsorted and carry arbitrary phases.
HermitianEigen jacobi(Matrix a)
{
    const std::size_t n = a.dim();
    Matrix v = Matrix::identity(n);
    const double threshold = kOffDiagonalThreshold * a.frobenius_norm();

    int sweep = 0;
    while (off_diagonal_norm(a) > threshold) {
        if (++sweep > kMaxSweeps) {
            std::ostringstream msg;
            msg << "hermitian_eigendecomposition: no convergence after " << kMaxSweeps
                << " sweeps (off-diagonal norm " << off_diagonal_norm(a) << ")";
            throw ConvergenceError(msg.str());
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double r = std::abs(a(p, q));
                if (r == 0.0) {
                    continue;
                }
                // Phase u with a_pq = r u; the rotation J = diag(1, conj(u)) * R(c, s)
                // reduces the 2x2 block to a real symmetric one and annihilates it.
                const complex u = a(p, q) / r;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double theta = (aqq - app) / (2.0 * r);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const complex jpp = c;
                const complex jpq = s;
                const complex jqp = -s * std::conj(u);
                const complex jqq = c * std::conj(u);

                // a <- a J (columns p, q)
                for (std::size_t k = 0; k < n; ++k) {
                    const complex akp = a(k, p);
                    const complex akq = a(k, q);
                    a(k, p) = akp * jpp + akq * jqp;
                    a(k, q) = akp * jpq + akq * jqq;
                }
                // a <- J^* a (rows p, q)
                for (std::size_t k = 0; k < n; ++k) {
                    const complex apk = a(p, k);
                    const complex aqk = a(q, k);
                    a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
                    a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                for (std::size_t k = 0; k < n; ++k) {
                    const complex vkp = v(k, p);
                    const complex vkq = v(k, q);
                    v(k, p) = vkp * jpp + vkq * jqp;
                    v(k, q) = vkp * jpq + vkq * jqq;
                }
            }
        }
    }

    HermitianEigen out;
    out.eigenvalues.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.eigenvalues[i] = a(i, i).real();
    }
    out.basis = std::move(v);
    return out;
}

void sort_and_fix_phases(HermitianEigen& eig)
{
    const std::size_t n = eig.eigenvalues.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return eig.eigenvalues[i] < eig.eigenvalues[j]; });

    HermitianEigen sorted;
    sorted.eigenvalues.resize(n);
    sorted.basis = Matrix(n);
    for (std::size_t col = 0; col < n; ++col) {
        const std::size_t src = order[col];
        sorted.eigenvalues[col] = eig.eigenvalues[src];
        double biggest = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            biggest = std::max(biggest, std::abs(eig.basis(r, src)));
        }
        std::size_t pivot = 0;
        for (std::size_t r = 0; r < n; ++r) {
            if (std::abs(eig.basis(r, src)) >= biggest * (1.0 - kPhaseTieTol)) {
                pivot = r;
                break;
            }
        }
        const complex z = eig.basis(pivot, src);
        const complex phase = std::abs(z) > 0.0 ? std::conj(z) / std::abs(z) : complex{1.0};
        for (std::size_t r = 0; r < n; ++r) {
            sorted.basis(r, col) = eig.basis(r, src) * phase;
        }
        sorted.basis(pivot, col) = std::abs(z);
    }
    eig = std::move(sorted);
}

double spectral_radius_hermitian(const Matrix& h)
{
    if (h.dim() == 0) {
        return 0.0;
    }
    const auto eig = jacobi(h);
    double r = 0.0;
    for (double ev : eig.eigenvalues) {
        r = std::max(r, std::abs(ev));
    }
    return r;
}

} // namespace

Matrix hermitian_part(const Matrix& a)
{
    Matrix h(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < a.dim(); ++j) {
            h(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
        }
    }
    return h;
}

Matrix skew_part(const Matrix& a)
{
    // (A - A^*) / (2i) = -i (A - A^*) / 2
    Matrix s(a.dim());
    const complex minus_half_i{0.0, -0.5};
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < a.dim(); ++j) {
            s(i, j) = minus_half_i * (a(i, j) - std::conj(a(j, i)));
        }
    }
    return s;
}

double asymmetry(const Matrix& a)
{
    // i (A - A^*) is Hermitian; its spectral radius is ||A - A^*||.
    Matrix d(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < a.dim(); ++j) {
            d(i, j) = complex{0.0, 1.0} * (a(i, j) - std::conj(a(j, i)));
        }
    }
    if (d.is_zero()) {
        return 0.0;
    }
    return spectral_radius_hermitian(hermitian_part(d));
}

double skew_asymmetry(const Matrix& a)
{
    Matrix d(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < a.dim(); ++j) {
            d(i, j) = a(i, j) + std::conj(a(j, i));
        }
    }
    if (d.is_zero()) {
        return 0.0;
    }
    return spectral_radius_hermitian(hermitian_part(d));
}

double operator_norm(const Matrix& a)
{
    if (a.is_zero()) {
        return 0.0;
    }
    // A^*A is exactly Hermitian in floating point (conjugate pairs are formed
    // by the same products in the same order).
    const Matrix gram = a.adjoint() * a;
    double top = 0.0;
    for (double ev : jacobi(gram).eigenvalues) {
        top = std::max(top, ev);
    }
    return std::sqrt(top);
}

double min_eigenvalue(const Matrix& a)
{
    const auto eig = jacobi(hermitian_part(a));
    return *std::min_element(eig.eigenvalues.begin(), eig.eigenvalues.end());
}

HermitianEigen hermitian_eigendecomposition(const Matrix& a)
{
    const double asym = asymmetry(a);
    const double scale = std::max(1.0, operator_norm(a));
    if (asym > kHermitianTol * scale) {
        std::ostringstream msg;
        msg << "hermitian_eigendecomposition: input is not Hermitian (||A - A*|| = " << asym << ")";
        throw PreconditionError(msg.str());
    }
    auto eig = jacobi(hermitian_part(a));
    sort_and_fix_phases(eig);
    return eig;
}

Matrix psd_sqrt(const Matrix& a)
{
    const auto eig = hermitian_eigendecomposition(a);
    const double smallest = eig.eigenvalues.front();
    const double largest = eig.eigenvalues.back();
    if (!(smallest > kHermitianTol * std::max(1.0, std::abs(largest)))) {
        std::ostringstream msg;
        msg << "psd_sqrt: matrix is not positive definite (smallest eigenvalue " << smallest << ")";
        throw PreconditionError(msg.str());
    }
    const std::size_t n = a.dim();
    Matrix scaled = eig.basis;
    for (std::size_t c = 0; c < n; ++c) {
        const double r = std::sqrt(eig.eigenvalues[c]);
        for (std::size_t k = 0; k < n; ++k) {
            scaled(k, c) *= r;
        }
    }
    return hermitian_part(scaled * eig.basis.adjoint());
}

Matrix cholesky_lower(const Matrix& a)
{
    const std::size_t n = a.dim();
    Matrix l(n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j).real();
        for (std::size_t k = 0; k < j; ++k) {
            d -= std::norm(l(j, k));
        }
        if (!(d > kHermitianTol * std::max(1.0, a.max_abs()))) {
            std::ostringstream msg;
            msg << "cholesky_lower: matrix is not positive definite (pivot " << d << " at column " << j << ")";
            throw PreconditionError(msg.str());
        }
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            complex s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) {
                s -= l(i, k) * std::conj(l(j, k));
            }
            l(i, j) = s / ljj;
        }
    }
    return l;
}

namespace {

struct LuFactors {
    Matrix lu;
    std::vector<std::size_t> perm;
    int sign = 1;
};

LuFactors lu_decompose(const Matrix& a, bool reject_singular = true)
{
    const std::size_t n = a.dim();
    LuFactors f{a, std::vector<std::size_t>(n), 1};
    std::iota(f.perm.begin(), f.perm.end(), 0);
    const double scale = a.max_abs();
    Matrix& m = f.lu;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(m(i, k)) > std::abs(m(piv, k))) {
                piv = i;
            }
        }
        if (!reject_singular && m(piv, k) == complex{}) {
            f.sign = 0;
            return f;
        }
        if (reject_singular && !(std::abs(m(piv, k)) > 1e-14 * scale)) {
            std::ostringstream msg;
            msg << "numerically singular matrix (pivot " << std::abs(m(piv, k)) << " at column " << k
                << ", scale " << scale << ")";
            throw SingularMatrixError(msg.str());
        }
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(m(k, j), m(piv, j));
            }
            std::swap(f.perm[k], f.perm[piv]);
            f.sign = -f.sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            m(i, k) /= m(k, k);
            const complex lik = m(i, k);
            for (std::size_t j = k + 1; j < n; ++j) {
                m(i, j) -= lik * m(k, j);
            }
        }
    }
    return f;
}

} // namespace

Matrix inverse(const Matrix& a)
{
    const std::size_t n = a.dim();
    const auto f = lu_decompose(a);
    Matrix inv(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::vector<complex> x(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = f.perm[i] == col ? 1.0 : 0.0;
            for (std::size_t k = 0; k < i; ++k) {
                x[i] -= f.lu(i, k) * x[k];
            }
        }
        for (std::size_t i = n; i-- > 0;) {
            for (std::size_t k = i + 1; k < n; ++k) {
                x[i] -= f.lu(i, k) * x[k];
            }
            x[i] /= f.lu(i, i);
        }
        for (std::size_t i = 0; i < n; ++i) {
            inv(i, col) = x[i];
        }
    }
    return inv;
}

complex determinant(const Matrix& a)
{
    const auto f = lu_decompose(a, false);
    if (f.sign == 0) {
        return 0.0;
    }
    complex det = static_cast<double>(f.sign);
    for (std::size_t i = 0; i < a.dim(); ++i) {
        det *= f.lu(i, i);
    }
    return det;
}

} // namespace symprep
