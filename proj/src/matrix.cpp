#include "symprep/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "symprep/errors.hpp"

namespace symprep {

namespace {

void require_same_dim(const Matrix& a, const Matrix& b, const char* op)
{
    if (a.dim() != b.dim()) {
        throw DimensionError(std::string(op) + ": dimension mismatch " + std::to_string(a.dim()) +
                             " vs " + std::to_string(b.dim()));
    }
}

} // namespace

Matrix::Matrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}

Matrix::Matrix(std::size_t dim, std::vector<complex> entries) : dim_(dim), data_(std::move(entries))
{
    if (data_.size() != dim * dim) {
        throw DimensionError("Matrix: expected " + std::to_string(dim * dim) + " entries, got " +
                             std::to_string(data_.size()));
    }
    if (!all_finite()) {
        throw Error("Matrix: non-finite entry");
    }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<complex>> rows) : dim_(rows.size())
{
    data_.reserve(dim_ * dim_);
    for (const auto& row : rows) {
        if (row.size() != dim_) {
            throw DimensionError("Matrix: rows must form a square array");
        }
        data_.insert(data_.end(), row.begin(), row.end());
    }
    if (!all_finite()) {
        throw Error("Matrix: non-finite entry");
    }
}

Matrix Matrix::identity(std::size_t dim)
{
    Matrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

Matrix Matrix::diagonal(std::span<const double> values)
{
    Matrix m(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        m(i, i) = values[i];
    }
    return m;
}

Matrix Matrix::diagonal(std::initializer_list<double> values)
{
    return diagonal(std::span<const double>(values.begin(), values.size()));
}

Matrix Matrix::adjoint() const
{
    Matrix r(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = 0; j < dim_; ++j) {
            r(j, i) = std::conj((*this)(i, j));
        }
    }
    return r;
}

Matrix Matrix::transpose() const
{
    Matrix r(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = 0; j < dim_; ++j) {
            r(j, i) = (*this)(i, j);
        }
    }
    return r;
}

Matrix Matrix::conj() const
{
    Matrix r = *this;
    for (auto& z : r.data_) {
        z = std::conj(z);
    }
    return r;
}

Matrix& Matrix::operator+=(const Matrix& other)
{
    require_same_dim(*this, other, "operator+");
    for (std::size_t k = 0; k < data_.size(); ++k) {
        data_[k] += other.data_[k];
    }
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& other)
{
    require_same_dim(*this, other, "operator-");
    for (std::size_t k = 0; k < data_.size(); ++k) {
        data_[k] -= other.data_[k];
    }
    return *this;
}

Matrix& Matrix::operator*=(complex c)
{
    for (auto& z : data_) {
        z *= c;
    }
    return *this;
}

void Matrix::add_product(const Matrix& a, const Matrix& b)
{
    require_same_dim(a, b, "add_product");
    require_same_dim(*this, a, "add_product");
    const std::size_t n = dim_;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const complex aik = a(i, k);
            if (aik == complex{}) {
                continue;
            }
            for (std::size_t j = 0; j < n; ++j) {
                data_[i * n + j] += aik * b(k, j);
            }
        }
    }
}

bool Matrix::is_zero() const noexcept
{
    return std::all_of(data_.begin(), data_.end(), [](complex z) { return z == complex{}; });
}

bool Matrix::all_finite() const noexcept
{
    return std::all_of(data_.begin(), data_.end(),
                       [](complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

double Matrix::max_abs() const noexcept
{
    double m = 0.0;
    for (complex z : data_) {
        m = std::max(m, std::abs(z));
    }
    return m;
}

double Matrix::frobenius_norm() const noexcept
{
    double s = 0.0;
    for (complex z : data_) {
        s += std::norm(z);
    }
    return std::sqrt(s);
}

complex Matrix::trace() const noexcept
{
    complex s{};
    for (std::size_t i = 0; i < dim_; ++i) {
        s += (*this)(i, i);
    }
    return s;
}

Matrix operator+(Matrix a, const Matrix& b)
{
    a += b;
    return a;
}

Matrix operator-(Matrix a, const Matrix& b)
{
    a -= b;
    return a;
}

Matrix operator-(Matrix a)
{
    a *= -1.0;
    return a;
}

Matrix operator*(const Matrix& a, const Matrix& b)
{
    Matrix r(a.dim());
    r.add_product(a, b);
    return r;
}

Matrix operator*(Matrix a, complex c)
{
    a *= c;
    return a;
}

Matrix operator*(complex c, Matrix a)
{
    a *= c;
    return a;
}

std::ostream& operator<<(std::ostream& os, const Matrix& m)
{
    os << '[';
    for (std::size_t i = 0; i < m.dim(); ++i) {
        os << (i ? "; " : "");
        for (std::size_t j = 0; j < m.dim(); ++j) {
            os << (j ? ", " : "") << m(i, j);
        }
    }
    return os << ']';
}

} // namespace symprep
