#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <vector>

namespace symprep {

using complex = std::complex<double>;

/// Dense square complex matrix, row-major.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t dim);
    /// Takes `dim*dim` row-major entries; rejects wrong sizes and non-finite values.
    Matrix(std::size_t dim, std::vector<complex> entries);
    Matrix(std::initializer_list<std::initializer_list<complex>> rows);

    static Matrix identity(std::size_t dim);
    static Matrix zero(std::size_t dim) { return Matrix(dim); }
    static Matrix diagonal(std::span<const double> values);
    static Matrix diagonal(std::initializer_list<double> values);

    std::size_t dim() const noexcept { return dim_; }

    complex& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
    const complex& operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }

    std::span<const complex> entries() const noexcept { return data_; }

    Matrix adjoint() const;
    Matrix transpose() const;
    Matrix conj() const;

    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(complex c);

    /// this += a * b without a temporary.
    void add_product(const Matrix& a, const Matrix& b);

    bool is_zero() const noexcept;
    bool all_finite() const noexcept;
    double max_abs() const noexcept;
    double frobenius_norm() const noexcept;
    complex trace() const noexcept;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t dim_ = 0;
    std::vector<complex> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator-(Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(Matrix a, complex c);
Matrix operator*(complex c, Matrix a);

std::ostream& operator<<(std::ostream& os, const Matrix& m);

} // namespace symprep
