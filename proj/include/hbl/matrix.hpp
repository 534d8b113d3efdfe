#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hbl/rational.hpp"

namespace hbl {

using Vector = std::vector<Rational>;

/// Dense row-major matrix of exact rationals.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), entries_(rows * cols) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<Rational> entries);

    /// Builds from row vectors; `cols` is needed to shape a matrix with no rows.
    static Matrix from_rows(const std::vector<Vector>& rows, std::size_t cols);
    static Matrix from_rows(const std::vector<Vector>& rows);
    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    Rational& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
    const Rational& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

    std::span<const Rational> row(std::size_t r) const { return {entries_.data() + r * cols_, cols_}; }
    Vector row_vector(std::size_t r) const { return {row(r).begin(), row(r).end()}; }
    Vector col_vector(std::size_t c) const;
    std::vector<Vector> row_list() const;
    const std::vector<Rational>& entries() const { return entries_; }

    Matrix transpose() const;
    /// Rows of `*this` followed by rows of `below`.
    Matrix stacked(const Matrix& below) const;
    /// Columns of `*this` followed by columns of `right`.
    Matrix joined(const Matrix& right) const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Rational> entries_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(const Rational& s, const Matrix& a);
Vector operator*(const Matrix& a, std::span<const Rational> v);

Rational dot(std::span<const Rational> a, std::span<const Rational> b);

struct EchelonForm {
    Matrix reduced;                   // nonzero rows only, leading ones, pivot columns cleared
    std::vector<std::size_t> pivots;  // pivot column of each row
};

/// Reduced row echelon form with zero rows dropped.
EchelonForm rref(const Matrix& m);
std::size_t rank(const Matrix& m);

/// Basis of {x : m x = 0}, one vector per row (in the order of the free columns).
Matrix null_space(const Matrix& m);

std::optional<Matrix> inverse(const Matrix& m);
Rational determinant(const Matrix& m);

/// Any solution of a x = b, or nullopt if inconsistent.
std::optional<Vector> solve(const Matrix& a, std::span<const Rational> b);

}  // namespace hbl
