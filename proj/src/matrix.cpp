#include "hbl/matrix.hpp"

#include <string>
#include <utility>

#include "hbl/error.hpp"

namespace hbl {

namespace {

std::string shape(const Matrix& m) { return std::to_string(m.rows()) + "x" + std::to_string(m.cols()); }

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<Rational> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_)
        throw DimensionError("matrix entry count " + std::to_string(entries_.size()) + " does not match " +
                             std::to_string(rows_) + "x" + std::to_string(cols_));
}

Matrix Matrix::from_rows(const std::vector<Vector>& rows, std::size_t cols) {
    Matrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols)
            throw DimensionError("ragged matrix: row " + std::to_string(r) + " has " +
                                 std::to_string(rows[r].size()) + " entries, expected " + std::to_string(cols));
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
    }
    return m;
}

Matrix Matrix::from_rows(const std::vector<Vector>& rows) {
    if (rows.empty()) throw DimensionError("cannot infer column count of an empty row list");
    return from_rows(rows, rows.front().size());
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

Vector Matrix::col_vector(std::size_t c) const {
    Vector v(rows_);
    for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
}

std::vector<Vector> Matrix::row_list() const {
    std::vector<Vector> out;
    out.reserve(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out.push_back(row_vector(r));
    return out;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

Matrix Matrix::stacked(const Matrix& below) const {
    if (below.cols_ != cols_) throw DimensionError("stacking " + shape(*this) + " over " + shape(below));
    std::vector<Rational> e = entries_;
    e.insert(e.end(), below.entries_.begin(), below.entries_.end());
    return Matrix(rows_ + below.rows_, cols_, std::move(e));
}

Matrix Matrix::joined(const Matrix& right) const {
    if (right.rows_ != rows_) throw DimensionError("joining " + shape(*this) + " with " + shape(right));
    Matrix out(rows_, cols_ + right.cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) out(r, c) = (*this)(r, c);
        for (std::size_t c = 0; c < right.cols_; ++c) out(r, cols_ + c) = right(r, c);
    }
    return out;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw DimensionError("multiplying " + shape(a) + " by " + shape(b));
    Matrix out(a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Rational& x = a(r, k);
            if (x.is_zero()) continue;
            for (std::size_t c = 0; c < b.cols(); ++c)
                if (!b(k, c).is_zero()) out(r, c) += x * b(k, c);
        }
    return out;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("adding " + shape(a) + " and " + shape(b));
    Matrix out = a;
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) += b(r, c);
    return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError("subtracting " + shape(b) + " from " + shape(a));
    Matrix out = a;
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) -= b(r, c);
    return out;
}

Matrix operator*(const Rational& s, const Matrix& a) {
    Matrix out = a;
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) *= s;
    return out;
}

Vector operator*(const Matrix& a, std::span<const Rational> v) {
    if (a.cols() != v.size())
        throw DimensionError("multiplying " + shape(a) + " by vector of length " + std::to_string(v.size()));
    Vector out(a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r) out[r] = dot(a.row(r), v);
    return out;
}

Rational dot(std::span<const Rational> a, std::span<const Rational> b) {
    if (a.size() != b.size()) throw DimensionError("dot product of unequal lengths");
    mpq_class acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!a[i].is_zero() && !b[i].is_zero()) acc += a[i].value() * b[i].value();
    return Rational(std::move(acc));
}

EchelonForm rref(const Matrix& m) {
    // Work on raw mpq values; Rational wrappers would add a copy per operation.
    const std::size_t rows = m.rows(), cols = m.cols();
    std::vector<std::vector<mpq_class>> a(rows, std::vector<mpq_class>(cols));
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) a[r][c] = m(r, c).value();

    std::vector<std::size_t> pivots;
    std::size_t lead = 0;
    for (std::size_t c = 0; c < cols && lead < rows; ++c) {
        std::size_t p = lead;
        while (p < rows && sgn(a[p][c]) == 0) ++p;
        if (p == rows) continue;
        std::swap(a[p], a[lead]);
        const mpq_class inv = 1 / a[lead][c];
        for (std::size_t k = c; k < cols; ++k)
            if (sgn(a[lead][k]) != 0) a[lead][k] *= inv;
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == lead || sgn(a[r][c]) == 0) continue;
            const mpq_class f = a[r][c];
            for (std::size_t k = c; k < cols; ++k)
                if (sgn(a[lead][k]) != 0) a[r][k] -= f * a[lead][k];
        }
        pivots.push_back(c);
        ++lead;
    }

    Matrix reduced(lead, cols);
    for (std::size_t r = 0; r < lead; ++r)
        for (std::size_t c = 0; c < cols; ++c) reduced(r, c) = Rational(std::move(a[r][c]));
    return {std::move(reduced), std::move(pivots)};
}

std::size_t rank(const Matrix& m) { return rref(m).pivots.size(); }

Matrix null_space(const Matrix& m) {
    const EchelonForm e = rref(m);
    const std::size_t cols = m.cols();
    std::vector<bool> is_pivot(cols, false);
    for (std::size_t p : e.pivots) is_pivot[p] = true;

    std::vector<Vector> basis;
    for (std::size_t f = 0; f < cols; ++f) {
        if (is_pivot[f]) continue;
        Vector v(cols);
        v[f] = 1;
        for (std::size_t r = 0; r < e.pivots.size(); ++r) v[e.pivots[r]] = -e.reduced(r, f);
        basis.push_back(std::move(v));
    }
    return Matrix::from_rows(basis, cols);
}

std::optional<Matrix> inverse(const Matrix& m) {
    if (m.rows() != m.cols()) throw DimensionError("inverse of non-square " + shape(m));
    const std::size_t n = m.rows();
    const EchelonForm e = rref(m.joined(Matrix::identity(n)));
    if (e.pivots.size() < n || (n > 0 && e.pivots[n - 1] != n - 1)) return std::nullopt;
    Matrix inv(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) inv(r, c) = e.reduced(r, n + c);
    return inv;
}

Rational determinant(const Matrix& m) {
    if (m.rows() != m.cols()) throw DimensionError("determinant of non-square " + shape(m));
    const std::size_t n = m.rows();
    std::vector<std::vector<mpq_class>> a(n, std::vector<mpq_class>(n));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) a[r][c] = m(r, c).value();
    mpq_class det = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && sgn(a[p][c]) == 0) ++p;
        if (p == n) return Rational(0);
        if (p != c) {
            std::swap(a[p], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (std::size_t r = c + 1; r < n; ++r) {
            if (sgn(a[r][c]) == 0) continue;
            const mpq_class f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
        }
    }
    return Rational(std::move(det));
}

std::optional<Vector> solve(const Matrix& a, std::span<const Rational> b) {
    if (a.rows() != b.size()) throw DimensionError("right-hand side length does not match " + shape(a));
    Matrix rhs(b.size(), 1, Vector(b.begin(), b.end()));
    const EchelonForm e = rref(a.joined(rhs));
    if (!e.pivots.empty() && e.pivots.back() == a.cols()) return std::nullopt;
    Vector x(a.cols());
    for (std::size_t r = 0; r < e.pivots.size(); ++r) x[e.pivots[r]] = e.reduced(r, a.cols());
    return x;
}

}  // namespace hbl
