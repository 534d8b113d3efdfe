#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hbl/matrix.hpp"

namespace hbl {

/// A linear subspace of Q^ambient, stored as the unique reduced row echelon basis of its span.
///
/// Two subspaces are equal exactly when their stored bases are identical, so equality,
/// ordering and use as a map key are all plain value comparisons.
class Subspace {
public:
    /// The zero subspace of Q^0.
    Subspace() = default;

    /// Row space of `generators`; the column count fixes the ambient dimension.
    static Subspace canonicalize(const Matrix& generators);
    static Subspace span(std::size_t ambient, const std::vector<Vector>& vectors);
    static Subspace zero(std::size_t ambient);
    static Subspace full(std::size_t ambient);
    /// span{e_i : i in axes}, axes 0-based.
    static Subspace coordinate(std::size_t ambient, const std::vector<std::size_t>& axes);

    std::size_t ambient() const { return basis_.cols(); }
    std::size_t dim() const { return basis_.rows(); }
    bool is_zero() const { return dim() == 0; }
    bool is_full() const { return dim() == ambient(); }
    const Matrix& basis() const { return basis_; }
    const std::vector<std::size_t>& pivots() const { return pivots_; }

    bool contains(std::span<const Rational> v) const;
    bool contains(const Subspace& other) const;

    /// Compact text form, e.g. "span{(1,0,0),(0,0,1)}" or "{0}".
    std::string str() const;

    friend bool operator==(const Subspace& a, const Subspace& b) { return a.basis_ == b.basis_; }
    /// Orders by dimension, then pivot columns, then basis entries.
    friend std::strong_ordering operator<=>(const Subspace& a, const Subspace& b);

private:
    Subspace(Matrix basis, std::vector<std::size_t> pivots) : basis_(std::move(basis)), pivots_(std::move(pivots)) {}

    Matrix basis_;
    std::vector<std::size_t> pivots_;
};

/// map(V); requires map.cols() == V.ambient().
Subspace image(const Matrix& map, const Subspace& v);
/// Full image map(Q^cols).
Subspace image(const Matrix& map);
Subspace kernel(const Matrix& map);
/// {x : map x in w}; requires w.ambient() == map.rows().
Subspace preimage(const Matrix& map, const Subspace& w);

Subspace sum(const Subspace& u, const Subspace& w);
Subspace intersect(const Subspace& u, const Subspace& w);
Subspace orthogonal_complement(const Subspace& u);

/// Orthogonal projector B^T (B B^T)^{-1} B onto u.
Matrix projection_matrix(const Subspace& u);

}  // namespace hbl
