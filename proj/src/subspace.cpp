#include "hbl/subspace.hpp"

#include <algorithm>

#include "hbl/error.hpp"

namespace hbl {

namespace {

void require_same_ambient(const Subspace& u, const Subspace& w, const char* op) {
    if (u.ambient() != w.ambient())
        throw DimensionError(std::string(op) + ": ambient dimensions " + std::to_string(u.ambient()) + " and " +
                             std::to_string(w.ambient()) + " differ");
}

}  // namespace

Subspace Subspace::canonicalize(const Matrix& generators) {
    EchelonForm e = rref(generators);
    return Subspace(std::move(e.reduced), std::move(e.pivots));
}

Subspace Subspace::span(std::size_t ambient, const std::vector<Vector>& vectors) {
    return canonicalize(Matrix::from_rows(vectors, ambient));
}

Subspace Subspace::zero(std::size_t ambient) { return Subspace(Matrix(0, ambient), {}); }

Subspace Subspace::full(std::size_t ambient) {
    std::vector<std::size_t> p(ambient);
    for (std::size_t i = 0; i < ambient; ++i) p[i] = i;
    return Subspace(Matrix::identity(ambient), std::move(p));
}

Subspace Subspace::coordinate(std::size_t ambient, const std::vector<std::size_t>& axes) {
    std::vector<Vector> rows;
    for (std::size_t a : axes) {
        if (a >= ambient) throw DimensionError("coordinate axis " + std::to_string(a) + " outside ambient");
        Vector v(ambient);
        v[a] = 1;
        rows.push_back(std::move(v));
    }
    return span(ambient, rows);
}

bool Subspace::contains(std::span<const Rational> v) const {
    if (v.size() != ambient()) throw DimensionError("vector length does not match ambient dimension");
    // Reduce v against the RREF basis using the pivot columns.
    Vector rest(v.begin(), v.end());
    for (std::size_t r = 0; r < dim(); ++r) {
        const Rational f = rest[pivots_[r]];
        if (f.is_zero()) continue;
        for (std::size_t c = 0; c < ambient(); ++c)
            if (!basis_(r, c).is_zero()) rest[c] -= f * basis_(r, c);
    }
    return std::all_of(rest.begin(), rest.end(), [](const Rational& x) { return x.is_zero(); });
}

bool Subspace::contains(const Subspace& other) const {
    require_same_ambient(*this, other, "contains");
    for (std::size_t r = 0; r < other.dim(); ++r)
        if (!contains(other.basis_.row(r))) return false;
    return true;
}

std::string Subspace::str() const {
    if (is_zero()) return "{0}";
    std::string out = "span{";
    for (std::size_t r = 0; r < dim(); ++r) {
        if (r) out += ",";
        out += "(";
        for (std::size_t c = 0; c < ambient(); ++c) {
            if (c) out += ",";
            out += basis_(r, c).str();
        }
        out += ")";
    }
    return out + "}";
}

std::strong_ordering operator<=>(const Subspace& a, const Subspace& b) {
    if (auto c = a.ambient() <=> b.ambient(); c != 0) return c;
    if (auto c = a.dim() <=> b.dim(); c != 0) return c;
    if (auto c = a.pivots_ <=> b.pivots_; c != 0) return c;
    return std::lexicographical_compare_three_way(a.basis_.entries().begin(), a.basis_.entries().end(),
                                                  b.basis_.entries().begin(), b.basis_.entries().end());
}

Subspace image(const Matrix& map, const Subspace& v) {
    if (map.cols() != v.ambient())
        throw DimensionError("image: map has " + std::to_string(map.cols()) + " columns, subspace ambient is " +
                             std::to_string(v.ambient()));
    if (v.is_zero()) return Subspace::zero(map.rows());
    // Rows of B * map^T are the images of the basis rows.
    return Subspace::canonicalize(v.basis() * map.transpose());
}

Subspace image(const Matrix& map) { return Subspace::canonicalize(map.transpose()); }

Subspace kernel(const Matrix& map) { return Subspace::canonicalize(null_space(map)); }

Subspace preimage(const Matrix& map, const Subspace& w) {
    if (map.rows() != w.ambient()) throw DimensionError("preimage: target subspace lives in the wrong space");
    // x in preimage  <=>  map x is orthogonal to every vector of w-perp.
    const Subspace wperp = orthogonal_complement(w);
    if (wperp.is_zero()) return Subspace::full(map.cols());
    return kernel(wperp.basis() * map);
}

Subspace sum(const Subspace& u, const Subspace& w) {
    require_same_ambient(u, w, "sum");
    return Subspace::canonicalize(u.basis().stacked(w.basis()));
}

Subspace intersect(const Subspace& u, const Subspace& w) {
    require_same_ambient(u, w, "intersect");
    return orthogonal_complement(sum(orthogonal_complement(u), orthogonal_complement(w)));
}

Subspace orthogonal_complement(const Subspace& u) {
    if (u.is_zero()) return Subspace::full(u.ambient());
    return kernel(u.basis());
}

Matrix projection_matrix(const Subspace& u) {
    const std::size_t n = u.ambient();
    if (u.is_zero()) return Matrix(n, n);
    const Matrix& b = u.basis();
    const auto gram_inv = inverse(b * b.transpose());
    if (!gram_inv) throw Error("projection_matrix: singular Gram matrix on an independent basis");
    return b.transpose() * (*gram_inv) * b;
}

}  // namespace hbl
