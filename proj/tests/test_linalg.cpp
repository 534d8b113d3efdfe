#include <doctest.h>

#include <random>

#include "hbl/error.hpp"
#include "hbl/matrix.hpp"
#include "hbl/rational.hpp"
#include "hbl/subspace.hpp"
#include "support.hpp"

using namespace hbl;
using testing::oracle_rank;

namespace {

Vector vec(std::initializer_list<long> xs) {
    Vector v;
    for (long x : xs) v.push_back(Rational(x));
    return v;
}

Vector unit(std::size_t n, std::size_t i) {
    Vector v(n);
    v[i] = 1;
    return v;
}

Matrix mat(std::initializer_list<std::initializer_list<long>> rows) {
    std::vector<Vector> r;
    for (auto row : rows) r.push_back(vec(row));
    return Matrix::from_rows(r);
}

Matrix r6_map(std::size_t i) { return testing::load_datum("r6").map(i); }

}  // namespace

TEST_CASE("rational parsing and normal form") {
    CHECK(Rational::parse("2/4").str() == "1/2");
    CHECK(Rational::parse("-6/3").str() == "-2");
    CHECK(Rational::parse("0/5").str() == "0");
    CHECK(Rational(3, -6).str() == "-1/2");
    CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
    CHECK(Rational(1, 3) < Rational(1, 2));
    CHECK_THROWS_AS(Rational::parse("1/0"), ParseError);
    CHECK_THROWS_AS(Rational::parse("abc"), ParseError);
    CHECK_THROWS_AS(Rational::parse("1.5"), ParseError);
    CHECK_THROWS_AS(Rational::parse(""), ParseError);
}

TEST_CASE("rational normal form is gcd reduced with positive denominator") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<long> d(-1000, 1000);
    for (int k = 0; k < 500; ++k) {
        long n = d(rng), q = d(rng);
        if (q == 0) q = 1;
        const Rational r(n, q);
        CHECK(r.denominator() >= 1);
        mpz_class g;
        mpz_class num = r.numerator();
        mpz_class den = r.denominator();
        mpz_gcd(g.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
        CHECK((r.is_zero() ? den == 1 : g == 1));
        CHECK(Rational::parse(r.str()) == r);
    }
}

TEST_CASE("canonicalize examples") {
    CHECK(Subspace::canonicalize(mat({{2, 0, 0}, {0, 0, 3}})).basis() == mat({{1, 0, 0}, {0, 0, 1}}));
    CHECK(Subspace::canonicalize(mat({{1, 1, 0}, {1, 1, 0}})).basis() == mat({{1, 1, 0}}));
    const Subspace z = Subspace::canonicalize(Matrix(0, 3));
    CHECK(z.dim() == 0);
    CHECK(z.ambient() == 3);
}

TEST_CASE("image examples") {
    CHECK(image(r6_map(0), Subspace::coordinate(6, {0})) == Subspace::span(3, {vec({1, 0, 0})}));
    CHECK(image(r6_map(0), Subspace::zero(6)).is_zero());
    CHECK(image(r6_map(2), Subspace::coordinate(6, {0, 1, 2, 3})) == Subspace::span(2, {vec({1, 0})}));
}

TEST_CASE("kernel examples") {
    CHECK(kernel(r6_map(2)) == Subspace::coordinate(6, {0, 1, 2, 4}));
    CHECK(kernel(Matrix::identity(3)).is_zero());
    CHECK(kernel(Matrix(2, 2)).is_full());
}

TEST_CASE("sum and intersection examples") {
    CHECK(intersect(Subspace::coordinate(3, {0, 1}), Subspace::coordinate(3, {1, 2})) == Subspace::coordinate(3, {1}));
    CHECK(sum(Subspace::coordinate(3, {0}), Subspace::coordinate(3, {1})) == Subspace::coordinate(3, {0, 1}));
    const Subspace v = Subspace::zero(6);
    CHECK(intersect(sum(v, kernel(r6_map(0))), sum(v, kernel(r6_map(1)))) == Subspace::coordinate(6, {3}));
    CHECK_THROWS_AS(sum(Subspace::zero(2), Subspace::zero(3)), DimensionError);
}

TEST_CASE("orthogonal complement examples") {
    CHECK(orthogonal_complement(Subspace::coordinate(6, {0, 1, 2, 3})) == Subspace::coordinate(6, {4, 5}));
    const Subspace v6 = Subspace::span(6, {unit(6, 0), unit(6, 1), unit(6, 2), unit(6, 3), vec({0, 0, 0, 0, 1, 1})});
    CHECK(orthogonal_complement(v6) == Subspace::span(6, {vec({0, 0, 0, 0, 1, -1})}));
    CHECK(orthogonal_complement(Subspace::zero(4)).is_full());
}

TEST_CASE("projection matrix examples") {
    const Matrix p = projection_matrix(Subspace::span(2, {vec({1, 1})}));
    const Rational h(1, 2);
    CHECK(p == Matrix(2, 2, {h, h, h, h}));
    CHECK(projection_matrix(Subspace::full(3)) == Matrix::identity(3));
    CHECK(projection_matrix(Subspace::coordinate(3, {0})) == mat({{1, 0, 0}, {0, 0, 0}, {0, 0, 0}}));
}

TEST_CASE("rank, determinant and inverse agree with independent elimination") {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 200; ++k) {
        const std::size_t r = 1 + rng() % 5, c = 1 + rng() % 5;
        const Matrix m = testing::random_matrix(r, c, rng, -2, 2);
        CHECK(rank(m) == oracle_rank(m));
        CHECK(null_space(m).rows() == c - rank(m));
        const Matrix ns = null_space(m);
        for (std::size_t j = 0; j < ns.rows(); ++j) {
            const Vector x = ns.row_vector(j);
            for (const Rational& y : m * std::span<const Rational>(x)) CHECK(y.is_zero());
        }
        if (r == c) {
            const auto inv = inverse(m);
            CHECK(inv.has_value() == !determinant(m).is_zero());
            if (inv) CHECK(m * *inv == Matrix::identity(r));
        }
    }
}

TEST_CASE("property: canonical form does not depend on the generators") {
    std::mt19937_64 rng(101);
    for (int k = 0; k < 200; ++k) {
        const std::size_t n = 1 + rng() % 6, d = rng() % (n + 1);
        const Matrix gens = testing::random_matrix(d, n, rng);
        const Subspace u = Subspace::canonicalize(gens);
        // Recombine the basis with a random invertible matrix and pad with redundant rows.
        const std::size_t dim = u.dim();
        Matrix other(0, n);
        if (dim > 0) {
            other = testing::random_unimodular(dim, rng) * u.basis();
            other = other.stacked(testing::random_matrix(2, dim, rng) * u.basis());
        }
        CHECK(Subspace::canonicalize(other) == u);
        CHECK(u.dim() == oracle_rank(gens));
    }
}

TEST_CASE("property: modular dimension law") {
    std::mt19937_64 rng(102);
    for (int k = 0; k < 300; ++k) {
        const std::size_t n = 1 + rng() % 6;
        const Subspace u = testing::random_subspace(n, rng() % (n + 1), rng);
        const Subspace w = testing::random_subspace(n, rng() % (n + 1), rng);
        CHECK(sum(u, w).dim() + intersect(u, w).dim() == u.dim() + w.dim());
        CHECK(sum(u, w).contains(u));
        CHECK(u.contains(intersect(u, w)));
    }
}

TEST_CASE("property: intersection is the complement of the sum of complements") {
    std::mt19937_64 rng(103);
    for (int k = 0; k < 300; ++k) {
        const std::size_t n = 1 + rng() % 6;
        const Subspace u = testing::random_subspace(n, rng() % (n + 1), rng);
        const Subspace w = testing::random_subspace(n, rng() % (n + 1), rng);
        CHECK(intersect(u, w) == orthogonal_complement(sum(orthogonal_complement(u), orthogonal_complement(w))));
        CHECK(orthogonal_complement(orthogonal_complement(u)) == u);
    }
}

TEST_CASE("property: projector laws") {
    std::mt19937_64 rng(104);
    for (int k = 0; k < 150; ++k) {
        const std::size_t n = 1 + rng() % 5;
        const Subspace u = testing::random_subspace(n, rng() % (n + 1), rng);
        const Matrix p = projection_matrix(u);
        CHECK(p * p == p);
        CHECK(p.transpose() == p);
        CHECK(Subspace::canonicalize(p) == u);
        const Matrix q = projection_matrix(orthogonal_complement(u));
        CHECK(p + q == Matrix::identity(n));
    }
}

TEST_CASE("property: image and preimage dimensions") {
    std::mt19937_64 rng(105);
    for (int k = 0; k < 200; ++k) {
        const std::size_t n = 1 + rng() % 5, r = 1 + rng() % 4;
        const Matrix map = testing::random_matrix(r, n, rng, -1, 1);
        const Subspace v = testing::random_subspace(n, rng() % (n + 1), rng);
        CHECK(image(map, v).dim() == testing::oracle_image_dim(map, v));
        CHECK(kernel(map).dim() == n - oracle_rank(map));
        const Subspace img = image(map, v);
        CHECK(preimage(map, img) == sum(v, kernel(map)));
    }
}
