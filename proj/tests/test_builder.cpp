#include <doctest.h>

#include <random>

#include "hbl/builder.hpp"
#include "hbl/error.hpp"
#include "hbl/polytope.hpp"
#include "support.hpp"

using namespace hbl;
using testing::loomis_whitney;

namespace {

const Rational half(1, 2);

bool has_row(const ExponentPolytope& poly, const Vector& coeffs, const Rational& rhs, Relation rel) {
    for (const auto& c : poly.constraints)
        if (c.coeffs == coeffs && c.rhs == rhs && c.relation == rel) return true;
    return false;
}

std::size_t count_relation(const ExponentPolytope& poly, Relation rel) {
    std::size_t n = 0;
    for (const auto& c : poly.constraints) n += c.relation == rel;
    return n;
}

// Feasible data from fractional partitions: each partition of the axes contributes its blocks as
// coordinate projections with a common exponent, and the exponents of the partitions sum to 1.
// A random unimodular change of variables hides the coordinate structure.
HblDatum random_feasible(std::mt19937_64& rng) {
    const std::size_t m = 2 + rng() % 3, parts = 1 + rng() % 3;
    std::vector<long> w(parts);
    long total = 0;
    for (auto& x : w) total += (x = 1 + static_cast<long>(rng() % 4));
    std::vector<NamedMap> maps;
    std::vector<Rational> tau;
    for (std::size_t p = 0; p < parts; ++p) {
        std::vector<std::size_t> block_of(m);
        const std::size_t blocks = 1 + rng() % m;
        for (std::size_t j = 0; j < m; ++j) block_of[j] = j < blocks ? j : rng() % blocks;
        std::shuffle(block_of.begin(), block_of.end(), rng);
        for (std::size_t b = 0; b < blocks; ++b) {
            std::vector<std::size_t> axes;
            for (std::size_t j = 0; j < m; ++j)
                if (block_of[j] == b) axes.push_back(j);
            Matrix pi(axes.size(), m);
            for (std::size_t r = 0; r < axes.size(); ++r) pi(r, axes[r]) = 1;
            maps.push_back({"p" + std::to_string(maps.size() + 1), pi});
            tau.push_back(Rational(w[p], total));
        }
    }
    const HblDatum coordinate(m, std::move(maps), std::move(tau));
    std::vector<Matrix> s;
    for (const auto& nm : coordinate.maps()) s.push_back(Matrix::identity(nm.matrix.rows()));
    return transform_datum(coordinate, testing::random_unimodular(m, rng), s);
}

}  // namespace

TEST_CASE("polytope rows") {
    const auto r6 = testing::load_datum("r6");
    const auto lines = explicit_candidates(r6, testing::load_candidates("r6_lines", 6));
    const auto poly = polytope_from_candidates(r6, lines);
    CHECK(poly.n == 4);
    CHECK(has_row(poly, {1, 0, 0, 1}, 1, Relation::ge));
    CHECK(has_row(poly, {1, 1, 0, 0}, 1, Relation::ge));
    CHECK(has_row(poly, {0, 1, 0, 1}, 1, Relation::ge));
    CHECK(has_row(poly, {0, 0, 1, 1}, 1, Relation::ge));
    CHECK(has_row(poly, {3, 3, 2, 4}, 6, Relation::eq));
    CHECK(count_relation(poly, Relation::eq) == 1);

    const auto lw = loomis_whitney(2, {half, half, half});
    const auto lpoly = polytope_from_candidates(lw, generate_lattice(lw, {}, 512));
    CHECK(has_row(lpoly, {2, 2, 2}, 3, Relation::eq));
    CHECK(has_row(lpoly, {1, 1, 2}, 2, Relation::ge));  // span{e1,e2}
    CHECK(has_row(lpoly, {0, 1, 1}, 1, Relation::ge));  // span{e1}

    const auto bare = polytope_from_candidates(lw, explicit_candidates(lw, {}));
    CHECK(count_relation(bare, Relation::eq) == 1);
    for (const auto& c : bare.constraints)
        if (c.relation == Relation::ge) CHECK(c.coeffs.size() == 3);
}

TEST_CASE("extreme point examples") {
    const auto r6 = testing::load_datum("r6");
    const auto poly = polytope_from_candidates(r6, explicit_candidates(r6, testing::load_candidates("r6_lines", 6)));
    const auto ext = enumerate_extremes(poly, 100000);
    CHECK_FALSE(ext.cap_hit);
    REQUIRE(ext.vertices.size() == 1);
    CHECK(ext.vertices[0] == Vector{half, half, half, half});

    const auto lw = loomis_whitney(2, {half, half, half});
    const auto lext = enumerate_extremes(polytope_from_candidates(lw, generate_lattice(lw, {}, 512)), 100000);
    bool mid = false;
    for (const auto& v : lext.vertices) mid = mid || v == Vector{half, half, half};
    CHECK(mid);

    const HblDatum inj(1, {{"id", Matrix::identity(1)}}, {Rational(1)});
    const auto one = enumerate_extremes(polytope_from_candidates(inj, explicit_candidates(inj, {})), 100);
    REQUIRE(one.vertices.size() == 1);
    CHECK(one.vertices[0] == Vector{1});

    const auto capped = enumerate_extremes(poly, 1);
    CHECK(capped.cap_hit);
}

TEST_CASE("caratheodory examples") {
    // With only {0} and H the polytope is the slice sum = 3/2 of the unit cube.
    const auto lw = loomis_whitney(2, {half, half, half});
    const auto poly = polytope_from_candidates(lw, explicit_candidates(lw, {}));
    const auto ext = enumerate_extremes(poly, 100000).vertices;
    REQUIRE(ext.size() == 6);
    CHECK(ext[0] == Vector{0, half, 1});

    const auto single = caratheodory(poly, ext[0]);
    REQUIRE(single.terms.size() == 1);
    CHECK(single.terms[0].coefficient == Rational(1));

    Vector mid(3);
    for (std::size_t i = 0; i < 3; ++i) mid[i] = (ext[0][i] + ext[1][i]) * half;
    const auto two = caratheodory(poly, mid);
    CHECK(two.combine() == mid);
    CHECK(two.terms.size() <= 2);

    CHECK_THROWS_AS(caratheodory(poly, Vector{1, 1, 1}), PreconditionError);
}

TEST_CASE("property: caratheodory round trips random convex combinations") {
    std::mt19937_64 rng(501);
    const auto lw3 = loomis_whitney(3, std::vector<Rational>(4, Rational(1, 3)));
    const std::vector<HblDatum> data{loomis_whitney(2, {half, half, half}), lw3, testing::load_datum("r6")};
    for (const auto& d : data) {
        const auto poly = polytope_from_candidates(d, explicit_candidates(d, {}));
        const auto ext = enumerate_extremes(poly, 1000000).vertices;
        REQUIRE(!ext.empty());
        for (int k = 0; k < 50; ++k) {
            const std::size_t count = 1 + rng() % 3;
            std::vector<long> w(count);
            long total = 0;
            for (auto& x : w) total += (x = 1 + static_cast<long>(rng() % 5));
            Vector tau(d.size());
            for (std::size_t j = 0; j < count; ++j) {
                const auto& v = ext[rng() % ext.size()];
                for (std::size_t i = 0; i < tau.size(); ++i) tau[i] += Rational(w[j], total) * v[i];
            }
            const auto dec = caratheodory(poly, tau);
            CHECK(dec.combine() == tau);
            CHECK(dec.terms.size() <= d.size() + 1);
            Rational sum;
            for (const auto& t : dec.terms) {
                CHECK(t.coefficient > Rational(0));
                CHECK(poly.is_extreme(t.tau));
                sum += t.coefficient;
            }
            CHECK(sum == Rational(1));
        }
    }
}

TEST_CASE("one-dimensional base case") {
    const HblDatum one(1, {{"id", Matrix::identity(1)}}, {Rational(1)});
    const auto p = base_case_dim1(one);
    CHECK(p.graph.edge_count() == 1);
    CHECK(p.theta.values[0] == Vector{1});
    CHECK(verify_presentation(one, p).valid);

    const HblDatum two(1, {{"a", Matrix::identity(1)}, {"b", Matrix::identity(1)}}, {half, half});
    const auto q = base_case_dim1(two);
    CHECK(q.theta.values[0] == Vector{half, half});
    CHECK(summary_weight(two, q).values[0][0] == Rational(1));

    const HblDatum dead(1, {{"a", Matrix::identity(1)}, {"z", Matrix(1, 1)}}, {1, 1});
    const auto r = base_case_dim1(dead);
    CHECK(verify_presentation(dead, r).valid);
    CHECK(summary_weight(dead, r).values[0][0] == Rational(1));

    const HblDatum wrong(1, {{"a", Matrix::identity(1)}}, {half});
    CHECK_THROWS_AS(base_case_dim1(wrong), BuildError);
}

TEST_CASE("concatenation of restriction and quotient builds") {
    const auto lw = loomis_whitney(2, {half, half, half});
    const Subspace v = Subspace::coordinate(3, {0, 1});
    const auto low = restrict_datum(lw, v);
    const auto high = quotient_datum(lw, v);
    const auto plow = build_presentation(low.datum, generate_lattice(low.datum, {}, 512)).presentation;
    const auto phigh = base_case_dim1(high.datum);
    CHECK(plow.graph.edge_count() == 2);
    CHECK(phigh.graph.edge_count() == 1);
    const auto cat = concatenate(lw, v, plow, low.embedding, phigh, high.embedding);
    CHECK(verify_presentation(lw, cat).valid);
    CHECK(cat.graph.vertex_count() == 4);
    CHECK(cat.graph.find_vertex(v).has_value());

    // V = H leaves nothing to glue on top; V must be proper, so use the r6 split instead.
    const auto r6 = testing::load_datum("r6");
    const Subspace v4 = Subspace::coordinate(6, {0, 1, 2, 3});
    const auto l6 = restrict_datum(r6, v4);
    const auto h6 = quotient_datum(r6, v4);
    const auto pl = build_presentation(l6.datum, generate_lattice(l6.datum, {}, 512)).presentation;
    const auto ph = build_presentation(h6.datum, generate_lattice(h6.datum, {}, 512)).presentation;
    const auto c6 = concatenate(r6, v4, pl, l6.embedding, ph, h6.embedding);
    CHECK(verify_presentation(r6, c6).valid);
    CHECK(c6.graph.vertex_count() == 8);
    std::size_t below = 0;
    for (const auto& s : c6.graph.vertices()) below += v4.contains(s);
    CHECK(below == 5);
}

TEST_CASE("convex combinations of presentations") {
    const auto lw = testing::load_datum("lw_d2");
    const auto p = testing::load_presentation("lw_d2", lw);
    const auto same = convex_combine(lw, {{Rational(1), p}});
    CHECK(same.canonical().theta.values == p.canonical().theta.values);
    const auto halves = convex_combine(lw, {{half, p}, {half, p}});
    CHECK(halves.canonical().graph.vertices() == p.canonical().graph.vertices());
    CHECK(halves.canonical().theta.values == p.canonical().theta.values);

    // A second chain through span{e2} gives a diamond in the union.
    const Matrix swap = [] {
        Matrix t(3, 3);
        t(0, 1) = 1;
        t(1, 0) = 1;
        t(2, 2) = 1;
        return t;
    }();
    Presentation other = transport_presentation(p, swap);
    // Swapping x1 and x2 exchanges the roles of pi_1 and pi_2.
    for (auto& row : other.theta.values) std::swap(row[0], row[1]);
    REQUIRE(verify_presentation(lw, other).valid);
    const auto diamond = convex_combine(lw, {{half, p}, {half, other}});
    CHECK(verify_presentation(lw, diamond).valid);
    CHECK(diamond.graph.vertex_count() == 5);
}

TEST_CASE("vertex bound") {
    CHECK(vertex_bound(3, 3) == 22);
    CHECK(vertex_bound(4, 6) == 3907);
    CHECK(vertex_bound(1, 5) == 32);
}

TEST_CASE("build examples") {
    const auto lw = loomis_whitney(2, {half, half, half});
    const auto out = build_presentation(lw, generate_lattice(lw, {}, 512), {512, true});
    CHECK(verify_presentation(lw, out.presentation).valid);
    CHECK(out.presentation.graph.vertex_count() <= 22);
    CHECK_FALSE(out.trace.empty());

    const auto r6 = testing::load_datum("r6");
    const auto lat = generate_lattice(r6, testing::load_candidates("r6_seed", 6), 512);
    const auto p6 = build_presentation(r6, lat).presentation;
    CHECK(verify_presentation(r6, p6).valid);
    CHECK(p6.graph.vertex_count() <= 3907);

    const auto viol = loomis_whitney(2, {Rational(3, 4), Rational(3, 4), 0});
    try {
        build_presentation(viol, generate_lattice(viol, {}, 512));
        FAIL("expected a violation");
    } catch (const BuildError& e) {
        CHECK(e.kind() == BuildFailure::violation);
        REQUIRE(e.witness().has_value());
        CHECK(e.witness()->subspace == Subspace::coordinate(3, {0}));
        CHECK(e.witness()->slack == Rational(-1, 4));
    }

    const auto scaling = loomis_whitney(2, {1, 1, 1});
    try {
        build_presentation(scaling, generate_lattice(scaling, {}, 512));
        FAIL("expected a scaling failure");
    } catch (const BuildError& e) {
        CHECK(e.kind() == BuildFailure::scaling);
    }
}

TEST_CASE("a bare candidate family is reported as insufficient, not answered") {
    // Only {0} and H: the polytope is the equality row plus boxes, so (1/2,1/2,1/2) is not a
    // vertex, and its extreme points have no critical subspace to split on.
    const auto lw = loomis_whitney(2, {half, half, half});
    try {
        const auto out = build_presentation(lw, explicit_candidates(lw, {}));
        CHECK(verify_presentation(lw, out.presentation).valid);
    } catch (const BuildError& e) {
        CHECK(e.kind() != BuildFailure::verification);
        CHECK(e.kind() != BuildFailure::vertex_bound);
    }
}

TEST_CASE("rank-zero maps get weight on the first maximal chain") {
    const HblDatum d(2, {{"a", Matrix::identity(2)}, {"z", Matrix(1, 2)}}, {1, half});
    const auto out = build_presentation(d, generate_lattice(d, {}, 512)).presentation;
    CHECK(verify_presentation(d, out).valid);
    CHECK(total_mass(out.graph, out.theta) == Vector{1, half});
}

TEST_CASE("property: builds of random feasible data verify and respect the vertex bound") {
    std::mt19937_64 rng(502);
    int built = 0;
    for (int k = 0; k < 40; ++k) {
        const auto d = random_feasible(rng);
        REQUIRE(check_scaling(d).holds);
        try {
            const auto out = build_presentation(d, generate_lattice(d, {}, 512)).presentation;
            CHECK(verify_presentation(d, out).valid);
            CHECK(mpz_class(out.graph.vertex_count()) <= vertex_bound(d.size(), d.dim()));
            ++built;
        } catch (const BuildError& e) {
            // Only an honest "not enough candidates" is acceptable here.
            CHECK_MESSAGE(e.kind() == BuildFailure::candidates_insufficient, e.what());
        }
    }
    CHECK(built >= 30);
}
