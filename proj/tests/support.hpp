#pragma once

// Shared helpers for the test binaries: fixture loading, seeded generators and a few
// independent reference computations that do not go through the library's own algorithms.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "hbl/datum.hpp"
#include "hbl/flowgraph.hpp"
#include "hbl/io.hpp"
#include "hbl/matrix.hpp"
#include "hbl/presentation.hpp"
#include "hbl/subspace.hpp"

namespace testing {

using hbl::Matrix;
using hbl::Rational;
using hbl::Subspace;
using hbl::Vector;

inline std::string data_path(const std::string& name) { return std::string(HBL_DATA_DIR) + "/" + name; }

inline hbl::HblDatum load_datum(const std::string& stem) {
    return hbl::parse_datum(hbl::read_file(data_path(stem + ".datum.json")));
}

inline hbl::Presentation load_presentation(const std::string& stem, const hbl::HblDatum& d) {
    return hbl::parse_presentation(hbl::read_file(data_path(stem + ".presentation.json")), d.dim(), d.size());
}

inline std::vector<Subspace> load_candidates(const std::string& name, std::size_t ambient) {
    return hbl::parse_candidates(hbl::read_file(data_path(name + ".candidates.json")), ambient).subspaces;
}

inline const std::vector<std::string>& verified_fixtures() {
    static const std::vector<std::string> names{"lw_d2", "lw_d3", "lw_d4", "lw_d5", "r6"};
    return names;
}

// Loomis–Whitney data on Q^(d+1): map i drops coordinate i.
inline hbl::HblDatum loomis_whitney(std::size_t d, std::vector<Rational> tau) {
    const std::size_t m = d + 1;
    std::vector<hbl::NamedMap> maps;
    for (std::size_t i = 0; i < m; ++i) {
        Matrix pi(d, m);
        std::size_t r = 0;
        for (std::size_t j = 0; j < m; ++j)
            if (j != i) pi(r++, j) = 1;
        maps.push_back({"pi" + std::to_string(i + 1), pi});
    }
    return hbl::HblDatum(m, std::move(maps), std::move(tau));
}

inline Rational random_small(std::mt19937_64& rng, int lo = -3, int hi = 3) {
    std::uniform_int_distribution<int> dist(lo, hi);
    return Rational(dist(rng));
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng, int lo = -3, int hi = 3) {
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = random_small(rng, lo, hi);
    return m;
}

// Product of random row shears and signed swaps: integer entries, determinant +-1.
inline Matrix random_unimodular(std::size_t n, std::mt19937_64& rng) {
    Matrix t = Matrix::identity(n);
    if (n < 2) {
        if (rng() & 1) t(0, 0) = -1;
        return t;
    }
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::uniform_int_distribution<int> factor(-2, 2);
    for (std::size_t k = 0; k < 3 * n; ++k) {
        const std::size_t a = pick(rng), b = pick(rng);
        if (a == b) continue;
        const Rational f(factor(rng));
        for (std::size_t j = 0; j < n; ++j) t(a, j) += f * t(b, j);
    }
    return t;
}

inline Matrix random_signed_permutation(std::size_t n, std::mt19937_64& rng) {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix t(n, n);
    for (std::size_t i = 0; i < n; ++i) t(i, perm[i]) = (rng() & 1) ? 1 : -1;
    return t;
}

// Rank by fraction-free Bareiss elimination on integers after clearing denominators.
inline std::size_t oracle_rank(const Matrix& m) {
    const std::size_t rows = m.rows(), cols = m.cols();
    std::vector<std::vector<mpz_class>> a(rows, std::vector<mpz_class>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        mpz_class l = 1;
        for (std::size_t c = 0; c < cols; ++c) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m(r, c).denominator().get_mpz_t());
        for (std::size_t c = 0; c < cols; ++c) {
            mpq_class v = m(r, c).value() * l;
            a[r][c] = v.get_num();
        }
    }
    std::size_t rank = 0;
    mpz_class prev = 1;
    for (std::size_t c = 0; c < cols && rank < rows; ++c) {
        std::size_t p = rank;
        while (p < rows && a[p][c] == 0) ++p;
        if (p == rows) continue;
        std::swap(a[p], a[rank]);
        for (std::size_t r = rank + 1; r < rows; ++r) {
            for (std::size_t k = c + 1; k < cols; ++k)
                a[r][k] = (a[rank][c] * a[r][k] - a[r][c] * a[rank][k]) / prev;
            a[r][c] = 0;
        }
        prev = a[rank][c];
        ++rank;
    }
    return rank;
}

inline Matrix times_basis(const Matrix& map, const Subspace& v) {
    if (v.dim() == 0) return Matrix(0, map.rows());
    return (map * v.basis().transpose()).transpose();
}

// dim pi(V) computed as a plain matrix rank.
inline std::size_t oracle_image_dim(const Matrix& map, const Subspace& v) { return oracle_rank(times_basis(map, v)); }

inline Rational oracle_slack(const hbl::HblDatum& d, const Subspace& v) {
    Rational s = -Rational(static_cast<long>(oracle_rank(v.basis())));
    for (std::size_t i = 0; i < d.size(); ++i)
        s += d.exponent(i) * Rational(static_cast<long>(oracle_image_dim(d.map(i), v)));
    return s;
}

// Random subspace of Q^n spanned by k random small-integer vectors (dimension <= k).
inline Subspace random_subspace(std::size_t n, std::size_t k, std::mt19937_64& rng) {
    return Subspace::canonicalize(random_matrix(k, n, rng, -2, 2));
}

// A random graph decomposition assembled as the union of several complete flags, together
// with the flags themselves (as edge chains) so weights can be built from chain indicators.
struct FlagUnion {
    hbl::GraphDecomposition graph;
    std::vector<std::vector<std::size_t>> chains;
};

inline FlagUnion random_flag_union(std::size_t m, std::size_t flags, std::mt19937_64& rng) {
    // Rows come from a small pool so that different flags share vertices.
    std::vector<Vector> pool;
    for (std::size_t j = 0; j < m; ++j) {
        Vector e(m);
        e[j] = 1;
        pool.push_back(e);
    }
    for (std::size_t extra = 0; extra < m; ++extra) pool.push_back(random_matrix(1, m, rng, -1, 1).row_vector(0));

    std::vector<std::vector<Subspace>> flag_vertices;
    while (flag_vertices.size() < flags) {
        std::vector<Subspace> chain{Subspace::zero(m)};
        std::vector<Vector> rows;
        std::vector<std::size_t> order(pool.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t idx : order) {
            std::vector<Vector> trial = rows;
            trial.push_back(pool[idx]);
            const Subspace s = Subspace::span(m, trial);
            if (s.dim() == rows.size() + 1) {
                rows = std::move(trial);
                chain.push_back(s);
            }
            if (rows.size() == m) break;
        }
        if (rows.size() == m) flag_vertices.push_back(std::move(chain));
    }

    std::set<Subspace> vertex_set;
    for (const auto& f : flag_vertices) vertex_set.insert(f.begin(), f.end());
    std::vector<Subspace> vertices(vertex_set.begin(), vertex_set.end());
    std::map<Subspace, std::size_t> index;
    for (std::size_t i = 0; i < vertices.size(); ++i) index[vertices[i]] = i;

    std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_index;
    std::vector<hbl::Edge> edges;
    std::vector<std::vector<std::size_t>> chains;
    for (const auto& f : flag_vertices) {
        std::vector<std::size_t> chain;
        for (std::size_t k = 0; k + 1 < f.size(); ++k) {
            const auto key = std::make_pair(index[f[k]], index[f[k + 1]]);
            auto it = edge_index.find(key);
            if (it == edge_index.end()) {
                it = edge_index.emplace(key, edges.size()).first;
                edges.push_back({key.first, key.second});
            }
            chain.push_back(it->second);
        }
        chains.push_back(std::move(chain));
    }
    return {hbl::GraphDecomposition(m, std::move(vertices), std::move(edges)), std::move(chains)};
}

// Balanced weight of the given width: each component is a random nonnegative combination
// of the flag chains (some components may be zero).
inline hbl::WeightFunction random_chain_weight(const FlagUnion& fu, std::size_t width, std::mt19937_64& rng) {
    auto w = hbl::WeightFunction::zeros(fu.graph.edge_count(), width);
    std::uniform_int_distribution<int> num(0, 6), den(1, 5);
    for (std::size_t j = 0; j < width; ++j)
        for (const auto& chain : fu.chains) {
            const Rational c(num(rng), den(rng));
            for (std::size_t e : chain) w.values[e][j] += c;
        }
    return w;
}

// In/out sums computed straight from the edge list.
inline bool oracle_balanced(const hbl::GraphDecomposition& g, const hbl::WeightFunction& w) {
    const auto zero = g.zero_vertex(), full = g.full_vertex();
    for (std::size_t j = 0; j < w.width; ++j) {
        std::vector<Rational> net(g.vertex_count());
        for (std::size_t e = 0; e < g.edge_count(); ++e) {
            net[g.edge(e).to] += w.values[e][j];
            net[g.edge(e).from] -= w.values[e][j];
        }
        for (std::size_t v = 0; v < g.vertex_count(); ++v)
            if (v != zero && v != full && !net[v].is_zero()) return false;
    }
    return true;
}

inline Vector oracle_mass(const hbl::GraphDecomposition& g, const hbl::WeightFunction& w) {
    Vector mass(w.width);
    for (std::size_t e = 0; e < g.edge_count(); ++e)
        if (g.vertex(g.edge(e).from).is_zero())
            for (std::size_t j = 0; j < w.width; ++j) mass[j] += w.values[e][j];
    return mass;
}

inline bool close_rel(double a, double b, double tol) {
    return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace testing
