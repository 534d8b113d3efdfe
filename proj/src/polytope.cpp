#include "hbl/polytope.hpp"

#include <algorithm>
#include <set>

#include "hbl/error.hpp"

namespace hbl {

Rational Constraint::evaluate(const Vector& tau) const { return dot(coeffs, tau); }

bool Constraint::satisfied(const Vector& tau) const {
    const Rational v = evaluate(tau);
    return relation == Relation::eq ? v == rhs : v >= rhs;
}

bool Constraint::tight(const Vector& tau) const { return evaluate(tau) == rhs; }

std::optional<std::size_t> ExponentPolytope::violated_row(const Vector& tau) const {
    if (tau.size() != n) throw DimensionError("exponent vector has the wrong length");
    for (std::size_t r = 0; r < constraints.size(); ++r)
        if (!constraints[r].satisfied(tau)) return r;
    return std::nullopt;
}

namespace {

Matrix tight_rows(const ExponentPolytope& poly, const Vector& tau) {
    std::vector<Vector> rows;
    for (const auto& c : poly.constraints)
        if (c.tight(tau)) rows.push_back(c.coeffs);
    return Matrix::from_rows(rows, poly.n);
}

}  // namespace

std::size_t ExponentPolytope::tight_rank(const Vector& tau) const { return rank(tight_rows(*this, tau)); }

ExponentPolytope polytope_from_candidates(const HblDatum& datum, const CandidateLattice& candidates) {
    const std::size_t n = datum.size();
    ExponentPolytope poly;
    poly.n = n;
    std::set<std::pair<Vector, std::pair<Rational, int>>> seen;
    auto add = [&](Constraint c) {
        auto key = std::make_pair(c.coeffs, std::make_pair(c.rhs, static_cast<int>(c.relation)));
        if (seen.insert(std::move(key)).second) poly.constraints.push_back(std::move(c));
    };

    bool has_full = false;
    for (const auto& v : candidates.subspaces) {
        if (v.is_zero()) continue;
        const auto dims = datum.image_dims(v);
        Vector coeffs;
        for (std::size_t d : dims) coeffs.emplace_back(static_cast<long>(d));
        const bool full = v.is_full();
        has_full = has_full || full;
        add({std::move(coeffs), Rational(static_cast<long>(v.dim())), full ? Relation::eq : Relation::ge,
             (full ? "H = " : "V = ") + v.str()});
    }
    if (!has_full) {
        const auto ranks = datum.ranks();
        Vector coeffs;
        for (std::size_t d : ranks) coeffs.emplace_back(static_cast<long>(d));
        add({std::move(coeffs), Rational(static_cast<long>(datum.dim())), Relation::eq, "H = full space"});
    }
    for (std::size_t i = 0; i < n; ++i) {
        Vector lo(n), hi(n);
        lo[i] = 1;
        hi[i] = -1;
        add({std::move(lo), Rational(0), Relation::ge, "tau_" + std::to_string(i + 1) + " >= 0"});
        add({std::move(hi), Rational(-1), Relation::ge, "tau_" + std::to_string(i + 1) + " <= 1"});
    }
    return poly;
}

ExtremeEnumeration enumerate_extremes(const ExponentPolytope& poly, std::size_t cap) {
    const std::size_t n = poly.n;
    ExtremeEnumeration out;
    std::vector<std::size_t> eq, ineq;
    for (std::size_t r = 0; r < poly.constraints.size(); ++r)
        (poly.constraints[r].relation == Relation::eq ? eq : ineq).push_back(r);

    std::vector<Vector> eq_rows;
    for (std::size_t r : eq) eq_rows.push_back(poly.constraints[r].coeffs);
    const std::size_t eq_rank = rank(Matrix::from_rows(eq_rows, n));
    const std::size_t k = n - eq_rank;

    std::set<Vector> found;
    auto try_subset = [&](const std::vector<std::size_t>& chosen) {
        std::vector<Vector> rows;
        Vector rhs;
        for (std::size_t r : eq) {
            rows.push_back(poly.constraints[r].coeffs);
            rhs.push_back(poly.constraints[r].rhs);
        }
        for (std::size_t r : chosen) {
            rows.push_back(poly.constraints[r].coeffs);
            rhs.push_back(poly.constraints[r].rhs);
        }
        const Matrix a = Matrix::from_rows(rows, n);
        if (rank(a) != n) return;
        auto x = solve(a, rhs);
        if (!x || !poly.contains(*x)) return;
        found.insert(std::move(*x));
    };

    if (k <= ineq.size()) {
        // Lexicographic k-subsets of the inequality rows.
        std::vector<std::size_t> idx(k);
        for (std::size_t i = 0; i < k; ++i) idx[i] = i;
        for (;;) {
            if (out.subsets_examined >= cap) {
                out.cap_hit = true;
                break;
            }
            ++out.subsets_examined;
            std::vector<std::size_t> chosen;
            for (std::size_t i : idx) chosen.push_back(ineq[i]);
            try_subset(chosen);
            std::size_t i = k;
            while (i > 0 && idx[i - 1] == ineq.size() - k + i - 1) --i;
            if (i == 0) break;
            ++idx[i - 1];
            for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
        }
    }
    out.vertices.assign(found.begin(), found.end());
    out.infeasible = out.vertices.empty() && !out.cap_hit;
    return out;
}

Vector ExtremeDecomposition::combine() const {
    if (terms.empty()) return {};
    Vector out(terms.front().tau.size());
    for (const auto& t : terms)
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += t.coefficient * t.tau[i];
    return out;
}

namespace {

// Largest t > 0 keeping x + t d inside every row that is not tight at x; nullopt if unbounded.
std::optional<Rational> max_step(const ExponentPolytope& poly, const Vector& x, const Vector& d) {
    std::optional<Rational> best;
    for (const auto& c : poly.constraints) {
        const Rational slope = dot(c.coeffs, d);
        if (c.relation == Relation::eq || slope.sign() >= 0) continue;
        const Rational t = (c.evaluate(x) - c.rhs) / (-slope);
        if (!best || t < *best) best = t;
    }
    return best;
}

Vector axpy(const Vector& x, const Rational& t, const Vector& d) {
    Vector out = x;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += t * d[i];
    return out;
}

// Moves inside the minimal face of x until reaching one of its vertices.
Vector purify(const ExponentPolytope& poly, Vector x) {
    for (;;) {
        const Matrix tight = tight_rows(poly, x);
        if (rank(tight) == poly.n) return x;
        const Matrix ns = null_space(tight);
        Vector d = ns.row_vector(0);
        auto t = max_step(poly, x, d);
        if (!t) {
            for (auto& v : d) v = -v;
            t = max_step(poly, x, d);
        }
        if (!t || t->sign() <= 0) throw Error("caratheodory: exponent polytope is unbounded or degenerate");
        x = axpy(x, *t, d);
    }
}

}  // namespace

ExtremeDecomposition caratheodory(const ExponentPolytope& poly, const Vector& tau) {
    if (auto bad = poly.violated_row(tau))
        throw PreconditionError("caratheodory: point violates row " + std::to_string(*bad) + " (" +
                                poly.constraints[*bad].provenance + ")");
    ExtremeDecomposition out;
    Vector cur = tau;
    Rational remaining(1);
    for (std::size_t guard = 0; guard <= poly.n + 1; ++guard) {
        if (poly.is_extreme(cur)) {
            out.terms.push_back({remaining, cur});
            break;
        }
        const Vector v = purify(poly, cur);
        Vector d(cur.size());
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = cur[i] - v[i];
        const auto mu = max_step(poly, cur, d);
        if (!mu || mu->sign() <= 0) throw Error("caratheodory: cannot extend through the point");
        // cur = (next + mu v) / (1 + mu)
        const Rational denom = Rational(1) + *mu;
        out.terms.push_back({remaining * *mu / denom, v});
        remaining = remaining / denom;
        cur = axpy(cur, *mu, d);
    }

    // Merge repeated extreme points.
    std::vector<ExtremeTerm> merged;
    for (auto& t : out.terms) {
        auto it = std::find_if(merged.begin(), merged.end(), [&](const ExtremeTerm& m) { return m.tau == t.tau; });
        if (it == merged.end())
            merged.push_back(std::move(t));
        else
            it->coefficient += t.coefficient;
    }
    out.terms = std::move(merged);
    if (out.combine() != tau) throw Error("caratheodory: reconstruction mismatch");
    return out;
}

}  // namespace hbl
