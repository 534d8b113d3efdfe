#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hbl/datum.hpp"

namespace hbl {

enum class Relation { ge, eq };

/// coeffs . tau (>= | =) rhs
struct Constraint {
    Vector coeffs;
    Rational rhs;
    Relation relation;
    std::string provenance;

    Rational evaluate(const Vector& tau) const;
    bool satisfied(const Vector& tau) const;
    bool tight(const Vector& tau) const;
};

/// Exponent tuples satisfying the dimension inequalities of a candidate family.
struct ExponentPolytope {
    std::size_t n = 0;
    std::vector<Constraint> constraints;

    /// First violated constraint, or nullopt for members.
    std::optional<std::size_t> violated_row(const Vector& tau) const;
    bool contains(const Vector& tau) const { return !violated_row(tau); }
    /// Rank of the coefficient rows tight at tau.
    std::size_t tight_rank(const Vector& tau) const;
    bool is_extreme(const Vector& tau) const { return tight_rank(tau) == n; }
};

/// One >= row per candidate V != {0} (sum tau_i dim pi_i(V) >= dim V), the = row for V = H,
/// and box rows 0 <= tau_i <= 1. Identical rows are merged.
ExponentPolytope polytope_from_candidates(const HblDatum& datum, const CandidateLattice& candidates);

struct ExtremeEnumeration {
    std::vector<Vector> vertices;  // sorted lexicographically
    std::size_t subsets_examined = 0;
    bool cap_hit = false;
    bool infeasible = false;  // no vertex found without hitting the cap
};

/// Solves every row subset that completes the equality rows to full rank; keeps feasible points.
ExtremeEnumeration enumerate_extremes(const ExponentPolytope& poly, std::size_t cap);

struct ExtremeTerm {
    Rational coefficient;
    Vector tau;
};

struct ExtremeDecomposition {
    std::vector<ExtremeTerm> terms;

    Vector combine() const;
};

/// Writes a member tau as a convex combination of at most n+1 extreme points.
/// Throws PreconditionError naming the violated row when tau is not a member.
ExtremeDecomposition caratheodory(const ExponentPolytope& poly, const Vector& tau);

}  // namespace hbl
