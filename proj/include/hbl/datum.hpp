#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hbl/matrix.hpp"
#include "hbl/subspace.hpp"

namespace hbl {

struct NamedMap {
    std::string name;
    Matrix matrix;  // rows = dim H_i, cols = ambient dimension
};

/// Hölder–Brascamp–Lieb data: maps pi_i : Q^m -> Q^{k_i} with exponents tau_i in [0,1].
class HblDatum {
public:
    /// Throws DimensionError / PreconditionError when the invariants fail.
    HblDatum(std::size_t dim, std::vector<NamedMap> maps, std::vector<Rational> exponents);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return maps_.size(); }
    const std::vector<NamedMap>& maps() const { return maps_; }
    const Matrix& map(std::size_t i) const { return maps_.at(i).matrix; }
    const std::vector<Rational>& exponents() const { return exponents_; }
    const Rational& exponent(std::size_t i) const { return exponents_.at(i); }

    /// Same maps, different exponents (validated).
    HblDatum with_exponents(std::vector<Rational> exponents) const;

    /// rank of each map.
    std::vector<std::size_t> ranks() const;
    /// dim pi_i(V) for each i.
    std::vector<std::size_t> image_dims(const Subspace& v) const;

    Subspace full_space() const { return Subspace::full(dim_); }

private:
    std::size_t dim_;
    std::vector<NamedMap> maps_;
    std::vector<Rational> exponents_;
};

struct ScalingCheck {
    bool holds;
    Rational lhs;  // dim H
    Rational rhs;  // sum tau_i rank(pi_i)
};

ScalingCheck check_scaling(const HblDatum& datum);

enum class SlackClass { violating, critical, scaling, slack_positive };

std::string to_string(SlackClass c);

struct SlackReport {
    Subspace subspace;
    Rational slack;  // sum tau_i dim pi_i(V) - dim V
    SlackClass classification;
};

/// Classification: V = H is always `scaling`; otherwise negative slack is `violating`,
/// zero slack with 0 < dim V < m is `critical`, anything else (including {0}) is `slack_positive`.
SlackReport subspace_slack(const HblDatum& datum, const Subspace& v);

struct CandidateLattice {
    std::vector<Subspace> subspaces;        // sorted, deduplicated
    bool closed = false;                    // true iff closed under sum and intersection
    std::vector<std::string> generation_log;  // parallel to `subspaces`

    bool contains(const Subspace& v) const;
};

/// Starts from {0}, H, every ker pi_i and every seed, then closes under pairwise sum and
/// intersection until a fixpoint or `max_size` elements.
CandidateLattice generate_lattice(const HblDatum& datum, const std::vector<Subspace>& seeds,
                                  std::size_t max_size);

/// Wraps an explicit family; {0} and H are added when missing, duplicates dropped.
CandidateLattice explicit_candidates(const HblDatum& datum, const std::vector<Subspace>& family);

/// A scaling failure (reported at V = H) or the first candidate with negative slack.
std::optional<SlackReport> find_violation(const HblDatum& datum, const CandidateLattice& candidates);
/// Every candidate with zero slack and 0 < dim < m, ordered by dimension then basis.
std::vector<SlackReport> find_critical(const HblDatum& datum, const CandidateLattice& candidates);

struct ChartedDatum {
    HblDatum datum;
    Matrix embedding;  // m x k; columns are the chart basis vectors inside the original H
};

/// Data on V through the chart given by V's RREF basis; requires dim V > 0.
ChartedDatum restrict_datum(const HblDatum& datum, const Subspace& v);
/// Data P_i pi_i on V-perp, P_i the orthogonal projector onto pi_i(V)-perp; requires V != H.
ChartedDatum quotient_datum(const HblDatum& datum, const Subspace& v);

/// Maps become S_i pi_i T^{-1}; throws PreconditionError on singular T or S_i.
HblDatum transform_datum(const HblDatum& datum, const Matrix& t, const std::vector<Matrix>& s);

/// Pushes a subspace of a chart's coordinate space into the ambient space: embedding * W.
Subspace chart_to_ambient(const Matrix& embedding, const Subspace& w);
/// Coordinates of X (which must lie in the column span of `embedding`) in that chart.
Subspace ambient_to_chart(const Matrix& embedding, const Subspace& x);

}  // namespace hbl
