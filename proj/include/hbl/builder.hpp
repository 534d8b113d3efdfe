#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "hbl/datum.hpp"
#include "hbl/error.hpp"
#include "hbl/polytope.hpp"
#include "hbl/presentation.hpp"

namespace hbl {

/// Why a construction stopped. Every variant is a definite answer, never a wrong certificate.
enum class BuildFailure {
    scaling,                 // dim H != sum tau_i rank pi_i
    violation,               // a candidate subspace breaks the dimension inequality
    candidates_insufficient, // extreme point with no critical subspace among the candidates
    verification,            // an assembled presentation failed verification
    vertex_bound,            // output exceeded the vertex-count bound
};

std::string to_string(BuildFailure f);

class BuildError : public Error {
public:
    BuildError(BuildFailure kind, const std::string& what, std::optional<SlackReport> witness = std::nullopt)
        : Error(what), kind_(kind), witness_(std::move(witness)) {}

    BuildFailure kind() const { return kind_; }
    const std::optional<SlackReport>& witness() const { return witness_; }

private:
    BuildFailure kind_;
    std::optional<SlackReport> witness_;
};

/// One edge {0} -> H with theta = tau. Requires dim H = 1 and the scaling identity.
Presentation base_case_dim1(const HblDatum& datum);

/// Glues a presentation of the data restricted to V with one of the quotient data on V-perp.
/// Charts are the ones produced by restrict_datum / quotient_datum. The result is verified.
Presentation concatenate(const HblDatum& datum, const Subspace& v, const Presentation& low, const Matrix& low_chart,
                         const Presentation& high, const Matrix& high_chart);

/// Union graph with theta = sum c_k theta_k; verified against the datum's maps with exponents
/// sum c_k tau_k, where tau_k is the mass vector of term k.
Presentation convex_combine(const HblDatum& datum, const std::vector<std::pair<Rational, Presentation>>& terms);

/// (N+1)^m - 1) / N + 1.
mpz_class vertex_bound(std::size_t maps, std::size_t dim);

struct BuildOptions {
    std::size_t max_lattice = 512;  // cap for lattices regenerated inside the recursion
    bool trace = false;
};

struct BuildResult {
    Presentation presentation;
    std::vector<std::string> trace;  // filled when options.trace is set
};

/// Recursive construction: base case in dimension one, Carathéodory splitting at non-extreme
/// exponents, and critical-subspace splitting (restriction + quotient) at extreme ones.
/// Throws BuildError when a precondition fails or the candidates are insufficient.
BuildResult build_presentation(const HblDatum& datum, const CandidateLattice& candidates,
                               const BuildOptions& options = {});

/// Resets the weight of every rank-0 map to tau_i on the first maximal chain.
Presentation assign_rank_zero_maps(const HblDatum& datum, const Presentation& p);

}  // namespace hbl
