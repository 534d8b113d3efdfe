#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hbl/datum.hpp"
#include "hbl/flowgraph.hpp"

namespace hbl {

/// A graph decomposition with one weight component theta_i per map.
struct Presentation {
    GraphDecomposition graph;
    WeightFunction theta;

    /// Vertices and edges in canonical order, weights permuted along.
    Presentation canonical() const;
};

/// True when pi_i sends the endpoints of edge e to unequal subspaces.
bool distinguishes(const HblDatum& datum, std::size_t i, const GraphDecomposition& g, std::size_t e);

/// sigma(e) = sum of theta_i(e) over the maps distinguishing e.
WeightFunction summary_weight(const HblDatum& datum, const Presentation& p);

enum class Condition {
    dimension,     // datum and presentation disagree on ambient dimension or map count
    graph,         // graph-decomposition axioms
    theta_sign,    // some theta_i(e) < 0
    theta_balance,
    theta_mass,
    sigma_balance,
    sigma_mass,
};

std::string to_string(Condition c);

struct MapCheck {
    bool nonnegative = true;
    bool balanced = true;
    std::vector<Imbalance> imbalances;
    Rational mass;
    bool mass_ok = true;
};

struct VerificationReport {
    bool graph_ok = true;
    std::vector<GraphViolation> graph_violations;
    std::vector<MapCheck> maps;
    std::vector<Rational> sigma;  // per edge
    bool sigma_balanced = true;
    std::vector<Imbalance> sigma_imbalances;
    Rational sigma_mass;
    bool sigma_mass_ok = true;
    std::vector<Condition> broken;      // distinct, in enum order
    std::vector<std::string> messages;  // human-readable, one per failure
    bool valid = false;

    bool breaks(Condition c) const;
};

VerificationReport verify_presentation(const HblDatum& datum, const Presentation& p);

/// ||pi_i . e||^2 = |P pi_i(w)|^2 / |w|^2 with w spanning to ∩ from-perp and P the projector
/// onto pi_i(from)-perp. Throws PreconditionError when pi_i does not distinguish e.
Rational edge_norm_squared(const HblDatum& datum, const Presentation& p, std::size_t i, std::size_t e);

struct BoundFactor {
    std::size_t map;
    std::size_t edge;
    Rational base;      // ||pi_i . e||^2
    Rational exponent;  // -theta_i(e) / 2

    friend bool operator==(const BoundFactor&, const BoundFactor&) = default;
};

/// C = prod base^exponent, kept factored; `value` is the floating evaluation.
struct BoundCertificate {
    std::vector<BoundFactor> factors;  // sorted by (map, edge)
    double value = 1.0;
    bool exact_one = true;

    /// log C evaluated in floating point.
    double log_value() const;

    friend bool operator==(const BoundCertificate&, const BoundCertificate&) = default;
};

/// Throws PreconditionError when the presentation is not valid for the datum.
BoundCertificate bound_constant(const HblDatum& datum, const Presentation& p);

/// Graphviz rendering; edge labels list theta with '*' on distinguishing maps.
std::string export_dot(const HblDatum& datum, const Presentation& p);

/// Applies T to every vertex, keeping vertex and edge order.
Presentation transport_presentation(const Presentation& p, const Matrix& t);

}  // namespace hbl
