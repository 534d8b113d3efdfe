#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hbl/matrix.hpp"
#include "hbl/subspace.hpp"

namespace hbl {

struct Edge {
    std::size_t from;
    std::size_t to;

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Directed graph whose vertices are subspaces of Q^ambient.
///
/// Construction does not enforce the graph-decomposition axioms; `validate_graph` reports
/// them. Vertex labels are carried for reports and file round trips.
class GraphDecomposition {
public:
    GraphDecomposition() = default;
    GraphDecomposition(std::size_t ambient, std::vector<Subspace> vertices, std::vector<Edge> edges,
                       std::vector<std::string> labels = {});

    std::size_t ambient() const { return ambient_; }
    const std::vector<Subspace>& vertices() const { return vertices_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const Subspace& vertex(std::size_t v) const { return vertices_.at(v); }
    const Edge& edge(std::size_t e) const { return edges_.at(e); }
    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    const std::string& label(std::size_t v) const { return labels_.at(v); }
    const std::vector<std::string>& labels() const { return labels_; }

    std::optional<std::size_t> find_vertex(const Subspace& s) const;
    std::optional<std::size_t> find_edge(std::size_t from, std::size_t to) const;
    std::optional<std::size_t> zero_vertex() const;
    std::optional<std::size_t> full_vertex() const;

    /// Incoming / outgoing edge indices per vertex, ascending.
    std::vector<std::vector<std::size_t>> in_edges() const;
    std::vector<std::vector<std::size_t>> out_edges() const;

    std::string edge_name(std::size_t e) const;

private:
    std::size_t ambient_ = 0;
    std::vector<Subspace> vertices_;
    std::vector<Edge> edges_;
    std::vector<std::string> labels_;
};

/// Vertices sorted by subspace order, edges by (from, to). `edge_order[k]` is the original
/// index of the k-th edge of the sorted graph.
struct SortedGraph {
    GraphDecomposition graph;
    std::vector<std::size_t> edge_order;
};
SortedGraph sort_graph(const GraphDecomposition& g);

enum class GraphRule {
    missing_zero,
    missing_full,
    vertex_ambient,
    duplicate_vertex,
    edge_endpoint,
    edge_step,  // constraint 1: from < to with dimension increase exactly 1
    parallel_edge,
    missing_incoming,  // constraint 2
    missing_outgoing,  // constraint 3
};

struct GraphViolation {
    GraphRule rule;
    std::string message;
};

std::vector<GraphViolation> validate_graph(const GraphDecomposition& g);

/// Per-edge vectors of nonnegative rationals; width 1 for scalar weights.
struct WeightFunction {
    std::size_t width = 1;
    std::vector<Vector> values;

    static WeightFunction zeros(std::size_t edges, std::size_t width);
    static WeightFunction scalar(const std::vector<Rational>& per_edge);
    /// Component j as a width-1 weight.
    WeightFunction component(std::size_t j) const;
};

struct Imbalance {
    std::size_t vertex;
    std::size_t component;
    Rational incoming;
    Rational outgoing;
};

/// Vertices (other than {0} and H) whose in- and out-sums differ, per component.
std::vector<Imbalance> imbalances(const GraphDecomposition& g, const WeightFunction& phi);
bool is_balanced(const GraphDecomposition& g, const WeightFunction& phi);
Vector total_mass(const GraphDecomposition& g, const WeightFunction& phi);
/// Componentwise sum over edges entering H.
Vector terminal_mass(const GraphDecomposition& g, const WeightFunction& phi);

struct ChainTerm {
    std::size_t component;
    Rational coefficient;
    std::vector<std::size_t> chain;  // edge indices from {0} to H
};

struct ChainDecomposition {
    std::vector<ChainTerm> terms;

    /// Rebuilds the weight from the terms.
    WeightFunction reconstruct(std::size_t edges, std::size_t width) const;
};

/// Peels chains off a balanced nonnegative weight, smallest positive entry first.
ChainDecomposition decompose_flow(const GraphDecomposition& g, const WeightFunction& phi);

/// The chain reached by always following the lowest-index outgoing edge from {0}.
std::vector<std::size_t> first_maximal_chain(const GraphDecomposition& g);
WeightFunction chain_indicator(const GraphDecomposition& g, const std::vector<std::size_t>& chain,
                               std::size_t width = 1);

struct ProjectedGraph {
    GraphDecomposition graph;
    std::vector<std::optional<std::size_t>> edge_map;  // per source edge
};

/// Vertices are the images pi(V). When the map is not onto they are written in the RREF chart
/// of its image, so pi(H) is always the full space of the projected graph.
ProjectedGraph project_graph(const GraphDecomposition& g, const Matrix& map);
WeightFunction project_weight(const ProjectedGraph& projected, const WeightFunction& phi);
WeightFunction project_weight(const GraphDecomposition& g, const WeightFunction& phi, const Matrix& map);

}  // namespace hbl
