#include "hbl/flowgraph.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "hbl/datum.hpp"
#include "hbl/error.hpp"

namespace hbl {

GraphDecomposition::GraphDecomposition(std::size_t ambient, std::vector<Subspace> vertices, std::vector<Edge> edges,
                                       std::vector<std::string> labels)
    : ambient_(ambient), vertices_(std::move(vertices)), edges_(std::move(edges)), labels_(std::move(labels)) {
    if (labels_.empty())
        for (std::size_t v = 0; v < vertices_.size(); ++v) labels_.push_back("v" + std::to_string(v));
    if (labels_.size() != vertices_.size()) throw DimensionError("graph needs one label per vertex");
}

std::optional<std::size_t> GraphDecomposition::find_vertex(const Subspace& s) const {
    for (std::size_t v = 0; v < vertices_.size(); ++v)
        if (vertices_[v] == s) return v;
    return std::nullopt;
}

std::optional<std::size_t> GraphDecomposition::find_edge(std::size_t from, std::size_t to) const {
    for (std::size_t e = 0; e < edges_.size(); ++e)
        if (edges_[e].from == from && edges_[e].to == to) return e;
    return std::nullopt;
}

std::optional<std::size_t> GraphDecomposition::zero_vertex() const { return find_vertex(Subspace::zero(ambient_)); }
std::optional<std::size_t> GraphDecomposition::full_vertex() const { return find_vertex(Subspace::full(ambient_)); }

std::vector<std::vector<std::size_t>> GraphDecomposition::in_edges() const {
    std::vector<std::vector<std::size_t>> out(vertices_.size());
    for (std::size_t e = 0; e < edges_.size(); ++e)
        if (edges_[e].to < vertices_.size()) out[edges_[e].to].push_back(e);
    return out;
}

std::vector<std::vector<std::size_t>> GraphDecomposition::out_edges() const {
    std::vector<std::vector<std::size_t>> out(vertices_.size());
    for (std::size_t e = 0; e < edges_.size(); ++e)
        if (edges_[e].from < vertices_.size()) out[edges_[e].from].push_back(e);
    return out;
}

std::string GraphDecomposition::edge_name(std::size_t e) const {
    const Edge& ed = edges_.at(e);
    auto name = [&](std::size_t v) { return v < labels_.size() ? labels_[v] : "#" + std::to_string(v); };
    return name(ed.from) + "->" + name(ed.to);
}

SortedGraph sort_graph(const GraphDecomposition& g) {
    const std::size_t n = g.vertex_count();
    std::vector<std::size_t> vperm(n);
    std::iota(vperm.begin(), vperm.end(), 0);
    std::stable_sort(vperm.begin(), vperm.end(),
                     [&](std::size_t a, std::size_t b) { return g.vertex(a) < g.vertex(b); });
    std::vector<std::size_t> new_index(n);
    std::vector<Subspace> vertices;
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < n; ++k) {
        new_index[vperm[k]] = k;
        vertices.push_back(g.vertex(vperm[k]));
        labels.push_back(g.label(vperm[k]));
    }
    std::vector<Edge> remapped;
    for (const Edge& e : g.edges()) remapped.push_back({new_index.at(e.from), new_index.at(e.to)});
    std::vector<std::size_t> eperm(remapped.size());
    std::iota(eperm.begin(), eperm.end(), 0);
    std::stable_sort(eperm.begin(), eperm.end(),
                     [&](std::size_t a, std::size_t b) { return remapped[a] < remapped[b]; });
    std::vector<Edge> edges;
    for (std::size_t k : eperm) edges.push_back(remapped[k]);
    return {GraphDecomposition(g.ambient(), std::move(vertices), std::move(edges), std::move(labels)),
            std::move(eperm)};
}

std::vector<GraphViolation> validate_graph(const GraphDecomposition& g) {
    std::vector<GraphViolation> out;
    const std::size_t n = g.vertex_count();
    const auto zero = g.zero_vertex();
    const auto full = g.full_vertex();
    if (!zero) out.push_back({GraphRule::missing_zero, "zero subspace is not a vertex"});
    if (!full) out.push_back({GraphRule::missing_full, "full space is not a vertex"});

    for (std::size_t v = 0; v < n; ++v) {
        if (g.vertex(v).ambient() != g.ambient())
            out.push_back({GraphRule::vertex_ambient, g.label(v) + " lives in the wrong ambient space"});
        for (std::size_t u = 0; u < v; ++u)
            if (g.vertex(u) == g.vertex(v))
                out.push_back({GraphRule::duplicate_vertex, g.label(v) + " duplicates " + g.label(u)});
    }

    std::set<Edge> seen;
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const Edge& ed = g.edge(e);
        if (ed.from >= n || ed.to >= n) {
            out.push_back({GraphRule::edge_endpoint, "edge " + std::to_string(e) + " references a missing vertex"});
            continue;
        }
        const Subspace& a = g.vertex(ed.from);
        const Subspace& b = g.vertex(ed.to);
        if (a.ambient() != b.ambient() || b.dim() != a.dim() + 1 || !b.contains(a))
            out.push_back({GraphRule::edge_step, "edge " + g.edge_name(e) +
                                                     " is not a one-dimensional extension (constraint 1)"});
        if (!seen.insert(ed).second)
            out.push_back({GraphRule::parallel_edge, "edge " + g.edge_name(e) + " is repeated"});
    }

    const auto in = g.in_edges();
    const auto outg = g.out_edges();
    for (std::size_t v = 0; v < n; ++v) {
        const bool is_zero = g.vertex(v).is_zero() && g.vertex(v).ambient() == g.ambient();
        const bool is_full = g.vertex(v) == Subspace::full(g.ambient());
        if (!is_zero && in[v].empty())
            out.push_back({GraphRule::missing_incoming, g.label(v) + " lacks incoming edge (constraint 2)"});
        if (!is_full && outg[v].empty())
            out.push_back({GraphRule::missing_outgoing, g.label(v) + " lacks outgoing edge (constraint 3)"});
    }
    return out;
}

WeightFunction WeightFunction::zeros(std::size_t edges, std::size_t width) {
    return {width, std::vector<Vector>(edges, Vector(width))};
}

WeightFunction WeightFunction::scalar(const std::vector<Rational>& per_edge) {
    WeightFunction w{1, {}};
    for (const auto& x : per_edge) w.values.push_back({x});
    return w;
}

WeightFunction WeightFunction::component(std::size_t j) const {
    if (j >= width) throw DimensionError("weight component out of range");
    WeightFunction w{1, {}};
    for (const auto& v : values) w.values.push_back({v[j]});
    return w;
}

namespace {

void require_matching(const GraphDecomposition& g, const WeightFunction& phi) {
    if (phi.values.size() != g.edge_count())
        throw DimensionError("weight has " + std::to_string(phi.values.size()) + " entries for " +
                             std::to_string(g.edge_count()) + " edges");
    for (const auto& v : phi.values)
        if (v.size() != phi.width) throw DimensionError("weight entry width does not match declared width");
}

Vector sum_over(const WeightFunction& phi, const std::vector<std::size_t>& edges) {
    Vector s(phi.width);
    for (std::size_t e : edges)
        for (std::size_t j = 0; j < phi.width; ++j) s[j] += phi.values[e][j];
    return s;
}

}  // namespace

std::vector<Imbalance> imbalances(const GraphDecomposition& g, const WeightFunction& phi) {
    require_matching(g, phi);
    std::vector<Imbalance> out;
    const auto in = g.in_edges();
    const auto outg = g.out_edges();
    const Subspace full = Subspace::full(g.ambient());
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
        if (g.vertex(v).is_zero() || g.vertex(v) == full) continue;
        const Vector a = sum_over(phi, in[v]);
        const Vector b = sum_over(phi, outg[v]);
        for (std::size_t j = 0; j < phi.width; ++j)
            if (a[j] != b[j]) out.push_back({v, j, a[j], b[j]});
    }
    return out;
}

bool is_balanced(const GraphDecomposition& g, const WeightFunction& phi) { return imbalances(g, phi).empty(); }

Vector total_mass(const GraphDecomposition& g, const WeightFunction& phi) {
    require_matching(g, phi);
    const auto zero = g.zero_vertex();
    if (!zero) return Vector(phi.width);
    return sum_over(phi, g.out_edges()[*zero]);
}

Vector terminal_mass(const GraphDecomposition& g, const WeightFunction& phi) {
    require_matching(g, phi);
    const auto full = g.full_vertex();
    if (!full) return Vector(phi.width);
    return sum_over(phi, g.in_edges()[*full]);
}

WeightFunction ChainDecomposition::reconstruct(std::size_t edges, std::size_t width) const {
    WeightFunction w = WeightFunction::zeros(edges, width);
    for (const auto& t : terms)
        for (std::size_t e : t.chain) w.values.at(e).at(t.component) += t.coefficient;
    return w;
}

ChainDecomposition decompose_flow(const GraphDecomposition& g, const WeightFunction& phi) {
    require_matching(g, phi);
    for (std::size_t e = 0; e < phi.values.size(); ++e)
        for (std::size_t j = 0; j < phi.width; ++j)
            if (phi.values[e][j].sign() < 0)
                throw PreconditionError("decompose_flow: negative weight on edge " + g.edge_name(e));
    if (!is_balanced(g, phi)) throw PreconditionError("decompose_flow: weight is not balanced");
    const auto zero = g.zero_vertex();
    const auto full = g.full_vertex();
    if (!zero || !full) throw PreconditionError("decompose_flow: graph lacks {0} or H");

    const auto in = g.in_edges();
    const auto outg = g.out_edges();
    std::vector<Vector> work = phi.values;
    ChainDecomposition result;

    for (;;) {
        std::optional<std::size_t> best_e, best_j;
        for (std::size_t e = 0; e < work.size(); ++e)
            for (std::size_t j = 0; j < phi.width; ++j) {
                if (work[e][j].sign() <= 0) continue;
                if (!best_e || work[e][j] < work[*best_e][*best_j]) {
                    best_e = e;
                    best_j = j;
                }
            }
        if (!best_e) break;
        const std::size_t j = *best_j;
        const Rational delta = work[*best_e][j];

        auto pick = [&](const std::vector<std::size_t>& candidates) -> std::optional<std::size_t> {
            for (std::size_t c : candidates)
                if (work[c][j].sign() > 0) return c;
            return std::nullopt;
        };

        std::vector<std::size_t> back;
        std::size_t v = g.edge(*best_e).from;
        for (std::size_t steps = 0; v != *zero; ++steps) {
            const auto e = pick(in[v]);
            if (!e || steps > work.size()) throw Error("decompose_flow: chain cannot be extended back to {0}");
            back.push_back(*e);
            v = g.edge(*e).from;
        }
        std::vector<std::size_t> chain(back.rbegin(), back.rend());
        chain.push_back(*best_e);
        v = g.edge(*best_e).to;
        for (std::size_t steps = 0; v != *full; ++steps) {
            const auto e = pick(outg[v]);
            if (!e || steps > work.size()) throw Error("decompose_flow: chain cannot be extended forward to H");
            chain.push_back(*e);
            v = g.edge(*e).to;
        }

        for (std::size_t e : chain) work[e][j] -= delta;
        result.terms.push_back({j, delta, std::move(chain)});
    }
    return result;
}

std::vector<std::size_t> first_maximal_chain(const GraphDecomposition& g) {
    const auto zero = g.zero_vertex();
    const auto full = g.full_vertex();
    if (!zero || !full) throw PreconditionError("first_maximal_chain: graph lacks {0} or H");
    const auto outg = g.out_edges();
    std::vector<std::size_t> chain;
    std::size_t v = *zero;
    while (v != *full) {
        if (outg[v].empty() || chain.size() > g.edge_count())
            throw PreconditionError("first_maximal_chain: vertex " + g.label(v) + " has no outgoing edge");
        const std::size_t e = outg[v].front();
        chain.push_back(e);
        v = g.edge(e).to;
    }
    return chain;
}

WeightFunction chain_indicator(const GraphDecomposition& g, const std::vector<std::size_t>& chain, std::size_t width) {
    WeightFunction w = WeightFunction::zeros(g.edge_count(), width);
    for (std::size_t e : chain)
        for (std::size_t j = 0; j < width; ++j) w.values.at(e)[j] = 1;
    return w;
}

ProjectedGraph project_graph(const GraphDecomposition& g, const Matrix& map) {
    if (map.cols() != g.ambient())
        throw DimensionError("project_graph: map has " + std::to_string(map.cols()) + " columns, graph ambient is " +
                             std::to_string(g.ambient()));
    // A map that is not onto is read as a map onto its image, in the RREF chart of that image,
    // so the image of H is the top vertex of the projected graph.
    const Subspace range = image(map);
    const bool onto = range.is_full();
    const Matrix chart = range.basis().transpose();
    std::vector<Subspace> images;
    for (const auto& v : g.vertices())
        images.push_back(onto ? image(map, v)
                              : (range.is_zero() ? Subspace::zero(0) : ambient_to_chart(chart, image(map, v))));

    std::map<Subspace, std::size_t> first_source;
    for (std::size_t v = 0; v < images.size(); ++v) first_source.emplace(images[v], v);
    std::vector<Subspace> vertices;
    std::vector<std::string> labels;
    std::map<Subspace, std::size_t> index;
    for (const auto& [s, src] : first_source) {
        index.emplace(s, vertices.size());
        vertices.push_back(s);
        labels.push_back("pi(" + g.label(src) + ")");
    }

    std::set<Edge> edge_set;
    for (const Edge& e : g.edges())
        if (images[e.from] != images[e.to]) edge_set.insert({index.at(images[e.from]), index.at(images[e.to])});
    std::vector<Edge> edges(edge_set.begin(), edge_set.end());

    std::vector<std::optional<std::size_t>> edge_map;
    for (const Edge& e : g.edges()) {
        if (images[e.from] == images[e.to]) {
            edge_map.push_back(std::nullopt);
            continue;
        }
        const Edge pe{index.at(images[e.from]), index.at(images[e.to])};
        edge_map.push_back(static_cast<std::size_t>(std::lower_bound(edges.begin(), edges.end(), pe) - edges.begin()));
    }
    return {GraphDecomposition(range.dim(), std::move(vertices), std::move(edges), std::move(labels)),
            std::move(edge_map)};
}

WeightFunction project_weight(const ProjectedGraph& projected, const WeightFunction& phi) {
    if (phi.values.size() != projected.edge_map.size())
        throw DimensionError("project_weight: weight does not match the source graph");
    WeightFunction w = WeightFunction::zeros(projected.graph.edge_count(), phi.width);
    for (std::size_t e = 0; e < phi.values.size(); ++e) {
        if (!projected.edge_map[e]) continue;
        for (std::size_t j = 0; j < phi.width; ++j) w.values[*projected.edge_map[e]][j] += phi.values[e][j];
    }
    return w;
}

WeightFunction project_weight(const GraphDecomposition& g, const WeightFunction& phi, const Matrix& map) {
    if (phi.values.size() != g.edge_count()) throw DimensionError("project_weight: weight does not match graph");
    return project_weight(project_graph(g, map), phi);
}

}  // namespace hbl
