#include "hbl/presentation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hbl/error.hpp"

namespace hbl {

Presentation Presentation::canonical() const {
    SortedGraph sg = sort_graph(graph);
    WeightFunction w{theta.width, {}};
    for (std::size_t k : sg.edge_order) w.values.push_back(theta.values.at(k));
    return {std::move(sg.graph), std::move(w)};
}

bool distinguishes(const HblDatum& datum, std::size_t i, const GraphDecomposition& g, std::size_t e) {
    const Edge& ed = g.edge(e);
    return image(datum.map(i), g.vertex(ed.from)) != image(datum.map(i), g.vertex(ed.to));
}

namespace {

void require_compatible(const HblDatum& datum, const Presentation& p) {
    if (p.graph.ambient() != datum.dim())
        throw DimensionError("presentation ambient " + std::to_string(p.graph.ambient()) +
                             " does not match datum dimension " + std::to_string(datum.dim()));
    if (p.theta.width != datum.size())
        throw DimensionError("presentation weight width " + std::to_string(p.theta.width) + " does not match " +
                             std::to_string(datum.size()) + " maps");
    if (p.theta.values.size() != p.graph.edge_count())
        throw DimensionError("presentation weight does not cover every edge");
}

}  // namespace

WeightFunction summary_weight(const HblDatum& datum, const Presentation& p) {
    require_compatible(datum, p);
    WeightFunction sigma = WeightFunction::zeros(p.graph.edge_count(), 1);
    for (std::size_t e = 0; e < p.graph.edge_count(); ++e)
        for (std::size_t i = 0; i < datum.size(); ++i)
            if (distinguishes(datum, i, p.graph, e)) sigma.values[e][0] += p.theta.values[e][i];
    return sigma;
}

std::string to_string(Condition c) {
    switch (c) {
        case Condition::dimension: return "dimension";
        case Condition::graph: return "graph";
        case Condition::theta_sign: return "theta-sign";
        case Condition::theta_balance: return "theta-balance";
        case Condition::theta_mass: return "theta-mass";
        case Condition::sigma_balance: return "sigma-balance";
        case Condition::sigma_mass: return "sigma-mass";
    }
    return "?";
}

bool VerificationReport::breaks(Condition c) const { return std::find(broken.begin(), broken.end(), c) != broken.end(); }

VerificationReport verify_presentation(const HblDatum& datum, const Presentation& p) {
    VerificationReport r;
    auto fail = [&](Condition c, std::string msg) {
        if (!r.breaks(c)) r.broken.push_back(c);
        r.messages.push_back(std::move(msg));
    };

    try {
        require_compatible(datum, p);
        for (const auto& v : p.theta.values)
            if (v.size() != p.theta.width) throw DimensionError("ragged weight entry");
    } catch (const DimensionError& e) {
        fail(Condition::dimension, e.what());
        r.graph_ok = false;
        return r;
    }

    const GraphDecomposition& g = p.graph;
    r.graph_violations = validate_graph(g);
    r.graph_ok = r.graph_violations.empty();
    for (const auto& v : r.graph_violations) fail(Condition::graph, v.message);
    // Balance and images are meaningless on a graph with broken endpoints.
    for (const auto& v : r.graph_violations)
        if (v.rule == GraphRule::edge_endpoint || v.rule == GraphRule::vertex_ambient) {
            std::sort(r.broken.begin(), r.broken.end());
            return r;
        }

    const Vector masses = total_mass(g, p.theta);
    const auto theta_imb = imbalances(g, p.theta);
    for (std::size_t i = 0; i < datum.size(); ++i) {
        MapCheck mc;
        for (std::size_t e = 0; e < g.edge_count(); ++e)
            if (p.theta.values[e][i].sign() < 0) {
                mc.nonnegative = false;
                fail(Condition::theta_sign, "theta_" + std::to_string(i + 1) + " is negative on " + g.edge_name(e));
            }
        for (const auto& im : theta_imb)
            if (im.component == i) mc.imbalances.push_back(im);
        mc.balanced = mc.imbalances.empty();
        for (const auto& im : mc.imbalances)
            fail(Condition::theta_balance, "theta_" + std::to_string(i + 1) + " unbalanced at " + g.label(im.vertex) +
                                               ": in " + im.incoming.str() + ", out " + im.outgoing.str());
        mc.mass = masses[i];
        mc.mass_ok = mc.mass == datum.exponent(i);
        if (!mc.mass_ok)
            fail(Condition::theta_mass, "theta_" + std::to_string(i + 1) + " has mass " + mc.mass.str() +
                                            ", exponent is " + datum.exponent(i).str());
        r.maps.push_back(std::move(mc));
    }

    const WeightFunction sigma = summary_weight(datum, p);
    for (const auto& v : sigma.values) r.sigma.push_back(v[0]);
    r.sigma_imbalances = imbalances(g, sigma);
    r.sigma_balanced = r.sigma_imbalances.empty();
    for (const auto& im : r.sigma_imbalances)
        fail(Condition::sigma_balance, "sigma unbalanced at " + g.label(im.vertex) + ": in " + im.incoming.str() +
                                           ", out " + im.outgoing.str());
    r.sigma_mass = total_mass(g, sigma)[0];
    r.sigma_mass_ok = r.sigma_mass == Rational(1);
    if (!r.sigma_mass_ok) fail(Condition::sigma_mass, "sigma has mass " + r.sigma_mass.str() + ", expected 1");

    std::sort(r.broken.begin(), r.broken.end());
    r.valid = r.broken.empty();
    return r;
}

Rational edge_norm_squared(const HblDatum& datum, const Presentation& p, std::size_t i, std::size_t e) {
    require_compatible(datum, p);
    if (i >= datum.size()) throw DimensionError("map index out of range");
    if (!distinguishes(datum, i, p.graph, e))
        throw PreconditionError("map " + datum.maps()[i].name + " does not distinguish edge " + p.graph.edge_name(e));
    const Subspace& lo = p.graph.vertex(p.graph.edge(e).from);
    const Subspace& hi = p.graph.vertex(p.graph.edge(e).to);
    const Subspace dir = intersect(hi, orthogonal_complement(lo));
    if (dir.dim() != 1) throw PreconditionError("edge " + p.graph.edge_name(e) + " is not a one-step extension");
    const Vector w = dir.basis().row_vector(0);
    const Matrix& pi = datum.map(i);
    const Matrix perp = Matrix::identity(pi.rows()) - projection_matrix(image(pi, lo));
    const Vector u = perp * (pi * w);
    return dot(u, u) / dot(w, w);
}

double BoundCertificate::log_value() const {
    double acc = 0.0;
    for (const auto& f : factors) acc += f.exponent.to_double() * std::log(f.base.to_double());
    return acc;
}

BoundCertificate bound_constant(const HblDatum& datum, const Presentation& p) {
    const VerificationReport report = verify_presentation(datum, p);
    if (!report.valid) throw PreconditionError("bound_constant: presentation is not valid for the datum");
    BoundCertificate c;
    for (std::size_t i = 0; i < datum.size(); ++i)
        for (std::size_t e = 0; e < p.graph.edge_count(); ++e) {
            const Rational& th = p.theta.values[e][i];
            if (th.sign() <= 0 || !distinguishes(datum, i, p.graph, e)) continue;
            Rational base = edge_norm_squared(datum, p, i, e);
            if (base != Rational(1)) c.exact_one = false;
            c.factors.push_back({i, e, std::move(base), -th / Rational(2)});
        }
    c.value = std::exp(c.log_value());
    return c;
}

std::string export_dot(const HblDatum& datum, const Presentation& p) {
    const GraphDecomposition& g = p.graph;
    const bool can_mark = g.ambient() == datum.dim() && p.theta.width == datum.size();
    std::ostringstream os;
    os << "digraph presentation {\n  rankdir=LR;\n  node [shape=box];\n";
    for (std::size_t v = 0; v < g.vertex_count(); ++v)
        os << "  n" << v << " [label=\"" << g.label(v) << "\\ndim " << g.vertex(v).dim() << "\"];\n";
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const Edge& ed = g.edge(e);
        os << "  n" << ed.from << " -> n" << ed.to << " [label=\"(";
        const bool endpoints_ok = ed.from < g.vertex_count() && ed.to < g.vertex_count();
        for (std::size_t i = 0; i < p.theta.width; ++i) {
            if (i) os << ",";
            if (e < p.theta.values.size() && i < p.theta.values[e].size()) os << p.theta.values[e][i];
            if (can_mark && endpoints_ok && distinguishes(datum, i, g, e)) os << "*";
        }
        os << ")\"];\n";
    }
    os << "}\n";
    return os.str();
}

Presentation transport_presentation(const Presentation& p, const Matrix& t) {
    std::vector<Subspace> vertices;
    for (const auto& v : p.graph.vertices()) vertices.push_back(image(t, v));
    return {GraphDecomposition(t.rows(), std::move(vertices), p.graph.edges(), p.graph.labels()), p.theta};
}

}  // namespace hbl
