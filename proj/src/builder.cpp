#include "hbl/builder.hpp"

#include <map>

#include "hbl/error.hpp"

namespace hbl {

std::string to_string(BuildFailure f) {
    switch (f) {
        case BuildFailure::scaling: return "scaling";
        case BuildFailure::violation: return "violation";
        case BuildFailure::candidates_insufficient: return "candidate set insufficient";
        case BuildFailure::verification: return "verification";
        case BuildFailure::vertex_bound: return "vertex bound";
    }
    return "?";
}

namespace {

// Accumulates vertices and weighted edges, merging repeats.
class GraphAssembler {
public:
    GraphAssembler(std::size_t ambient, std::size_t width) : ambient_(ambient), width_(width) {}

    std::size_t vertex(const Subspace& s) {
        auto [it, inserted] = index_.emplace(s, vertices_.size());
        if (inserted) vertices_.push_back(s);
        return it->second;
    }

    void edge(const Subspace& from, const Subspace& to, const Vector& theta, const Rational& scale) {
        const Edge e{vertex(from), vertex(to)};
        auto [it, inserted] = edge_index_.emplace(e, edges_.size());
        if (inserted) {
            edges_.push_back(e);
            theta_.push_back(Vector(width_));
        }
        for (std::size_t i = 0; i < width_; ++i) theta_[it->second][i] += scale * theta.at(i);
    }

    Presentation finish() const {
        return Presentation{GraphDecomposition(ambient_, vertices_, edges_), WeightFunction{width_, theta_}}.canonical();
    }

private:
    std::size_t ambient_;
    std::size_t width_;
    std::map<Subspace, std::size_t> index_;
    std::vector<Subspace> vertices_;
    std::map<Edge, std::size_t> edge_index_;
    std::vector<Edge> edges_;
    std::vector<Vector> theta_;
};

void require_valid(const HblDatum& datum, const Presentation& p, const std::string& step) {
    const VerificationReport r = verify_presentation(datum, p);
    if (r.valid) return;
    std::string msg = step + ": assembled presentation is invalid";
    for (const auto& m : r.messages) msg += "; " + m;
    throw BuildError(BuildFailure::verification, msg);
}

Presentation relabel(Presentation p) {
    std::vector<std::string> labels;
    std::size_t k = 0;
    for (const auto& v : p.graph.vertices()) {
        if (v.is_zero())
            labels.push_back("0");
        else if (v.is_full())
            labels.push_back("H");
        else
            labels.push_back("V" + std::to_string(++k));
    }
    p.graph = GraphDecomposition(p.graph.ambient(), p.graph.vertices(), p.graph.edges(), std::move(labels));
    return p;
}

}  // namespace

Presentation base_case_dim1(const HblDatum& datum) {
    if (datum.dim() != 1) throw PreconditionError("base_case_dim1: ambient dimension is " + std::to_string(datum.dim()));
    const ScalingCheck sc = check_scaling(datum);
    if (!sc.holds)
        throw BuildError(BuildFailure::scaling,
                         "base_case_dim1: scaling fails, " + sc.lhs.str() + " != " + sc.rhs.str(),
                         subspace_slack(datum, datum.full_space()));
    GraphDecomposition g(1, {Subspace::zero(1), Subspace::full(1)}, {{0, 1}}, {"0", "H"});
    Presentation p{std::move(g), WeightFunction{datum.size(), {datum.exponents()}}};
    require_valid(datum, p, "base case");
    return p;
}

Presentation concatenate(const HblDatum& datum, const Subspace& v, const Presentation& low, const Matrix& low_chart,
                         const Presentation& high, const Matrix& high_chart) {
    if (low.graph.ambient() != low_chart.cols() || high.graph.ambient() != high_chart.cols())
        throw DimensionError("concatenate: presentation does not match its chart");
    if (low_chart.rows() != datum.dim() || high_chart.rows() != datum.dim())
        throw DimensionError("concatenate: chart does not embed into the datum's space");
    GraphAssembler a(datum.dim(), datum.size());
    const Rational one(1);

    std::vector<Subspace> low_v, high_v;
    for (const auto& w : low.graph.vertices()) low_v.push_back(chart_to_ambient(low_chart, w));
    for (const auto& w : high.graph.vertices()) high_v.push_back(sum(v, chart_to_ambient(high_chart, w)));
    for (const auto& s : low_v) a.vertex(s);
    for (const auto& s : high_v) a.vertex(s);
    for (std::size_t e = 0; e < low.graph.edge_count(); ++e)
        a.edge(low_v[low.graph.edge(e).from], low_v[low.graph.edge(e).to], low.theta.values[e], one);
    for (std::size_t e = 0; e < high.graph.edge_count(); ++e)
        a.edge(high_v[high.graph.edge(e).from], high_v[high.graph.edge(e).to], high.theta.values[e], one);

    Presentation p = a.finish();
    require_valid(datum, p, "concatenate at " + v.str());
    return p;
}

Presentation convex_combine(const HblDatum& datum, const std::vector<std::pair<Rational, Presentation>>& terms) {
    if (terms.empty()) throw PreconditionError("convex_combine: no terms");
    Rational total(0);
    for (const auto& [c, p] : terms) {
        if (c.sign() < 0) throw PreconditionError("convex_combine: negative coefficient " + c.str());
        if (p.graph.ambient() != datum.dim() || p.theta.width != datum.size())
            throw DimensionError("convex_combine: term does not match the datum");
        total += c;
    }
    if (total != Rational(1)) throw PreconditionError("convex_combine: coefficients sum to " + total.str());

    GraphAssembler a(datum.dim(), datum.size());
    Vector exponents(datum.size());
    for (const auto& [c, p] : terms) {
        for (const auto& s : p.graph.vertices()) a.vertex(s);
        for (std::size_t e = 0; e < p.graph.edge_count(); ++e)
            a.edge(p.graph.vertex(p.graph.edge(e).from), p.graph.vertex(p.graph.edge(e).to), p.theta.values[e], c);
        const Vector mass = total_mass(p.graph, p.theta);
        for (std::size_t i = 0; i < exponents.size(); ++i) exponents[i] += c * mass[i];
    }
    Presentation p = a.finish();
    const HblDatum target = datum.with_exponents(exponents);
    const VerificationReport r = verify_presentation(target, p);
    if (!r.valid) {
        std::string msg = "convex_combine: mass mismatch, combined presentation is invalid";
        for (const auto& m : r.messages) msg += "; " + m;
        throw BuildError(BuildFailure::verification, msg);
    }
    return p;
}

mpz_class vertex_bound(std::size_t maps, std::size_t dim) {
    if (maps == 0) throw PreconditionError("vertex_bound: need at least one map");
    mpz_class power;
    mpz_ui_pow_ui(power.get_mpz_t(), maps + 1, dim);
    return (power - 1) / static_cast<unsigned long>(maps) + 1;
}

Presentation assign_rank_zero_maps(const HblDatum& datum, const Presentation& p) {
    const auto ranks = datum.ranks();
    Presentation out = p;
    bool any = false;
    for (std::size_t r : ranks) any = any || r == 0;
    if (!any) return out;
    const auto chain = first_maximal_chain(p.graph);
    for (std::size_t i = 0; i < datum.size(); ++i) {
        if (ranks[i] != 0) continue;
        for (auto& v : out.theta.values) v[i] = 0;
        for (std::size_t e : chain) out.theta.values[e][i] = datum.exponent(i);
    }
    return out;
}

namespace {

class Builder {
public:
    explicit Builder(const BuildOptions& options) : options_(options) {}

    Presentation build(const HblDatum& datum, const CandidateLattice& candidates, std::size_t depth) {
        const std::string pad(2 * depth, ' ');
        log(pad + "datum dim " + std::to_string(datum.dim()) + ", " + std::to_string(candidates.subspaces.size()) +
            " candidates" + (candidates.closed ? "" : " (truncated)"));

        if (auto bad = find_violation(datum, candidates)) {
            const bool scaling = bad->classification == SlackClass::scaling;
            throw BuildError(scaling ? BuildFailure::scaling : BuildFailure::violation,
                             (scaling ? "scaling identity fails, slack " : "subspace " + bad->subspace.str() +
                                                                                " violates the inequality, slack ") +
                                 bad->slack.str(),
                             bad);
        }

        if (datum.dim() == 1) {
            log(pad + "base case");
            return base_case_dim1(datum);
        }

        const ExponentPolytope poly = polytope_from_candidates(datum, candidates);
        if (!poly.is_extreme(datum.exponents())) {
            const ExtremeDecomposition dec = caratheodory(poly, datum.exponents());
            log(pad + "not extreme: " + std::to_string(dec.terms.size()) + " extreme points");
            std::vector<std::pair<Rational, Presentation>> parts;
            for (const auto& t : dec.terms) {
                log(pad + "extreme point " + vec_str(t.tau) + " weight " + t.coefficient.str());
                parts.emplace_back(t.coefficient, build(datum.with_exponents(t.tau), candidates, depth + 1));
            }
            return convex_combine(datum, parts);
        }

        const Subspace v = pick_critical(datum, candidates);
        log(pad + "split at " + v.str());
        const ChartedDatum low = restrict_datum(datum, v);
        const ChartedDatum high = quotient_datum(datum, v);
        const Subspace vperp = orthogonal_complement(v);

        std::vector<Subspace> low_seeds, high_seeds;
        for (const auto& c : candidates.subspaces) {
            low_seeds.push_back(ambient_to_chart(low.embedding, intersect(c, v)));
            high_seeds.push_back(ambient_to_chart(high.embedding, intersect(sum(c, v), vperp)));
        }
        const CandidateLattice low_lattice = generate_lattice(low.datum, low_seeds, options_.max_lattice);
        const CandidateLattice high_lattice = generate_lattice(high.datum, high_seeds, options_.max_lattice);

        Presentation p_low, p_high;
        try {
            p_low = build(low.datum, low_lattice, depth + 1);
        } catch (BuildError& e) {
            throw lift(e, datum, [&](const Subspace& w) { return chart_to_ambient(low.embedding, w); });
        }
        try {
            p_high = build(high.datum, high_lattice, depth + 1);
        } catch (BuildError& e) {
            throw lift(e, datum, [&](const Subspace& w) { return sum(v, chart_to_ambient(high.embedding, w)); });
        }
        Presentation p = concatenate(datum, v, p_low, low.embedding, p_high, high.embedding);

        if (mpz_class(static_cast<unsigned long>(p.graph.vertex_count())) > vertex_bound(datum.size(), datum.dim()))
            throw BuildError(BuildFailure::vertex_bound, "presentation exceeds the vertex bound");
        return p;
    }

    std::vector<std::string> take_trace() { return std::move(trace_); }

private:
    Subspace pick_critical(const HblDatum& datum, const CandidateLattice& candidates) {
        const auto critical = find_critical(datum, candidates);
        if (!critical.empty()) return critical.front().subspace;

        const auto ranks = datum.ranks();
        for (std::size_t i = 0; i < datum.size(); ++i) {
            if (datum.exponent(i) != Rational(1) || ranks[i] == 0) continue;
            // Drop the last basis vector of pi_i(H) and pull back.
            const Subspace target = image(datum.map(i));
            std::vector<Vector> rows = target.basis().row_list();
            rows.pop_back();
            const Subspace v = preimage(datum.map(i), Subspace::span(target.ambient(), rows));
            SlackReport r = subspace_slack(datum, v);
            if (r.classification == SlackClass::violating)
                throw BuildError(BuildFailure::violation,
                                 "subspace " + v.str() + " violates the inequality, slack " + r.slack.str(), r);
            if (r.classification == SlackClass::critical) {
                log("  codimension-one preimage under " + datum.maps()[i].name);
                return v;
            }
        }
        throw BuildError(BuildFailure::candidates_insufficient,
                         "candidate set insufficient: extreme exponents " + vec_str(datum.exponents()) +
                             " but no critical subspace among " + std::to_string(candidates.subspaces.size()) +
                             " candidates");
    }

    template <typename ToAmbient>
    static BuildError lift(const BuildError& e, const HblDatum& datum, ToAmbient to_ambient) {
        if (!e.witness() || (e.kind() != BuildFailure::violation && e.kind() != BuildFailure::scaling)) return e;
        // A negative slack in restricted or quotient data is a negative slack upstairs.
        SlackReport up = subspace_slack(datum, to_ambient(e.witness()->subspace));
        if (up.slack.sign() >= 0) return e;
        return BuildError(BuildFailure::violation,
                          "subspace " + up.subspace.str() + " violates the inequality, slack " + up.slack.str(), up);
    }

    static std::string vec_str(const Vector& v) {
        std::string s = "(";
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i].str();
        return s + ")";
    }

    void log(std::string line) {
        if (options_.trace) trace_.push_back(std::move(line));
    }

    const BuildOptions& options_;
    std::vector<std::string> trace_;
};

}  // namespace

BuildResult build_presentation(const HblDatum& datum, const CandidateLattice& candidates, const BuildOptions& options) {
    if (!candidates.subspaces.empty() && candidates.subspaces.front().ambient() != datum.dim())
        throw DimensionError("build_presentation: candidates live in the wrong ambient space");
    CandidateLattice cands = candidates;
    if (!cands.contains(Subspace::zero(datum.dim())) || !cands.contains(datum.full_space())) {
        std::vector<Subspace> family = cands.subspaces;
        cands = explicit_candidates(datum, family);
    }

    Builder b(options);
    Presentation p = b.build(datum, cands, 0);
    p = relabel(assign_rank_zero_maps(datum, p));
    require_valid(datum, p, "final assembly");
    if (mpz_class(static_cast<unsigned long>(p.graph.vertex_count())) > vertex_bound(datum.size(), datum.dim()))
        throw BuildError(BuildFailure::vertex_bound, "presentation exceeds the vertex bound");
    return {std::move(p), b.take_trace()};
}

}  // namespace hbl
