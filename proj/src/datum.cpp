#include "hbl/datum.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "hbl/error.hpp"

namespace hbl {

HblDatum::HblDatum(std::size_t dim, std::vector<NamedMap> maps, std::vector<Rational> exponents)
    : dim_(dim), maps_(std::move(maps)), exponents_(std::move(exponents)) {
    if (maps_.empty()) throw PreconditionError("HBL datum needs at least one map");
    if (exponents_.size() != maps_.size())
        throw DimensionError(std::to_string(maps_.size()) + " maps but " + std::to_string(exponents_.size()) +
                             " exponents");
    for (std::size_t i = 0; i < maps_.size(); ++i) {
        if (maps_[i].matrix.cols() != dim_)
            throw DimensionError("map " + maps_[i].name + " has " + std::to_string(maps_[i].matrix.cols()) +
                                 " columns, ambient dimension is " + std::to_string(dim_));
        if (exponents_[i] < Rational(0) || exponents_[i] > Rational(1))
            throw PreconditionError("exponent " + exponents_[i].str() + " of map " + maps_[i].name +
                                    " is outside [0,1]");
    }
}

HblDatum HblDatum::with_exponents(std::vector<Rational> exponents) const {
    return HblDatum(dim_, maps_, std::move(exponents));
}

std::vector<std::size_t> HblDatum::ranks() const {
    std::vector<std::size_t> out;
    out.reserve(maps_.size());
    for (const auto& m : maps_) out.push_back(rank(m.matrix));
    return out;
}

std::vector<std::size_t> HblDatum::image_dims(const Subspace& v) const {
    if (v.ambient() != dim_) throw DimensionError("subspace ambient does not match datum dimension");
    std::vector<std::size_t> out;
    out.reserve(maps_.size());
    for (const auto& m : maps_) out.push_back(image(m.matrix, v).dim());
    return out;
}

ScalingCheck check_scaling(const HblDatum& datum) {
    Rational rhs(0);
    const auto ranks = datum.ranks();
    for (std::size_t i = 0; i < datum.size(); ++i) rhs += datum.exponent(i) * Rational(static_cast<long>(ranks[i]));
    Rational lhs(static_cast<long>(datum.dim()));
    return {lhs == rhs, lhs, rhs};
}

std::string to_string(SlackClass c) {
    switch (c) {
        case SlackClass::violating: return "violating";
        case SlackClass::critical: return "critical";
        case SlackClass::scaling: return "scaling";
        case SlackClass::slack_positive: return "slack-positive";
    }
    return "?";
}

SlackReport subspace_slack(const HblDatum& datum, const Subspace& v) {
    const auto dims = datum.image_dims(v);
    Rational slack = -Rational(static_cast<long>(v.dim()));
    for (std::size_t i = 0; i < datum.size(); ++i) slack += datum.exponent(i) * Rational(static_cast<long>(dims[i]));

    SlackClass cls = SlackClass::slack_positive;
    if (v.is_full())
        cls = SlackClass::scaling;
    else if (slack.sign() < 0)
        cls = SlackClass::violating;
    else if (slack.is_zero() && !v.is_zero())
        cls = SlackClass::critical;
    return {v, std::move(slack), cls};
}

bool CandidateLattice::contains(const Subspace& v) const {
    return std::binary_search(subspaces.begin(), subspaces.end(), v);
}

namespace {

class LatticeBuilder {
public:
    explicit LatticeBuilder(std::size_t max_size) : max_size_(max_size) {}

    // Returns false when the element is new but the cap is reached.
    bool add(const Subspace& s, std::string why) {
        if (index_.contains(s)) return true;
        if (order_.size() >= max_size_) return false;
        index_.emplace(s, order_.size());
        order_.push_back(s);
        log_.push_back(std::move(why));
        return true;
    }

    const std::vector<Subspace>& order() const { return order_; }

    CandidateLattice finish(bool closed) const {
        std::vector<std::size_t> perm(order_.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return order_[a] < order_[b]; });
        CandidateLattice out;
        out.closed = closed;
        for (std::size_t p : perm) {
            out.subspaces.push_back(order_[p]);
            out.generation_log.push_back(log_[p]);
        }
        return out;
    }

private:
    std::size_t max_size_;
    std::map<Subspace, std::size_t> index_;
    std::vector<Subspace> order_;
    std::vector<std::string> log_;
};

std::string tag(std::size_t k) { return "#" + std::to_string(k); }

}  // namespace

CandidateLattice generate_lattice(const HblDatum& datum, const std::vector<Subspace>& seeds, std::size_t max_size) {
    if (max_size < 2) throw PreconditionError("generate_lattice: max_size must be at least 2");
    const std::size_t m = datum.dim();
    LatticeBuilder b(max_size);
    b.add(Subspace::zero(m), "zero subspace");
    b.add(Subspace::full(m), "full space");

    bool closed = true;
    for (std::size_t i = 0; i < datum.size() && closed; ++i)
        closed = b.add(kernel(datum.map(i)), "ker " + datum.maps()[i].name);
    for (std::size_t k = 0; k < seeds.size() && closed; ++k) {
        if (seeds[k].ambient() != m) throw DimensionError("lattice seed lives in the wrong ambient space");
        closed = b.add(seeds[k], "seed " + std::to_string(k));
    }

    // Element i is combined with every earlier element once; new elements join the queue.
    for (std::size_t i = 0; closed && i < b.order().size(); ++i) {
        for (std::size_t j = 0; closed && j < i; ++j) {
            const Subspace x = b.order()[i];
            const Subspace y = b.order()[j];
            if (x.contains(y) || y.contains(x)) continue;
            closed = b.add(sum(x, y), tag(j) + " + " + tag(i));
            if (closed) closed = b.add(intersect(x, y), tag(j) + " & " + tag(i));
        }
    }
    return b.finish(closed);
}

CandidateLattice explicit_candidates(const HblDatum& datum, const std::vector<Subspace>& family) {
    const std::size_t m = datum.dim();
    LatticeBuilder b(static_cast<std::size_t>(-1));
    b.add(Subspace::zero(m), "zero subspace");
    b.add(Subspace::full(m), "full space");
    for (std::size_t k = 0; k < family.size(); ++k) {
        if (family[k].ambient() != m) throw DimensionError("candidate lives in the wrong ambient space");
        b.add(family[k], "candidate " + std::to_string(k));
    }
    // Closure is not attempted; report whether the family happens to be closed.
    bool closed = true;
    const auto& v = b.order();
    for (std::size_t i = 0; i < v.size() && closed; ++i)
        for (std::size_t j = 0; j < i && closed; ++j) {
            const Subspace s = sum(v[i], v[j]);
            const Subspace t = intersect(v[i], v[j]);
            closed = std::find(v.begin(), v.end(), s) != v.end() && std::find(v.begin(), v.end(), t) != v.end();
        }
    return b.finish(closed);
}

std::optional<SlackReport> find_violation(const HblDatum& datum, const CandidateLattice& candidates) {
    if (!check_scaling(datum).holds) return subspace_slack(datum, datum.full_space());
    for (const auto& v : candidates.subspaces) {
        SlackReport r = subspace_slack(datum, v);
        if (r.slack.sign() < 0) return r;
    }
    return std::nullopt;
}

std::vector<SlackReport> find_critical(const HblDatum& datum, const CandidateLattice& candidates) {
    std::vector<SlackReport> out;
    for (const auto& v : candidates.subspaces) {
        SlackReport r = subspace_slack(datum, v);
        if (r.classification == SlackClass::critical) out.push_back(std::move(r));
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const SlackReport& a, const SlackReport& b) { return a.subspace < b.subspace; });
    return out;
}

ChartedDatum restrict_datum(const HblDatum& datum, const Subspace& v) {
    if (v.ambient() != datum.dim()) throw DimensionError("restrict_datum: subspace ambient mismatch");
    if (v.is_zero()) throw PreconditionError("restrict_datum: cannot restrict to the zero subspace");
    Matrix embedding = v.basis().transpose();
    std::vector<NamedMap> maps;
    for (const auto& nm : datum.maps()) maps.push_back({nm.name, nm.matrix * embedding});
    return {HblDatum(v.dim(), std::move(maps), datum.exponents()), std::move(embedding)};
}

ChartedDatum quotient_datum(const HblDatum& datum, const Subspace& v) {
    if (v.ambient() != datum.dim()) throw DimensionError("quotient_datum: subspace ambient mismatch");
    if (v.is_full()) throw PreconditionError("quotient_datum: cannot take the quotient by the full space");
    const Subspace vperp = orthogonal_complement(v);
    Matrix embedding = vperp.basis().transpose();
    std::vector<NamedMap> maps;
    for (const auto& nm : datum.maps()) {
        const std::size_t k = nm.matrix.rows();
        const Matrix p = Matrix::identity(k) - projection_matrix(image(nm.matrix, v));
        maps.push_back({nm.name, p * nm.matrix * embedding});
    }
    return {HblDatum(vperp.dim(), std::move(maps), datum.exponents()), std::move(embedding)};
}

HblDatum transform_datum(const HblDatum& datum, const Matrix& t, const std::vector<Matrix>& s) {
    if (t.rows() != datum.dim() || t.cols() != datum.dim())
        throw DimensionError("transform_datum: T must be square of the ambient dimension");
    if (s.size() != datum.size()) throw DimensionError("transform_datum: need one S_i per map");
    const auto t_inv = inverse(t);
    if (!t_inv) throw PreconditionError("transform_datum: T is singular");
    std::vector<NamedMap> maps;
    for (std::size_t i = 0; i < datum.size(); ++i) {
        const Matrix& pi = datum.map(i);
        if (s[i].rows() != pi.rows() || s[i].cols() != pi.rows())
            throw DimensionError("transform_datum: S_" + std::to_string(i + 1) + " has the wrong shape");
        if (!inverse(s[i])) throw PreconditionError("transform_datum: S_" + std::to_string(i + 1) + " is singular");
        maps.push_back({datum.maps()[i].name, s[i] * pi * (*t_inv)});
    }
    return HblDatum(datum.dim(), std::move(maps), datum.exponents());
}

Subspace chart_to_ambient(const Matrix& embedding, const Subspace& w) { return image(embedding, w); }

Subspace ambient_to_chart(const Matrix& embedding, const Subspace& x) {
    if (x.ambient() != embedding.rows()) throw DimensionError("ambient_to_chart: ambient mismatch");
    std::vector<Vector> coords;
    for (std::size_t r = 0; r < x.dim(); ++r) {
        auto y = solve(embedding, x.basis().row(r));
        if (!y) throw PreconditionError("ambient_to_chart: subspace is not inside the chart");
        coords.push_back(std::move(*y));
    }
    return Subspace::span(embedding.cols(), coords);
}

}  // namespace hbl
