#include "hbl/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "hbl/error.hpp"

namespace hbl {

namespace {

Eigen::MatrixXd to_eigen(const Matrix& m) {
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = m(r, c).to_double();
    return out;
}

std::vector<double> exponents_of(const HblDatum& datum) {
    std::vector<double> tau;
    for (const auto& t : datum.exponents()) tau.push_back(t.to_double());
    return tau;
}

}  // namespace

std::vector<Eigen::MatrixXd> surjective_maps(const HblDatum& datum) {
    std::vector<Eigen::MatrixXd> out;
    const auto ranks = datum.ranks();
    for (std::size_t i = 0; i < datum.size(); ++i) {
        const Eigen::MatrixXd p = to_eigen(datum.map(i));
        if (ranks[i] == 0) {
            out.emplace_back(0, static_cast<Eigen::Index>(datum.dim()));
        } else if (ranks[i] == datum.map(i).rows()) {
            out.push_back(p);
        } else {
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(p);
            const Eigen::MatrixXd q = qr.householderQ();
            out.push_back(q.leftCols(static_cast<Eigen::Index>(ranks[i])).transpose() * p);
        }
    }
    return out;
}

GaussianInput GaussianInput::identity(const HblDatum& datum) {
    GaussianInput g;
    for (std::size_t r : datum.ranks()) g.a.push_back(Eigen::MatrixXd::Identity(r, r));
    return g;
}

GaussianInput GaussianInput::random(const HblDatum& datum, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    GaussianInput g;
    for (std::size_t r : datum.ranks()) {
        Eigen::MatrixXd b(r, r);
        for (Eigen::Index i = 0; i < b.rows(); ++i)
            for (Eigen::Index j = 0; j < b.cols(); ++j) b(i, j) = normal(rng);
        g.a.push_back(b * b.transpose() + 0.1 * Eigen::MatrixXd::Identity(r, r));
    }
    return g;
}

namespace {

// The Gaussian sum matrix is singular for every input exactly when the maps with positive
// exponent share a nonzero kernel vector.
bool always_singular(const HblDatum& datum) {
    Subspace common = datum.full_space();
    for (std::size_t i = 0; i < datum.size(); ++i)
        if (datum.exponent(i).sign() > 0) common = intersect(common, kernel(datum.map(i)));
    return !common.is_zero();
}

// Upper-triangular R with R^T R = B^T B for the stacked rows B. Working with B rather than
// the product keeps small directions of badly graded sums. Rows go in by decreasing norm.
std::optional<Eigen::MatrixXd> root_factor(std::vector<Eigen::RowVectorXd> rows, Eigen::Index m) {
    if (static_cast<Eigen::Index>(rows.size()) < m) return std::nullopt;
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Eigen::RowVectorXd& x, const Eigen::RowVectorXd& y) { return x.norm() > y.norm(); });
    Eigen::MatrixXd b(static_cast<Eigen::Index>(rows.size()), m);
    for (std::size_t k = 0; k < rows.size(); ++k) b.row(static_cast<Eigen::Index>(k)) = rows[k];
    if (!b.allFinite()) return std::nullopt;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(b);
    Eigen::MatrixXd r = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
    const Eigen::VectorXd d = r.diagonal().cwiseAbs();
    if ((d.array() <= 0).any() || !d.allFinite()) return std::nullopt;
    return r;
}

double log_det_root(const Eigen::MatrixXd& r) { return 2.0 * r.diagonal().cwiseAbs().array().log().sum(); }

}  // namespace

double gaussian_ratio(const HblDatum& datum, const GaussianInput& g) {
    const auto maps = surjective_maps(datum);
    if (g.a.size() != maps.size()) throw DimensionError("gaussian_ratio: one matrix per map is required");
    const auto tau = exponents_of(datum);
    const auto m = static_cast<Eigen::Index>(datum.dim());
    std::vector<Eigen::RowVectorXd> rows;
    double log_num = 0;
    for (std::size_t i = 0; i < maps.size(); ++i) {
        const Eigen::MatrixXd& a = g.a[i];
        if (a.rows() != maps[i].rows() || a.cols() != maps[i].rows())
            throw DimensionError("gaussian_ratio: matrix " + std::to_string(i + 1) + " has the wrong size");
        if (a.rows() == 0) continue;
        if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff()))
            throw PreconditionError("gaussian_ratio: matrix " + std::to_string(i + 1) + " is not symmetric");
        Eigen::LLT<Eigen::MatrixXd> llt(a);
        if (llt.info() != Eigen::Success)
            throw PreconditionError("gaussian_ratio: matrix " + std::to_string(i + 1) + " is not positive definite");
        const Eigen::MatrixXd l = llt.matrixL();
        log_num += tau[i] * 2.0 * l.diagonal().array().log().sum();
        if (tau[i] == 0) continue;
        const Eigen::MatrixXd f = std::sqrt(tau[i]) * l.transpose() * maps[i];
        for (Eigen::Index k = 0; k < f.rows(); ++k) rows.push_back(f.row(k));
    }
    if (always_singular(datum)) return std::numeric_limits<double>::infinity();
    const auto r = root_factor(std::move(rows), m);
    if (!r) return std::numeric_limits<double>::infinity();
    return std::exp(0.5 * (log_num - log_det_root(*r)));
}

LogRatio log_ratio_exp(const HblDatum& datum, const std::vector<Eigen::MatrixXd>& s) {
    const auto maps = surjective_maps(datum);
    if (s.size() != maps.size()) throw DimensionError("log_ratio_exp: one matrix per map is required");
    const auto tau = exponents_of(datum);
    const auto m = static_cast<Eigen::Index>(datum.dim());

    struct Eig {
        Eigen::MatrixXd q;
        Eigen::VectorXd lambda;
    };
    std::vector<Eig> eig;
    std::vector<Eigen::RowVectorXd> rows;
    double value = 0;
    for (std::size_t i = 0; i < maps.size(); ++i) {
        if (s[i].rows() != maps[i].rows() || s[i].cols() != maps[i].rows())
            throw DimensionError("log_ratio_exp: matrix " + std::to_string(i + 1) + " has the wrong size");
        if (maps[i].rows() == 0) {
            eig.push_back({});
            continue;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (s[i] + s[i].transpose()));
        Eig e{es.eigenvectors(), es.eigenvalues()};
        value += 0.5 * tau[i] * e.lambda.sum();
        if (tau[i] > 0) {
            const Eigen::MatrixXd qp = e.q.transpose() * maps[i];
            for (Eigen::Index k = 0; k < qp.rows(); ++k)
                rows.push_back(std::sqrt(tau[i] * std::exp(e.lambda(k))) * qp.row(k));
        }
        eig.push_back(std::move(e));
    }

    LogRatio out{0, {}};
    for (const auto& si : s) out.gradient.push_back(Eigen::MatrixXd::Zero(si.rows(), si.cols()));
    const auto r = always_singular(datum) ? std::nullopt : root_factor(std::move(rows), m);
    if (!r) {
        out.value = std::numeric_limits<double>::infinity();
        return out;
    }
    out.value = value - 0.5 * log_det_root(*r);

    for (std::size_t i = 0; i < maps.size(); ++i) {
        const auto k = maps[i].rows();
        if (k == 0) continue;
        const Eig& e = eig[i];
        // pi M^{-1} pi^T = Y^T Y with Y = R^{-T} pi^T.
        const Eigen::MatrixXd y = r->transpose().triangularView<Eigen::Lower>().solve(maps[i].transpose());
        const Eigen::MatrixXd gt = e.q.transpose() * (y.transpose() * y) * e.q;
        // Divided differences of exp on the spectrum (derivative of the matrix exponential).
        Eigen::MatrixXd dd(k, k);
        for (Eigen::Index a = 0; a < k; ++a)
            for (Eigen::Index b = 0; b < k; ++b) {
                const double la = e.lambda(a), lb = e.lambda(b);
                dd(a, b) = std::abs(la - lb) < 1e-10 ? std::exp(0.5 * (la + lb)) : (std::exp(la) - std::exp(lb)) / (la - lb);
            }
        out.gradient[i] = 0.5 * tau[i] * Eigen::MatrixXd::Identity(k, k) -
                          0.5 * tau[i] * e.q * gt.cwiseProduct(dd) * e.q.transpose();
    }
    return out;
}

namespace {

Eigen::MatrixXd sym_exp(const Eigen::MatrixXd& x) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (x + x.transpose()));
    return es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() * es.eigenvectors().transpose();
}

// Iterate of the ascent: A_i = C_i C_i^T with log det C_i tracked separately, since C_i itself
// becomes badly conditioned along divergent directions.
struct FactoredPoint {
    std::vector<Eigen::MatrixXd> c;
    std::vector<double> log_det_c;
};

// Value and Riemannian gradient X_i = (tau_i/2)(I - C_i^T pi_i M^{-1} pi_i^T C_i), the derivative
// along A_i -> C_i exp(t D_i) C_i^T being <X_i, D_i>.
LogRatio factored_log_ratio(const HblDatum& datum, const std::vector<Eigen::MatrixXd>& maps,
                            const std::vector<double>& tau, const FactoredPoint& p) {
    const auto m = static_cast<Eigen::Index>(datum.dim());
    std::vector<Eigen::RowVectorXd> rows;
    std::vector<Eigen::MatrixXd> scaled(maps.size());
    double value = 0;
    for (std::size_t i = 0; i < maps.size(); ++i) {
        if (maps[i].rows() == 0) continue;
        value += tau[i] * p.log_det_c[i];
        scaled[i] = p.c[i].transpose() * maps[i];
        if (tau[i] == 0) continue;
        for (Eigen::Index k = 0; k < scaled[i].rows(); ++k) rows.push_back(std::sqrt(tau[i]) * scaled[i].row(k));
    }
    LogRatio out{std::numeric_limits<double>::infinity(), {}};
    for (const auto& ci : p.c) out.gradient.push_back(Eigen::MatrixXd::Zero(ci.cols(), ci.cols()));
    const auto r = always_singular(datum) ? std::nullopt : root_factor(std::move(rows), m);
    if (!r) return out;
    out.value = value - 0.5 * log_det_root(*r);
    for (std::size_t i = 0; i < maps.size(); ++i) {
        const auto k = maps[i].rows();
        if (k == 0) continue;
        const Eigen::MatrixXd z = r->transpose().triangularView<Eigen::Lower>().solve(scaled[i].transpose());
        out.gradient[i] = 0.5 * tau[i] * (Eigen::MatrixXd::Identity(k, k) - z.transpose() * z);
    }
    return out;
}

FactoredPoint move(const FactoredPoint& p, const std::vector<Eigen::MatrixXd>& x, double t) {
    FactoredPoint q = p;
    for (std::size_t i = 0; i < p.c.size(); ++i) {
        if (p.c[i].size() == 0) continue;
        q.c[i] = p.c[i] * sym_exp(0.5 * t * x[i]);
        q.log_det_c[i] += 0.5 * t * x[i].trace();
    }
    return q;
}

}  // namespace

AscentResult gaussian_ascent(const HblDatum& datum, const AscentOptions& options) {
    const auto maps = surjective_maps(datum);
    const auto tau = exponents_of(datum);
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal(0.0, 0.3);
    FactoredPoint p;
    for (std::size_t r : datum.ranks()) {
        Eigen::MatrixXd b(r, r);
        for (Eigen::Index i = 0; i < b.rows(); ++i)
            for (Eigen::Index j = 0; j < b.cols(); ++j) b(i, j) = normal(rng);
        const Eigen::MatrixXd s = 0.5 * (b + b.transpose());
        p.c.push_back(sym_exp(0.5 * s));
        p.log_det_c.push_back(0.5 * s.trace());
    }

    // The objective is geodesically concave, so plain gradient steps along geodesics suffice;
    // the step doubles after every success to run quickly along unbounded directions.
    const double limit = std::log(options.divergence);
    LogRatio cur = factored_log_ratio(datum, maps, tau, p);
    double t = 1.0;
    std::size_t it = 0;
    for (; it < options.iterations && cur.value <= limit; ++it) {
        double gn2 = 0;
        for (const auto& g : cur.gradient) gn2 += g.squaredNorm();
        if (gn2 < 1e-30) break;
        bool accepted = false;
        while (t > 1e-12) {
            FactoredPoint q = move(p, cur.gradient, t);
            LogRatio next = factored_log_ratio(datum, maps, tau, q);
            if (std::isfinite(next.value) && next.value >= cur.value + 1e-4 * t * gn2) {
                p = std::move(q);
                cur = std::move(next);
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break;
        t = std::min(2 * t, 1e6);
    }
    const bool diverged = cur.value > limit;
    return {std::exp(std::min(cur.value, 700.0)), diverged, it};
}

GridFunction GridFunction::constant(std::vector<std::size_t> resolution, std::vector<double> lo,
                                    std::vector<double> hi, double value) {
    GridFunction f{std::move(resolution), std::move(lo), std::move(hi), {}};
    if (f.lo.size() != f.dims() || f.hi.size() != f.dims()) throw DimensionError("grid bounds do not match its dimension");
    f.values.assign(f.size(), value);
    return f;
}

std::size_t GridFunction::size() const {
    std::size_t n = 1;
    for (std::size_t r : resolution) n *= r;
    return n;
}

double GridFunction::cell_volume() const {
    double v = 1;
    for (std::size_t a = 0; a < dims(); ++a) v *= width(a);
    return v;
}

double GridFunction::mass() const {
    double acc = 0;
    for (double v : values) acc += v;
    return acc * cell_volume();
}

std::size_t GridFunction::flat(const std::vector<std::size_t>& index) const {
    std::size_t k = 0;
    for (std::size_t a = 0; a < dims(); ++a) k = k * resolution[a] + index[a];
    return k;
}

std::vector<std::size_t> GridFunction::unflat(std::size_t k) const {
    std::vector<std::size_t> index(dims());
    for (std::size_t a = dims(); a-- > 0;) {
        index[a] = k % resolution[a];
        k /= resolution[a];
    }
    return index;
}

double GridFunction::sample(const std::vector<double>& point) const {
    std::size_t k = 0;
    for (std::size_t a = 0; a < dims(); ++a) {
        const double t = std::floor((point[a] - lo[a]) / width(a));
        if (t < 0 || t >= static_cast<double>(resolution[a])) return 0.0;
        k = k * resolution[a] + static_cast<std::size_t>(t);
    }
    return values[k];
}

GridFunction GridFunction::read(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
        }
        return false;
    };
    if (!next_line()) throw ParseError("grid file is empty", 1);
    std::istringstream header(line);
    GridFunction f;
    long d = -1;
    if (!(header >> d) || d < 0 || d > 3) throw ParseError("grid header: dimension must be 0..3", line_no);
    f.resolution.resize(static_cast<std::size_t>(d));
    for (auto& r : f.resolution) {
        long v = 0;
        if (!(header >> v) || v <= 0) throw ParseError("grid header: resolution must be positive", line_no);
        r = static_cast<std::size_t>(v);
    }
    f.lo.resize(f.dims());
    f.hi.resize(f.dims());
    for (std::size_t a = 0; a < f.dims(); ++a)
        if (!(header >> f.lo[a] >> f.hi[a]) || !(f.lo[a] < f.hi[a]))
            throw ParseError("grid header: bounds for axis " + std::to_string(a + 1) + " must be lo < hi", line_no);
    std::string extra;
    if (header >> extra) throw ParseError("grid header: unexpected token '" + extra + "'", line_no);

    const std::size_t want = f.size();
    while (f.values.size() < want && next_line()) {
        std::istringstream row(line);
        std::string tok;
        while (row >> tok) {
            std::size_t used = 0;
            double v = 0;
            try {
                v = std::stod(tok, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != tok.size() || !std::isfinite(v)) throw ParseError("grid value '" + tok + "' is not a number", line_no);
            if (v < 0) throw ParseError("grid value " + tok + " is negative", line_no);
            f.values.push_back(v);
        }
    }
    if (f.values.size() != want)
        throw ParseError("grid has " + std::to_string(f.values.size()) + " values, expected " + std::to_string(want),
                         line_no);
    if (next_line()) throw ParseError("grid has trailing data", line_no);
    return f;
}

void GridFunction::write(std::ostream& out) const {
    out << dims();
    for (std::size_t r : resolution) out << ' ' << r;
    out << std::setprecision(17);
    for (std::size_t a = 0; a < dims(); ++a) out << ' ' << lo[a] << ' ' << hi[a];
    out << '\n';
    const std::size_t row = dims() == 0 ? 1 : resolution.back();
    for (std::size_t k = 0; k < values.size(); ++k) out << values[k] << ((k + 1) % row == 0 ? '\n' : ' ');
}

namespace {

// Integrates over one axis and broadcasts the result back along it.
std::vector<double> marginalize(const GridFunction& shape, const std::vector<double>& v, std::size_t axis) {
    std::size_t stride = 1;
    for (std::size_t a = axis + 1; a < shape.dims(); ++a) stride *= shape.resolution[a];
    const std::size_t n = shape.resolution[axis];
    const double w = shape.width(axis);
    std::vector<double> out(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
        if ((k / stride) % n != 0) continue;
        double acc = 0;
        for (std::size_t j = 0; j < n; ++j) acc += v[k + j * stride];
        acc *= w;
        for (std::size_t j = 0; j < n; ++j) out[k + j * stride] = acc;
    }
    return out;
}

unsigned coordinate_mask(const Subspace& v) {
    unsigned mask = 0;
    const Matrix& b = v.basis();
    for (std::size_t r = 0; r < b.rows(); ++r) {
        std::size_t ones = 0, axis = 0;
        bool unit = true;
        for (std::size_t c = 0; c < b.cols(); ++c) {
            if (b(r, c).is_zero()) continue;
            if (b(r, c) != Rational(1)) unit = false;
            ++ones;
            axis = c;
        }
        if (!unit || ones != 1) throw PreconditionError("grid_factorize: vertex " + v.str() + " is not a coordinate subspace");
        mask |= 1u << axis;
    }
    return mask;
}

}  // namespace

GridFactorization grid_factorize(const GridFunction& f, const GraphDecomposition& g, const WeightFunction& phi) {
    if (f.dims() != g.ambient()) throw DimensionError("grid_factorize: grid and graph dimensions differ");
    if (phi.width != 1 || phi.values.size() != g.edge_count())
        throw DimensionError("grid_factorize: expected one scalar weight per edge");
    if (!is_balanced(g, phi)) throw PreconditionError("grid_factorize: weight is not balanced");

    std::vector<unsigned> masks;
    for (const auto& v : g.vertices()) masks.push_back(coordinate_mask(v));

    std::map<unsigned, std::vector<double>> marginals;
    auto f_of = [&](unsigned mask) -> const std::vector<double>& {
        auto it = marginals.find(mask);
        if (it != marginals.end()) return it->second;
        std::vector<double> v = f.values;
        for (std::size_t a = 0; a < f.dims(); ++a)
            if (mask & (1u << a)) v = marginalize(f, v, a);
        return marginals.emplace(mask, std::move(v)).first->second;
    };

    GridFactorization out;
    out.tau = total_mass(g, phi)[0].to_double();
    out.norm = f.mass();
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const unsigned m1 = masks[g.edge(e).from], m2 = masks[g.edge(e).to];
        const unsigned added = m2 & ~m1;
        if ((m1 & ~m2) != 0 || added == 0 || (added & (added - 1)) != 0)
            throw PreconditionError("grid_factorize: edge " + g.edge_name(e) + " is not a one-axis extension");
        std::size_t axis = 0;
        while (!(added & (1u << axis))) ++axis;

        const auto& f1 = f_of(m1);
        const auto& f2 = f_of(m2);
        GridFunction fe{f.resolution, f.lo, f.hi, std::vector<double>(f.size())};
        for (std::size_t k = 0; k < f.size(); ++k) fe.values[k] = f2[k] > 0 ? f1[k] / f2[k] : 0.0;

        for (std::size_t k = 0; k < f.size(); ++k) {
            auto idx = fe.unflat(k);
            for (std::size_t a = 0; a < f.dims(); ++a)
                if (m1 & (1u << a)) idx[a] = 0;
            if (fe.values[fe.flat(idx)] != fe.values[k]) out.translation_invariant = false;

            idx = fe.unflat(k);
            if (idx[axis] != 0) continue;
            double line = 0;
            for (std::size_t j = 0; j < f.resolution[axis]; ++j) {
                idx[axis] = j;
                line += fe.values[fe.flat(idx)];
            }
            out.max_line_sum = std::max(out.max_line_sum, line * f.width(axis));
        }
        out.edge_functions.push_back(std::move(fe));
    }

    for (std::size_t k = 0; k < f.size(); ++k) {
        if (!(f.values[k] > 0)) continue;
        ++out.supported_cells;
        const double lhs = std::pow(f.values[k], out.tau);
        double rhs = std::pow(out.norm, out.tau);
        for (std::size_t e = 0; e < g.edge_count(); ++e) {
            const double w = phi.values[e][0].to_double();
            if (w != 0) rhs *= std::pow(out.edge_functions[e].values[k], w);
        }
        out.max_relative_error = std::max(out.max_relative_error, std::abs(lhs - rhs) / lhs);
    }
    return out;
}

GridSpec derive_grid(const HblDatum& datum, const std::vector<GridFunction>& fs) {
    const std::size_t m = datum.dim();
    GridSpec spec{std::vector<std::size_t>(m, 0), std::vector<double>(m), std::vector<double>(m)};
    for (std::size_t i = 0; i < datum.size(); ++i) {
        const Matrix& p = datum.map(i);
        for (std::size_t r = 0; r < p.rows(); ++r) {
            std::size_t nonzero = 0, axis = 0;
            for (std::size_t c = 0; c < m; ++c)
                if (!p(r, c).is_zero()) {
                    ++nonzero;
                    axis = c;
                }
            if (nonzero != 1 || spec.resolution[axis] != 0) continue;
            const double scale = p(r, axis).to_double();
            double a = fs[i].lo[r] / scale, b = fs[i].hi[r] / scale;
            if (a > b) std::swap(a, b);
            spec.resolution[axis] = fs[i].resolution[r];
            spec.lo[axis] = a;
            spec.hi[axis] = b;
        }
    }
    for (std::size_t a = 0; a < m; ++a)
        if (spec.resolution[a] == 0)
            throw PreconditionError("unbounded support: axis " + std::to_string(a + 1) +
                                    " is not read by any coordinate row; supply an explicit grid");
    return spec;
}

QuadratureResult quadrature_check(const HblDatum& datum, double c, const std::vector<GridFunction>& fs,
                                  const std::optional<GridSpec>& grid) {
    if (datum.dim() > 3) throw DimensionError("quadrature_check: dimension too large (" + std::to_string(datum.dim()) + " > 3)");
    if (fs.size() != datum.size()) throw DimensionError("quadrature_check: one grid function per map is required");
    for (std::size_t i = 0; i < fs.size(); ++i)
        if (fs[i].dims() != datum.map(i).rows())
            throw DimensionError("quadrature_check: function " + std::to_string(i + 1) + " has the wrong dimension");

    const GridSpec spec = grid ? *grid : derive_grid(datum, fs);
    if (spec.resolution.size() != datum.dim()) throw DimensionError("quadrature_check: grid has the wrong dimension");
    const GridFunction h{spec.resolution, spec.lo, spec.hi, {}};
    const auto tau = exponents_of(datum);
    std::vector<Eigen::MatrixXd> maps;
    for (std::size_t i = 0; i < datum.size(); ++i) maps.push_back(to_eigen(datum.map(i)));

    double lhs = 0;
    Eigen::VectorXd x(static_cast<Eigen::Index>(datum.dim()));
    for (std::size_t k = 0; k < h.size(); ++k) {
        const auto idx = h.unflat(k);
        for (std::size_t a = 0; a < h.dims(); ++a)
            x(static_cast<Eigen::Index>(a)) = h.lo[a] + (static_cast<double>(idx[a]) + 0.5) * h.width(a);
        double prod = 1;
        for (std::size_t i = 0; i < maps.size() && prod != 0; ++i) {
            if (tau[i] == 0) continue;
            const Eigen::VectorXd y = maps[i] * x;
            prod *= std::pow(fs[i].sample(std::vector<double>(y.data(), y.data() + y.size())), tau[i]);
        }
        lhs += prod;
    }
    lhs *= h.cell_volume();

    double rhs = c;
    for (std::size_t i = 0; i < fs.size(); ++i) rhs *= std::pow(fs[i].mass(), tau[i]);
    return {lhs, rhs, rhs == 0 ? 0.0 : lhs / rhs};
}

}  // namespace hbl
