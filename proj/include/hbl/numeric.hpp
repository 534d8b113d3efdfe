#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "hbl/datum.hpp"
#include "hbl/flowgraph.hpp"

namespace hbl {

/// Each map as a double matrix onto an orthonormal basis of its image (the map itself when it
/// is already surjective). Rank-0 maps become 0 x m.
std::vector<Eigen::MatrixXd> surjective_maps(const HblDatum& datum);

/// One symmetric positive-definite matrix per map, sized rank(pi_i), in the coordinates of
/// surjective_maps().
struct GaussianInput {
    std::vector<Eigen::MatrixXd> a;

    static GaussianInput identity(const HblDatum& datum);
    /// A = B B^T + I/10 with standard normal B.
    static GaussianInput random(const HblDatum& datum, std::mt19937_64& rng);
};

/// LHS/RHS of the inequality at f_i(y) = exp(-pi y.A_i y):
/// sqrt(prod det(A_i)^tau_i / det(sum tau_i pi_i^T A_i pi_i)), +inf when the sum is singular.
/// Throws PreconditionError on a non-symmetric or non-positive-definite A_i.
double gaussian_ratio(const HblDatum& datum, const GaussianInput& g);

/// log gaussian_ratio at A_i = exp(S_i) with its gradient in each symmetric S_i.
struct LogRatio {
    double value;
    std::vector<Eigen::MatrixXd> gradient;
};
LogRatio log_ratio_exp(const HblDatum& datum, const std::vector<Eigen::MatrixXd>& s);

struct AscentOptions {
    std::size_t iterations = 2000;
    double divergence = 1e6;
    std::uint64_t seed = 0;
};

struct AscentResult {
    double sup_estimate;
    bool diverged;
    std::size_t iterations;
};

/// Gradient ascent on log gaussian_ratio over A_i = exp(S_i) with backtracking. A heuristic
/// probe: divergence suggests an infinite constant, it proves nothing.
AscentResult gaussian_ascent(const HblDatum& datum, const AscentOptions& options = {});

/// Cell-centred samples of a function on an axis-aligned box, last axis fastest.
struct GridFunction {
    std::vector<std::size_t> resolution;
    std::vector<double> lo;
    std::vector<double> hi;
    std::vector<double> values;

    static GridFunction constant(std::vector<std::size_t> resolution, std::vector<double> lo, std::vector<double> hi,
                                 double value);
    /// Throws ParseError on a malformed header, a wrong value count or a negative value.
    static GridFunction read(std::istream& in);
    void write(std::ostream& out) const;

    std::size_t dims() const { return resolution.size(); }
    std::size_t size() const;
    double width(std::size_t axis) const { return (hi[axis] - lo[axis]) / static_cast<double>(resolution[axis]); }
    double cell_volume() const;
    double mass() const;
    std::size_t flat(const std::vector<std::size_t>& index) const;
    std::vector<std::size_t> unflat(std::size_t k) const;
    /// Value of the cell containing the point, 0 outside the box.
    double sample(const std::vector<double>& point) const;
};

struct GridFactorization {
    std::vector<GridFunction> edge_functions;  // parallel to the graph's edges
    double tau = 0;                            // total mass of the weight
    double norm = 0;                           // integral of f
    double max_relative_error = 0;             // factorization identity on cells with f > 0
    double max_line_sum = 0;
    bool translation_invariant = true;
    std::size_t supported_cells = 0;
};

/// f_V integrates f over the axes of V; f_e = f_{V1} / f_{V2} (0 where f_{V2} = 0).
/// Requires coordinate-subspace vertices and a balanced scalar weight.
GridFactorization grid_factorize(const GridFunction& f, const GraphDecomposition& g, const WeightFunction& phi);

struct QuadratureResult {
    double lhs;
    double rhs;
    double ratio;  // 0 when rhs is 0
};

/// Box and resolution for the integration grid on H.
struct GridSpec {
    std::vector<std::size_t> resolution;
    std::vector<double> lo;
    std::vector<double> hi;
};

/// Derives the H grid from maps whose rows are multiples of coordinate vectors.
/// Throws PreconditionError ("unbounded support") when an axis is not covered.
GridSpec derive_grid(const HblDatum& datum, const std::vector<GridFunction>& fs);

/// Tensor quadrature of prod f_i(pi_i x)^tau_i against C prod (mass f_i)^tau_i; dim H <= 3.
QuadratureResult quadrature_check(const HblDatum& datum, double c, const std::vector<GridFunction>& fs,
                                  const std::optional<GridSpec>& grid = std::nullopt);

}  // namespace hbl
