#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "circfss/geometry.hpp"
#include "circfss/rng.hpp"

namespace circfss {

/// Non-empty list of circle points X_1, ..., X_n.
struct CircleSample {
    std::vector<Angle> points;

    CircleSample() = default;
    explicit CircleSample(std::vector<Angle> p) : points(std::move(p)) {}

    std::size_t size() const { return points.size(); }
};

/// Sample Frechet function F_n(x) = (1/n) sum_j d(x, X_j)^2, in [0, pi^2].
double frechet_value(const CircleSample& sample, const Angle& x);

/// The n stationary-point candidates wrap(mean + 2*pi*k/n), k = 0..n-1,
/// where mean is the Euclidean mean of the representatives in [-pi, pi),
/// augmented with the n data antipodes and the data points themselves
/// (minimizers can sit on atoms). Every local minimizer of F_n is in this
/// set. When the sample fits in an open half circle, the lifted Euclidean
/// mean is prepended so the minimizer is exact, not just within rounding of
/// a candidate.
std::vector<Angle> circle_mean_candidates(const CircleSample& sample);

struct MeanResult {
    Angle mean;
    std::vector<Angle> tied_minimizers;  // contains mean; same F_n value within tie tolerance
    double frechet_variance = 0.0;       // F_n(mean)
    double fourth_moment = 0.0;          // (1/n) sum d(mean, X_j)^4
    std::uint64_t selection_seed_used = 0;
};

/// Exact Frechet sample mean on the circle. Evaluates F_n on all
/// candidates, collects the global-minimum set within relative tie
/// tolerance 1e-9 and selects one uniformly at random via rng.
MeanResult frechet_mean_circle(const CircleSample& sample, Rng& rng);

struct TorusMeanResult {
    TorusPoint mean;
    /// Tied minimizers per coordinate; the full tied set is their
    /// Cartesian product.
    std::vector<std::vector<Angle>> tied_coordinates;
    double frechet_variance = 0.0;  // sum of coordinatewise Frechet variances
    double fourth_moment = 0.0;     // (1/n) sum d_T(mean, X_j)^4
    std::uint64_t selection_seed_used = 0;

    std::size_t tied_count() const;
    /// Materializes the Cartesian product (use only when the count is small).
    std::vector<TorusPoint> tied_minimizers() const;
};

/// Coordinatewise circle means under the product metric.
TorusMeanResult frechet_mean_torus(const std::vector<TorusPoint>& sample, Rng& rng);

struct GridOracleResult {
    std::vector<Angle> argmin;
    double min_value = 0.0;
};

/// Brute-force oracle: evaluates F_n naively on the uniform grid
/// {-pi + 2*pi*i/grid_size} and returns all grid points within tie
/// tolerance of the minimum. Independent of the candidate enumeration.
GridOracleResult grid_oracle_mean(const CircleSample& sample, std::size_t grid_size);

}  // namespace circfss
