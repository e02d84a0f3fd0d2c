#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "circfss/distributions.hpp"
#include "circfss/inference.hpp"

namespace circfss {

struct VarianceCurvePoint {
    std::size_t n = 0;
    double scaled_variance = 0.0;  // n * mean of d(mean_n, 0)^2 over replications
    double scaled_over_sigma_sq = 0.0;
    double mc_stderr = 0.0;  // Monte Carlo standard error of scaled_variance
    double normalizer_sigma_sq = 0.0;
};

struct VarianceCurve {
    std::vector<VarianceCurvePoint> points;
    std::size_t replications = 0;
    DistributionSpec spec;
};

/// Scaled variance n * E[d(mean_n, 0)^2] estimated by Monte Carlo at each n,
/// also divided by the population variance sigma^2. Replication (i, rep)
/// uses a counter-derived child stream, so the result does not depend on the
/// worker count.
VarianceCurve variance_curve(const DistributionSpec& spec,
                             const std::vector<std::size_t>& n_grid,
                             std::size_t reps, Rng& rng, unsigned workers = 1);

enum class SizePowerMode { one_sample, two_sample };

struct SizePowerConfig {
    DistributionSpec spec_x;
    DistributionSpec spec_y;  // second sample (two-sample mode)
    SizePowerMode mode = SizePowerMode::two_sample;
    std::vector<TestMethod> methods{TestMethod::quantile};
    std::size_t n = 100;
    std::size_t m = 100;
    /// mu0 offsets (one-sample) or rotations of the second sample (two-sample).
    std::vector<double> grid{0.0};
    std::size_t replications = 2000;
    std::size_t B = 1000;  // bootstrap method only
    double alpha = 0.05;
    std::uint64_t seed = 1;
    unsigned workers = 1;
};

nlohmann::json size_power_config_to_json(const SizePowerConfig& config);
SizePowerConfig size_power_config_from_json(const nlohmann::json& j);

struct SizePowerRow {
    double grid_point = 0.0;
    TestMethod method = TestMethod::quantile;
    double reject_freq = 0.0;
    double mc_stderr = 0.0;
};

/// Rejection frequency of each requested test method at each grid point.
std::vector<SizePowerRow> size_power_curve(const SizePowerConfig& config);

struct FssScaleRow {
    std::string label;
    std::size_t n = 0;
    double median_scale = 0.0;
};

/// Median of the FSS scale S = n V*/V_n over reps replications per (spec, n).
std::vector<FssScaleRow> fss_scale_table(const std::vector<DistributionSpec>& specs,
                                         const std::vector<std::size_t>& n_list,
                                         std::size_t B, std::size_t reps, Rng& rng,
                                         unsigned workers = 1);

struct LogSmearySummary {
    std::size_t n = 0;
    std::size_t replications = 0;
    double positive_sign_frequency = 0.0;
    double median_rescaled_magnitude = 0.0;  // median of (log sqrt(n))^{1/r} |mean_n|
    double median_magnitude = 0.0;           // median of |mean_n|
};

/// Monte Carlo summary of the logarithmically smeary mean at large n.
LogSmearySummary log_smeary_smoke(double r, std::size_t n, std::size_t reps,
                                  Rng& rng, unsigned workers = 1);

void write_variance_curve_csv(const VarianceCurve& curve, std::ostream& os);
void write_size_power_csv(const std::vector<SizePowerRow>& rows, std::ostream& os);
void write_fss_scale_csv(const std::vector<FssScaleRow>& rows, std::ostream& os);

}  // namespace circfss
