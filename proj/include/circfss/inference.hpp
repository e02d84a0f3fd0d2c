#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "circfss/geometry.hpp"
#include "circfss/mean.hpp"
#include "circfss/rng.hpp"

namespace circfss {

/// Chi-square CDF with k degrees of freedom (regularized incomplete gamma).
double chi2_cdf(int k, double x);

/// p-quantile of chi-square with k degrees of freedom, by bisection on the
/// CDF, relative error <= 1e-8. Throws for p = 1.
double chi2_quantile(int k, double p);

enum class TestMethod { quantile, bootstrap };

struct TestOutcome {
    double statistic = 0.0;      // T^1 or T^2
    double critical_value = 0.0; // chi2 quantile or bootstrap order statistic
    double p_value = 1.0;
    bool reject = false;
    int dimension_k = 1;
    TestMethod method = TestMethod::quantile;
    std::optional<std::size_t> B_used;
};

nlohmann::json test_outcome_to_json(const TestOutcome& outcome);

struct InferenceOptions {
    /// When set, adds ridge * I to near-singular dispersion matrices
    /// instead of erroring (for degenerate fixtures only).
    std::optional<double> ridge;
};

using TorusSample = std::vector<TorusPoint>;

// Quantile based tests (asymptotic chi-square calibration). Residuals are
// signed geodesic coordinates at the relevant sample mean.
TestOutcome quantile_one_sample(const TorusSample& sample, const TorusPoint& mu0,
                                double alpha, const InferenceOptions& opts = {});
TestOutcome quantile_two_sample(const TorusSample& sample_x, const TorusSample& sample_y,
                                double alpha, const InferenceOptions& opts = {});
TestOutcome quantile_one_sample(const CircleSample& sample, const Angle& mu0,
                                double alpha, const InferenceOptions& opts = {});
TestOutcome quantile_two_sample(const CircleSample& sample_x, const CircleSample& sample_y,
                                double alpha, const InferenceOptions& opts = {});

// Bootstrap based tests: covariance from a first round of n-out-of-n
// resampling, critical value from the order statistics of a second round.
TestOutcome bootstrap_one_sample(const TorusSample& sample, const TorusPoint& mu0,
                                 double alpha, std::size_t B, Rng& rng,
                                 const InferenceOptions& opts = {});
TestOutcome bootstrap_two_sample(const TorusSample& sample_x, const TorusSample& sample_y,
                                 double alpha, std::size_t B, Rng& rng,
                                 const InferenceOptions& opts = {});
TestOutcome bootstrap_one_sample(const CircleSample& sample, const Angle& mu0,
                                 double alpha, std::size_t B, Rng& rng,
                                 const InferenceOptions& opts = {});
TestOutcome bootstrap_two_sample(const CircleSample& sample_x, const CircleSample& sample_y,
                                 double alpha, std::size_t B, Rng& rng,
                                 const InferenceOptions& opts = {});

struct BhResult {
    std::vector<bool> reject;
    std::vector<double> adjusted_p;
};

/// Benjamini-Hochberg step-up correction at level alpha.
BhResult bh_adjust(const std::vector<double>& p_values, double alpha);

}  // namespace circfss
