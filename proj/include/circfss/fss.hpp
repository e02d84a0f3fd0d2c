#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "circfss/geometry.hpp"
#include "circfss/mean.hpp"
#include "circfss/rng.hpp"

namespace circfss {

/// B Frechet means of independent n-out-of-n resamples; ties resolved via
/// the rng. Replicate b uses a child stream derived by counter, so the
/// output is independent of any parallel schedule.
std::vector<Angle> bootstrap_means(const CircleSample& sample, std::size_t B,
                                   Rng& rng);

struct BootstrapMoments {
    std::size_t B = 0;
    std::vector<Angle> bootstrap_means;
    Angle mean_of_means;   // Frechet mean of the bootstrap means
    double v_star = 0.0;   // (1/B) sum d(mean_of_means, mu*_b)^2
    double w_star = 0.0;   // (1/B) sum d(mean_of_means, mu*_b)^4
};

BootstrapMoments bootstrap_moments(std::vector<Angle> means, Rng& rng);

/// Scale of FSS for sample size n: S = n * v_star / v_n.
double fss_scale(double v_star, double v_n, std::size_t n);

struct FssReport {
    std::size_t n = 0;
    std::size_t B = 0;
    double scale = 0.0;       // S_FSS,n
    double threshold = 0.0;   // h_{n,alpha}
    bool reject_absence = false;
    double p_value = 1.0;     // floored at 1/B
};

/// Significance test for the presence of FSS: rejects absence iff
/// S - 1 > h with h = (n z_{1-alpha} / sqrt(B)) sqrt(W* - V*^2) / V_n.
FssReport fss_test(const CircleSample& sample, std::size_t B, double alpha,
                   Rng& rng);

nlohmann::json fss_report_to_json(const FssReport& report);

struct FssWindow {
    std::size_t n_minus = 0, n_plus = 0;
    double r_minus = 0.0, r_plus = 0.0;
    double c_minus = 0.0, c_plus = 0.0;
};

/// Heuristic descriptor of the FSS window of a scaled-variance curve:
/// locates the maximal ascending run above the curve's value at the
/// smallest n, fits log-log slopes s over it and converts to r = s/(1-s).
/// Returns nullopt when no ascending window of at least 4 points exists.
std::optional<FssWindow> classify_fss_window(
    const std::vector<std::pair<std::size_t, double>>& curve);

}  // namespace circfss
