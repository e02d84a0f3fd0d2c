#include "circfss/fss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "circfss/numeric.hpp"

namespace circfss {

std::vector<Angle> bootstrap_means(const CircleSample& sample, std::size_t B,
                                   Rng& rng) {
    if (B < 2) throw std::invalid_argument("bootstrap_means: B must be >= 2");
    if (sample.size() == 0) {
        throw std::invalid_argument("bootstrap_means: empty sample");
    }
    const std::size_t n = sample.size();
    const std::uint64_t base = rng.next_u64();
    std::vector<Angle> means(B);
    CircleSample resample;
    resample.points.resize(n);
    for (std::size_t b = 0; b < B; ++b) {
        Rng child = Rng::derive(base, 0x626f6f74, b);  // per-replicate counter stream
        for (std::size_t j = 0; j < n; ++j) {
            resample.points[j] = sample.points[child.uniform_index(n)];
        }
        means[b] = frechet_mean_circle(resample, child).mean;
    }
    return means;
}

BootstrapMoments bootstrap_moments(std::vector<Angle> means, Rng& rng) {
    if (means.size() < 2) {
        throw std::invalid_argument("bootstrap_moments: need B >= 2 means");
    }
    BootstrapMoments out;
    out.B = means.size();
    out.bootstrap_means = std::move(means);
    CircleSample as_sample(out.bootstrap_means);
    MeanResult mr = frechet_mean_circle(as_sample, rng);
    out.mean_of_means = mr.mean;
    out.v_star = mr.frechet_variance;
    out.w_star = mr.fourth_moment;
    return out;
}

double fss_scale(double v_star, double v_n, std::size_t n) {
    if (!(v_n > 0.0)) {
        throw std::invalid_argument("fss_scale: degenerate sample, v_n must be > 0");
    }
    return static_cast<double>(n) * v_star / v_n;
}

FssReport fss_test(const CircleSample& sample, std::size_t B, double alpha,
                   Rng& rng) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("fss_test: alpha must be in (0, 1)");
    }
    if (B < 100) throw std::invalid_argument("fss_test: B must be >= 100");

    const std::size_t n = sample.size();
    MeanResult mr = frechet_mean_circle(sample, rng);
    const double v_n = mr.frechet_variance;
    if (!(v_n > 0.0)) {
        throw std::invalid_argument("fss_test: degenerate sample, all points identical");
    }
    BootstrapMoments bm = bootstrap_moments(bootstrap_means(sample, B, rng), rng);

    FssReport report;
    report.n = n;
    report.B = B;
    report.scale = fss_scale(bm.v_star, v_n, n);

    const double z = numeric::normal_quantile(1.0 - alpha);
    const double spread = std::sqrt(std::max(bm.w_star - bm.v_star * bm.v_star, 0.0));
    const double nd = static_cast<double>(n);
    report.threshold = nd * z / std::sqrt(static_cast<double>(B)) * spread / v_n;
    report.reject_absence = report.scale - 1.0 > report.threshold;

    const double sd = nd * spread / (std::sqrt(static_cast<double>(B)) * v_n);
    double p;
    if (sd > 0.0) {
        p = 1.0 - numeric::normal_cdf((report.scale - 1.0) / sd);
    } else {
        p = report.scale - 1.0 > 0.0 ? 0.0 : 1.0;
    }
    report.p_value = std::max(p, 1.0 / static_cast<double>(B));
    return report;
}

nlohmann::json fss_report_to_json(const FssReport& r) {
    return nlohmann::json{{"n", r.n},         {"B", r.B},
                          {"scale", r.scale}, {"threshold", r.threshold},
                          {"reject", r.reject_absence}, {"p_value", r.p_value}};
}

std::optional<FssWindow> classify_fss_window(
    const std::vector<std::pair<std::size_t, double>>& curve) {
    if (curve.size() < 4) {
        throw std::invalid_argument("classify_fss_window: need >= 4 curve points");
    }
    for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
        if (curve[i].first >= curve[i + 1].first) {
            throw std::invalid_argument("classify_fss_window: n must be increasing");
        }
    }
    for (const auto& [n, v] : curve) {
        if (!(v > 0.0)) {
            throw std::invalid_argument("classify_fss_window: scaled variances must be > 0");
        }
    }

    const double baseline = curve.front().second;
    constexpr double kAscendTol = 1e-3;  // relative rise required per step

    // Longest run of strictly ascending points above the baseline.
    std::size_t best_lo = 0, best_hi = 0;  // [lo, hi] inclusive, hi > lo means found
    std::size_t lo = 0;
    for (std::size_t i = 1; i <= curve.size(); ++i) {
        bool extends = i < curve.size() &&
                       curve[i].second > baseline &&
                       curve[i].second > curve[i - 1].second * (1.0 + kAscendTol);
        if (!extends) {
            if (i - 1 > lo && i - 1 - lo > best_hi - best_lo) {
                best_lo = lo;
                best_hi = i - 1;
            }
            lo = i;
        }
    }
    if (best_hi - best_lo + 1 < 4) return std::nullopt;

    // Per-step log-log slopes over the window; r = s/(1-s).
    double s_min = 1.0, s_max = 0.0;
    for (std::size_t i = best_lo; i < best_hi; ++i) {
        double s = (std::log(curve[i + 1].second) - std::log(curve[i].second)) /
                   (std::log(static_cast<double>(curve[i + 1].first)) -
                    std::log(static_cast<double>(curve[i].first)));
        s = std::clamp(s, 1e-6, 1.0 - 1e-6);
        s_min = std::min(s_min, s);
        s_max = std::max(s_max, s);
    }
    FssWindow w;
    w.n_minus = curve[best_lo].first;
    w.n_plus = curve[best_hi].first;
    w.r_minus = s_min / (1.0 - s_min);
    w.r_plus = s_max / (1.0 - s_max);
    double c_minus = std::numeric_limits<double>::infinity();
    double c_plus = 0.0;
    for (std::size_t i = best_lo; i <= best_hi; ++i) {
        double nd = static_cast<double>(curve[i].first);
        c_minus = std::min(c_minus, curve[i].second / std::pow(nd, s_min));
        c_plus = std::max(c_plus, curve[i].second / std::pow(nd, s_max));
    }
    w.c_minus = c_minus;
    w.c_plus = c_plus;
    return w;
}

}  // namespace circfss
