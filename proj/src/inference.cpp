#include "circfss/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "circfss/numeric.hpp"

namespace circfss {

double chi2_cdf(int k, double x) {
    if (k < 1) throw std::invalid_argument("chi2_cdf: k must be >= 1");
    if (x <= 0.0) return 0.0;
    return numeric::regularized_gamma_p(0.5 * k, 0.5 * x);
}

double chi2_quantile(int k, double p) {
    if (k < 1) throw std::invalid_argument("chi2_quantile: k must be >= 1");
    if (!(p >= 0.0 && p < 1.0)) {
        throw std::invalid_argument("chi2_quantile: p must be in [0, 1)");
    }
    if (p == 0.0) return 0.0;
    double lo = 0.0, hi = 1.0;
    while (chi2_cdf(k, hi) < p) hi *= 2.0;
    for (int i = 0; i < 300; ++i) {
        double mid = 0.5 * (lo + hi);
        if (chi2_cdf(k, mid) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 1e-10 * hi) break;
    }
    return 0.5 * (lo + hi);
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::size_t torus_dim(const TorusSample& sample, const char* who) {
    if (sample.empty()) {
        throw std::invalid_argument(std::string(who) + ": empty sample");
    }
    const std::size_t m = sample.front().dim();
    for (const TorusPoint& p : sample) {
        if (p.dim() != m) {
            throw std::invalid_argument(std::string(who) + ": dimension mismatch");
        }
    }
    return m;
}

VectorXd chart_coords(const TorusPoint& base, const TorusPoint& p) {
    VectorXd v(base.dim());
    for (std::size_t i = 0; i < base.dim(); ++i) {
        v[static_cast<Eigen::Index>(i)] = signed_arc(base[i], p[i]);
    }
    return v;
}

/// Inverts a symmetric PSD dispersion matrix; throws on (near) singularity
/// unless a ridge is configured.
MatrixXd invert_dispersion(MatrixXd sigma, const InferenceOptions& opts) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(sigma);
    const double max_ev = es.eigenvalues().maxCoeff();
    const double min_ev = es.eigenvalues().minCoeff();
    if (min_ev <= 1e-12 * std::max(max_ev, 1e-300)) {
        if (!opts.ridge) {
            throw std::runtime_error("inference: degenerate dispersion matrix");
        }
        sigma += *opts.ridge * MatrixXd::Identity(sigma.rows(), sigma.cols());
        es.compute(sigma);
    }
    return es.eigenvectors() *
           es.eigenvalues().cwiseInverse().asDiagonal() *
           es.eigenvectors().transpose();
}

TorusPoint torus_mean(const TorusSample& sample, Rng& rng) {
    return frechet_mean_torus(sample, rng).mean;
}

/// Uncentered second-moment matrix of chart residuals at the sample mean
/// (the plugin estimate of H^{-1} C H^{-1}).
MatrixXd residual_moment(const TorusSample& sample, const TorusPoint& mean) {
    const auto m = static_cast<Eigen::Index>(mean.dim());
    MatrixXd acc = MatrixXd::Zero(m, m);
    for (const TorusPoint& p : sample) {
        VectorXd r = chart_coords(mean, p);
        acc.noalias() += r * r.transpose();
    }
    return acc;  // caller divides by the pooled count
}

TestOutcome chi2_outcome(double statistic, int k, double alpha) {
    TestOutcome out;
    out.statistic = statistic;
    out.dimension_k = k;
    out.method = TestMethod::quantile;
    out.critical_value = chi2_quantile(k, 1.0 - alpha);
    out.p_value = 1.0 - chi2_cdf(k, statistic);
    out.reject = statistic >= out.critical_value;
    return out;
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("inference: alpha must be in (0, 1)");
    }
}

// Quantile tests are pure; ties in the mean (measure zero for the
// distributions tested) are broken by a fixed internal stream.
constexpr std::uint64_t kQuantileTieSeed = 0x7175616e74696c65ULL;

std::vector<TorusPoint> torus_bootstrap_means(const TorusSample& sample,
                                              std::size_t B, std::uint64_t base,
                                              std::uint64_t round) {
    const std::size_t n = sample.size();
    std::vector<TorusPoint> means(B);
    TorusSample resample(n);
    for (std::size_t b = 0; b < B; ++b) {
        Rng child = Rng::derive(base, round, b);
        for (std::size_t j = 0; j < n; ++j) {
            resample[j] = sample[child.uniform_index(n)];
        }
        means[b] = torus_mean(resample, child);
    }
    return means;
}

/// Covariance (centered, 1/(B-1)) of chart images of bootstrap means.
MatrixXd bootstrap_covariance(const std::vector<TorusPoint>& means,
                              const TorusPoint& base) {
    const auto m = static_cast<Eigen::Index>(base.dim());
    const auto B = static_cast<Eigen::Index>(means.size());
    MatrixXd coords(B, m);
    for (Eigen::Index b = 0; b < B; ++b) {
        coords.row(b) = chart_coords(base, means[static_cast<std::size_t>(b)]);
    }
    Eigen::RowVectorXd center = coords.colwise().mean();
    coords.rowwise() -= center;
    return coords.transpose() * coords / static_cast<double>(B - 1);
}

/// Order-statistic critical value: smallest e with
/// (#{T* <= e} - 1)/B <= 1-alpha <= #{T* <= e}/B.
double order_statistic_quantile(std::vector<double> values, double alpha) {
    std::sort(values.begin(), values.end());
    const auto B = values.size();
    double j = std::ceil((1.0 - alpha) * static_cast<double>(B));
    auto idx = static_cast<std::size_t>(std::clamp(j, 1.0, static_cast<double>(B)));
    return values[idx - 1];
}

double bootstrap_p_value(const std::vector<double>& t_star, double t_obs) {
    std::size_t count = 0;
    for (double t : t_star) {
        if (t >= t_obs) ++count;
    }
    return static_cast<double>(1 + count) / static_cast<double>(t_star.size() + 1);
}

void check_bootstrap_b(std::size_t B) {
    if (B < 100) throw std::invalid_argument("inference: bootstrap B must be >= 100");
}

TorusSample lift_circle(const CircleSample& s) {
    TorusSample out;
    out.reserve(s.size());
    for (const Angle& a : s.points) out.push_back(TorusPoint{{a}});
    return out;
}

}  // namespace

TestOutcome quantile_one_sample(const TorusSample& sample, const TorusPoint& mu0,
                                double alpha, const InferenceOptions& opts) {
    check_alpha(alpha);
    const std::size_t m = torus_dim(sample, "quantile_one_sample");
    if (mu0.dim() != m) {
        throw std::invalid_argument("quantile_one_sample: mu0 dimension mismatch");
    }
    Rng tie_rng(kQuantileTieSeed);
    const TorusPoint mean = torus_mean(sample, tie_rng);
    const double n = static_cast<double>(sample.size());
    MatrixXd sigma = residual_moment(sample, mean) / n;
    MatrixXd sigma_inv = invert_dispersion(std::move(sigma), opts);
    VectorXd delta = chart_coords(mu0, mean);
    double t = n * delta.dot(sigma_inv * delta);
    return chi2_outcome(t, static_cast<int>(m), alpha);
}

TestOutcome quantile_two_sample(const TorusSample& sample_x, const TorusSample& sample_y,
                                double alpha, const InferenceOptions& opts) {
    check_alpha(alpha);
    const std::size_t mx = torus_dim(sample_x, "quantile_two_sample");
    const std::size_t my = torus_dim(sample_y, "quantile_two_sample");
    if (mx != my) {
        throw std::invalid_argument("quantile_two_sample: dimension mismatch");
    }
    Rng tie_rng(kQuantileTieSeed);
    const TorusPoint mean_x = torus_mean(sample_x, tie_rng);
    const TorusPoint mean_y = torus_mean(sample_y, tie_rng);
    const double n = static_cast<double>(sample_x.size());
    const double m = static_cast<double>(sample_y.size());
    MatrixXd pooled =
        (residual_moment(sample_x, mean_x) + residual_moment(sample_y, mean_y)) / (n + m);
    MatrixXd pooled_inv = invert_dispersion(std::move(pooled), opts);
    VectorXd delta = chart_coords(mean_y, mean_x);
    // Effective sample size n m / (n + m): delta has variance of order
    // (1/n + 1/m) times the pooled variance.
    double t = n * m / (n + m) * delta.dot(pooled_inv * delta);
    return chi2_outcome(t, static_cast<int>(mx), alpha);
}

TestOutcome bootstrap_one_sample(const TorusSample& sample, const TorusPoint& mu0,
                                 double alpha, std::size_t B, Rng& rng,
                                 const InferenceOptions& opts) {
    check_alpha(alpha);
    check_bootstrap_b(B);
    const std::size_t m = torus_dim(sample, "bootstrap_one_sample");
    if (mu0.dim() != m) {
        throw std::invalid_argument("bootstrap_one_sample: mu0 dimension mismatch");
    }
    const std::uint64_t base = rng.next_u64();
    Rng tie_rng = Rng::derive(base, 0xcafe, 0);
    const TorusPoint mean = torus_mean(sample, tie_rng);

    auto round1 = torus_bootstrap_means(sample, B, base, 1);
    MatrixXd sigma_inv = invert_dispersion(bootstrap_covariance(round1, mean), opts);

    auto round2 = torus_bootstrap_means(sample, B, base, 2);
    std::vector<double> t_star(B);
    for (std::size_t b = 0; b < B; ++b) {
        VectorXd c = chart_coords(mean, round2[b]);
        t_star[b] = c.dot(sigma_inv * c);
    }

    VectorXd delta = chart_coords(mu0, mean);
    TestOutcome out;
    out.statistic = delta.dot(sigma_inv * delta);
    out.dimension_k = static_cast<int>(m);
    out.method = TestMethod::bootstrap;
    out.B_used = B;
    out.critical_value = order_statistic_quantile(t_star, alpha);
    out.p_value = bootstrap_p_value(t_star, out.statistic);
    out.reject = out.statistic >= out.critical_value;
    return out;
}

TestOutcome bootstrap_two_sample(const TorusSample& sample_x, const TorusSample& sample_y,
                                 double alpha, std::size_t B, Rng& rng,
                                 const InferenceOptions& opts) {
    check_alpha(alpha);
    check_bootstrap_b(B);
    const std::size_t mx = torus_dim(sample_x, "bootstrap_two_sample");
    const std::size_t my = torus_dim(sample_y, "bootstrap_two_sample");
    if (mx != my) {
        throw std::invalid_argument("bootstrap_two_sample: dimension mismatch");
    }
    const std::uint64_t base = rng.next_u64();
    Rng tie_rng = Rng::derive(base, 0xcafe, 0);
    const TorusPoint mean_x = torus_mean(sample_x, tie_rng);
    const TorusPoint mean_y = torus_mean(sample_y, tie_rng);

    auto round1_x = torus_bootstrap_means(sample_x, B, base, 11);
    auto round1_y = torus_bootstrap_means(sample_y, B, base, 12);
    MatrixXd a = bootstrap_covariance(round1_x, mean_x) +
                 bootstrap_covariance(round1_y, mean_y);
    MatrixXd a_inv = invert_dispersion(std::move(a), opts);

    auto round2_x = torus_bootstrap_means(sample_x, B, base, 21);
    auto round2_y = torus_bootstrap_means(sample_y, B, base, 22);
    std::vector<double> t_star(B);
    for (std::size_t b = 0; b < B; ++b) {
        VectorXd d = chart_coords(mean_x, round2_x[b]) - chart_coords(mean_y, round2_y[b]);
        t_star[b] = d.dot(a_inv * d);
    }

    VectorXd delta = chart_coords(mean_y, mean_x);
    TestOutcome out;
    out.statistic = delta.dot(a_inv * delta);
    out.dimension_k = static_cast<int>(mx);
    out.method = TestMethod::bootstrap;
    out.B_used = B;
    out.critical_value = order_statistic_quantile(t_star, alpha);
    out.p_value = bootstrap_p_value(t_star, out.statistic);
    out.reject = out.statistic >= out.critical_value;
    return out;
}

TestOutcome quantile_one_sample(const CircleSample& sample, const Angle& mu0,
                                double alpha, const InferenceOptions& opts) {
    return quantile_one_sample(lift_circle(sample), TorusPoint{{mu0}}, alpha, opts);
}

TestOutcome quantile_two_sample(const CircleSample& sample_x, const CircleSample& sample_y,
                                double alpha, const InferenceOptions& opts) {
    return quantile_two_sample(lift_circle(sample_x), lift_circle(sample_y), alpha, opts);
}

TestOutcome bootstrap_one_sample(const CircleSample& sample, const Angle& mu0,
                                 double alpha, std::size_t B, Rng& rng,
                                 const InferenceOptions& opts) {
    return bootstrap_one_sample(lift_circle(sample), TorusPoint{{mu0}}, alpha, B, rng, opts);
}

TestOutcome bootstrap_two_sample(const CircleSample& sample_x, const CircleSample& sample_y,
                                 double alpha, std::size_t B, Rng& rng,
                                 const InferenceOptions& opts) {
    return bootstrap_two_sample(lift_circle(sample_x), lift_circle(sample_y), alpha, B,
                                rng, opts);
}

BhResult bh_adjust(const std::vector<double>& p_values, double alpha) {
    const std::size_t m = p_values.size();
    BhResult out;
    if (m == 0) return out;
    for (double p : p_values) {
        if (!(p > 0.0 && p <= 1.0)) {
            throw std::invalid_argument("bh_adjust: p-values must be in (0, 1]");
        }
    }
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return p_values[a] < p_values[b];
    });

    out.reject.assign(m, false);
    out.adjusted_p.assign(m, 1.0);

    // Step-up: largest k with p_(k) <= alpha k / m; reject ranks <= k.
    std::size_t k = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (p_values[order[i]] <=
            alpha * static_cast<double>(i + 1) / static_cast<double>(m)) {
            k = i + 1;
        }
    }
    for (std::size_t i = 0; i < k; ++i) out.reject[order[i]] = true;

    // Adjusted p: running minimum of m p_(i) / i from the tail, clipped to 1.
    double running = 1.0;
    for (std::size_t i = m; i > 0; --i) {
        double candidate = static_cast<double>(m) * p_values[order[i - 1]] /
                           static_cast<double>(i);
        running = std::min(running, std::min(candidate, 1.0));
        out.adjusted_p[order[i - 1]] = running;
    }
    return out;
}

nlohmann::json test_outcome_to_json(const TestOutcome& o) {
    nlohmann::json j{{"statistic", o.statistic},
                     {"critical_value", o.critical_value},
                     {"p_value", o.p_value},
                     {"reject", o.reject},
                     {"dimension_k", o.dimension_k},
                     {"method", o.method == TestMethod::quantile ? "quantile" : "bootstrap"}};
    if (o.B_used) j["B"] = *o.B_used;
    return j;
}

}  // namespace circfss
