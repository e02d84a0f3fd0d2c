#include "circfss/simlab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "circfss/fss.hpp"
#include "circfss/parallel.hpp"

namespace circfss {

unsigned default_workers() {
    if (const char* env = std::getenv("CIRCFSS_WORKERS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

namespace {

double median_of(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median_of: empty");
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

CircleSample rotate_sample(const CircleSample& s, double p) {
    CircleSample out;
    out.points.reserve(s.size());
    for (const Angle& a : s.points) out.points.emplace_back(a.radians() + p);
    return out;
}

void check_counts(std::size_t reps, const char* who) {
    if (reps < 1) throw std::invalid_argument(std::string(who) + ": reps must be >= 1");
}

}  // namespace

VarianceCurve variance_curve(const DistributionSpec& spec,
                             const std::vector<std::size_t>& n_grid,
                             std::size_t reps, Rng& rng, unsigned workers) {
    validate(spec);
    check_counts(reps, "variance_curve");
    if (n_grid.empty()) throw std::invalid_argument("variance_curve: empty n grid");

    const double sigma_sq = theoretical_moments(spec).sigma_sq;
    const std::uint64_t base = rng.next_u64();

    VarianceCurve curve;
    curve.replications = reps;
    curve.spec = spec;
    curve.points.resize(n_grid.size());

    for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
        const std::size_t n = n_grid[gi];
        if (n < 1) throw std::invalid_argument("variance_curve: n must be >= 1");
        std::vector<double> sq_dist(reps);
        parallel_for(reps, workers, [&](std::size_t rep) {
            Rng child = Rng::derive(base, gi, rep);
            CircleSample s = sample(spec, n, child);
            MeanResult mr = frechet_mean_circle(s, child);
            double d = circle_dist(mr.mean, Angle(0.0));
            sq_dist[rep] = d * d;
        });
        double sum = 0.0, sum_sq = 0.0;
        for (double v : sq_dist) {
            sum += v;
            sum_sq += v * v;
        }
        const double rd = static_cast<double>(reps);
        const double mean = sum / rd;
        const double var = reps > 1 ? std::max(sum_sq / rd - mean * mean, 0.0) : 0.0;

        VarianceCurvePoint& pt = curve.points[gi];
        pt.n = n;
        pt.scaled_variance = static_cast<double>(n) * mean;
        pt.scaled_over_sigma_sq = pt.scaled_variance / sigma_sq;
        pt.mc_stderr = static_cast<double>(n) * std::sqrt(var / rd);
        pt.normalizer_sigma_sq = sigma_sq;
    }
    return curve;
}

std::vector<SizePowerRow> size_power_curve(const SizePowerConfig& config) {
    validate(config.spec_x);
    validate(config.spec_y);
    check_counts(config.replications, "size_power_curve");
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
        throw std::invalid_argument("size_power_curve: alpha must be in (0, 1)");
    }
    if (config.grid.empty() || config.methods.empty()) {
        throw std::invalid_argument("size_power_curve: empty grid or method list");
    }

    std::vector<SizePowerRow> rows;
    for (std::size_t gi = 0; gi < config.grid.size(); ++gi) {
        const double g = config.grid[gi];
        std::vector<std::vector<std::uint8_t>> rejects(
            config.methods.size(), std::vector<std::uint8_t>(config.replications, 0));

        parallel_for(config.replications, config.workers, [&](std::size_t rep) {
            Rng child = Rng::derive(config.seed, gi, rep);
            CircleSample x = sample(config.spec_x, config.n, child);
            for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
                TestOutcome out;
                Rng test_rng = Rng::derive(child.seed(), 0x10 + mi, rep);
                if (config.mode == SizePowerMode::one_sample) {
                    Angle mu0(g);
                    out = config.methods[mi] == TestMethod::quantile
                              ? quantile_one_sample(x, mu0, config.alpha)
                              : bootstrap_one_sample(x, mu0, config.alpha, config.B,
                                                     test_rng);
                } else {
                    Rng y_rng = Rng::derive(child.seed(), 0x20, rep);
                    CircleSample y =
                        rotate_sample(sample(config.spec_y, config.m, y_rng), g);
                    out = config.methods[mi] == TestMethod::quantile
                              ? quantile_two_sample(x, y, config.alpha)
                              : bootstrap_two_sample(x, y, config.alpha, config.B,
                                                     test_rng);
                }
                rejects[mi][rep] = out.reject ? 1 : 0;
            }
        });

        for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
            std::size_t count = 0;
            for (std::uint8_t r : rejects[mi]) count += r;
            const double rd = static_cast<double>(config.replications);
            const double freq = static_cast<double>(count) / rd;
            rows.push_back(SizePowerRow{g, config.methods[mi], freq,
                                        std::sqrt(freq * (1.0 - freq) / rd)});
        }
    }
    return rows;
}

std::vector<FssScaleRow> fss_scale_table(const std::vector<DistributionSpec>& specs,
                                         const std::vector<std::size_t>& n_list,
                                         std::size_t B, std::size_t reps, Rng& rng,
                                         unsigned workers) {
    check_counts(reps, "fss_scale_table");
    if (specs.empty() || n_list.empty()) {
        throw std::invalid_argument("fss_scale_table: empty spec or n list");
    }
    for (const DistributionSpec& s : specs) validate(s);
    const std::uint64_t base = rng.next_u64();

    std::vector<FssScaleRow> rows;
    for (std::size_t si = 0; si < specs.size(); ++si) {
        for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
            const std::size_t n = n_list[ni];
            std::vector<double> scales(reps);
            parallel_for(reps, workers, [&](std::size_t rep) {
                Rng child = Rng::derive(base, si * 1024 + ni, rep);
                CircleSample s = sample(specs[si], n, child);
                MeanResult mr = frechet_mean_circle(s, child);
                BootstrapMoments bm =
                    bootstrap_moments(bootstrap_means(s, B, child), child);
                scales[rep] = fss_scale(bm.v_star, mr.frechet_variance, n);
            });
            rows.push_back(FssScaleRow{spec_label(specs[si]), n, median_of(scales)});
        }
    }
    return rows;
}

LogSmearySummary log_smeary_smoke(double r, std::size_t n, std::size_t reps,
                                  Rng& rng, unsigned workers) {
    if (n < 10000) throw std::invalid_argument("log_smeary_smoke: n must be >= 10^4");
    check_counts(reps, "log_smeary_smoke");
    const DistributionSpec spec = LogSmeary{r};
    validate(spec);
    const std::uint64_t base = rng.next_u64();
    const double rescale = std::pow(std::log(std::sqrt(static_cast<double>(n))), 1.0 / r);

    std::vector<double> mean_coord(reps);
    parallel_for(reps, workers, [&](std::size_t rep) {
        Rng child = Rng::derive(base, 0, rep);
        CircleSample s = sample(spec, n, child);
        mean_coord[rep] = frechet_mean_circle(s, child).mean.radians();
    });

    std::size_t positive = 0;
    std::vector<double> magnitudes(reps);
    for (std::size_t i = 0; i < reps; ++i) {
        if (mean_coord[i] > 0.0) ++positive;
        magnitudes[i] = std::abs(mean_coord[i]);
    }
    LogSmearySummary out;
    out.n = n;
    out.replications = reps;
    out.positive_sign_frequency =
        static_cast<double>(positive) / static_cast<double>(reps);
    out.median_magnitude = median_of(magnitudes);
    for (double& m : magnitudes) m *= rescale;
    out.median_rescaled_magnitude = median_of(magnitudes);
    return out;
}

nlohmann::json size_power_config_to_json(const SizePowerConfig& c) {
    nlohmann::json methods = nlohmann::json::array();
    for (TestMethod m : c.methods) {
        methods.push_back(m == TestMethod::quantile ? "quantile" : "bootstrap");
    }
    return nlohmann::json{
        {"spec_x", spec_to_json(c.spec_x)},
        {"spec_y", spec_to_json(c.spec_y)},
        {"mode", c.mode == SizePowerMode::one_sample ? "one_sample" : "two_sample"},
        {"methods", methods},
        {"n", c.n},
        {"m", c.m},
        {"grid", c.grid},
        {"replications", c.replications},
        {"B", c.B},
        {"alpha", c.alpha},
        {"seed", c.seed},
        {"workers", c.workers}};
}

SizePowerConfig size_power_config_from_json(const nlohmann::json& j) {
    SizePowerConfig c;
    c.spec_x = spec_from_json(j.at("spec_x"));
    c.spec_y = j.contains("spec_y") ? spec_from_json(j.at("spec_y")) : c.spec_x;
    const std::string mode = j.value("mode", "two_sample");
    if (mode == "one_sample") {
        c.mode = SizePowerMode::one_sample;
    } else if (mode == "two_sample") {
        c.mode = SizePowerMode::two_sample;
    } else {
        throw std::invalid_argument("size_power_config: unknown mode " + mode);
    }
    c.methods.clear();
    for (const auto& m : j.value("methods", nlohmann::json::array({"quantile"}))) {
        const std::string name = m.get<std::string>();
        if (name == "quantile") {
            c.methods.push_back(TestMethod::quantile);
        } else if (name == "bootstrap") {
            c.methods.push_back(TestMethod::bootstrap);
        } else {
            throw std::invalid_argument("size_power_config: unknown method " + name);
        }
    }
    c.n = j.value("n", c.n);
    c.m = j.value("m", c.m);
    c.grid = j.value("grid", c.grid);
    c.replications = j.value("replications", c.replications);
    c.B = j.value("B", c.B);
    c.alpha = j.value("alpha", c.alpha);
    c.seed = j.value("seed", c.seed);
    c.workers = j.value("workers", c.workers);
    return c;
}

void write_variance_curve_csv(const VarianceCurve& curve, std::ostream& os) {
    os.precision(12);
    os << "n,scaled_var,scaled_var_over_sigma2,stderr,sigma2\n";
    for (const VarianceCurvePoint& p : curve.points) {
        os << p.n << ',' << p.scaled_variance << ',' << p.scaled_over_sigma_sq << ','
           << p.mc_stderr << ',' << p.normalizer_sigma_sq << '\n';
    }
}

void write_size_power_csv(const std::vector<SizePowerRow>& rows, std::ostream& os) {
    os.precision(12);
    os << "grid,method,reject_freq,stderr\n";
    for (const SizePowerRow& r : rows) {
        os << r.grid_point << ','
           << (r.method == TestMethod::quantile ? "quantile" : "bootstrap") << ','
           << r.reject_freq << ',' << r.mc_stderr << '\n';
    }
}

void write_fss_scale_csv(const std::vector<FssScaleRow>& rows, std::ostream& os) {
    os.precision(12);
    os << "spec,n,median_scale\n";
    for (const FssScaleRow& r : rows) {
        os << r.label << ',' << r.n << ',' << r.median_scale << '\n';
    }
}

}  // namespace circfss
