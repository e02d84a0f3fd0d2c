#include "circfss/mean.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace circfss {

namespace {

constexpr double kRelTieTol = 1e-9;

/// F_n evaluator over a sorted copy of the sample. Lifts every point into
/// the length-2*pi window centered at x and reads the sum of squared
/// residuals off prefix sums, O(log n) per evaluation.
class FrechetEvaluator {
  public:
    explicit FrechetEvaluator(const CircleSample& sample) {
        const std::size_t n = sample.size();
        sorted_.reserve(n);
        for (const Angle& a : sample.points) sorted_.push_back(a.radians());
        std::sort(sorted_.begin(), sorted_.end());
        p1_.assign(n + 1, 0.0);
        p2_.assign(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            p1_[i + 1] = p1_[i] + sorted_[i];
            p2_[i + 1] = p2_[i] + sorted_[i] * sorted_[i];
        }
    }

    std::size_t size() const { return sorted_.size(); }
    const std::vector<double>& sorted() const { return sorted_; }
    double rep_mean() const { return p1_.back() / static_cast<double>(size()); }

    double operator()(double x) const {
        const double n = static_cast<double>(size());
        auto lo = std::lower_bound(sorted_.begin(), sorted_.end(), x - kPi);
        auto hi = std::lower_bound(sorted_.begin(), sorted_.end(), x + kPi);
        const std::size_t cnt_low = static_cast<std::size_t>(lo - sorted_.begin());
        const std::size_t cnt_high = size() - static_cast<std::size_t>(hi - sorted_.begin());
        const double s1_low = p1_[cnt_low];
        const double s1_high = p1_.back() - p1_[size() - cnt_high];
        const double sum1 = p1_.back() + kTwoPi * (static_cast<double>(cnt_low) -
                                                   static_cast<double>(cnt_high));
        const double sum2 = p2_.back() +
            4.0 * kPi * (s1_low - s1_high) +
            4.0 * kPi * kPi * static_cast<double>(cnt_low + cnt_high);
        return (sum2 - 2.0 * x * sum1 + n * x * x) / n;
    }

    /// Euclidean mean of the lifted representatives when the sample fits in
    /// an open half circle (largest circular gap > pi); nullopt otherwise.
    /// Summation runs in sorted order starting after the gap.
    std::optional<double> half_circle_mean() const {
        const std::size_t n = size();
        std::size_t gap_at = n - 1;  // gap between sorted_[g] and the next point
        double best_gap = sorted_.front() + kTwoPi - sorted_.back();
        for (std::size_t i = 0; i + 1 < n; ++i) {
            double g = sorted_[i + 1] - sorted_[i];
            if (g > best_gap) {
                best_gap = g;
                gap_at = i;
            }
        }
        if (!(best_gap > kPi)) return std::nullopt;
        double sum = 0.0;
        if (gap_at == n - 1) {
            for (std::size_t i = 0; i < n; ++i) sum += sorted_[i];
        } else {
            for (std::size_t i = gap_at + 1; i < n; ++i) sum += sorted_[i];
            for (std::size_t i = 0; i <= gap_at; ++i) sum += sorted_[i] + kTwoPi;
        }
        return sum / static_cast<double>(n);
    }

  private:
    std::vector<double> sorted_;
    std::vector<double> p1_, p2_;  // prefix sums of sorted_ and its squares
};

std::vector<Angle> candidates_from(const FrechetEvaluator& ev) {
    const std::size_t n = ev.size();
    std::vector<Angle> out;
    out.reserve(2 * n + 1);
    if (auto hm = ev.half_circle_mean()) {
        out.push_back(Angle(*hm));
    }
    const double theta_bar = ev.rep_mean();
    for (std::size_t k = 0; k < n; ++k) {
        out.push_back(Angle(theta_bar + kTwoPi * static_cast<double>(k) /
                            static_cast<double>(n)));
    }
    for (double s : ev.sorted()) out.push_back(Angle(s + kPi));
    // Data points themselves: minimizers can sit on atoms, and for a
    // degenerate sample the data point is the exact mean.
    for (double s : ev.sorted()) out.push_back(Angle(s));
    return out;
}

}  // namespace

double frechet_value(const CircleSample& sample, const Angle& x) {
    if (sample.size() == 0) {
        throw std::invalid_argument("frechet_value: empty sample");
    }
    double acc = 0.0;
    for (const Angle& p : sample.points) {
        double d = circle_dist(x, p);
        acc += d * d;
    }
    return acc / static_cast<double>(sample.size());
}

std::vector<Angle> circle_mean_candidates(const CircleSample& sample) {
    if (sample.size() == 0) {
        throw std::invalid_argument("circle_mean_candidates: empty sample");
    }
    return candidates_from(FrechetEvaluator(sample));
}

MeanResult frechet_mean_circle(const CircleSample& sample, Rng& rng) {
    if (sample.size() == 0) {
        throw std::invalid_argument("frechet_mean_circle: empty sample");
    }
    FrechetEvaluator ev(sample);
    std::vector<Angle> cands = candidates_from(ev);

    std::vector<double> values(cands.size());
    double fmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cands.size(); ++i) {
        values[i] = ev(cands[i].radians());
        fmin = std::min(fmin, values[i]);
    }
    const double tol = kRelTieTol * fmin;

    // Tied candidates in original order, then clustered: numerically
    // coincident candidates (within 1e-9 rad) count once, keeping the
    // earliest, so the half-circle exact mean wins its cluster.
    std::vector<std::size_t> tied_idx;
    for (std::size_t i = 0; i < cands.size(); ++i) {
        if (values[i] <= fmin + tol) tied_idx.push_back(i);
    }
    std::vector<std::size_t> reps;
    for (std::size_t i : tied_idx) {
        bool merged = false;
        for (std::size_t& r : reps) {
            if (circle_dist(cands[i], cands[r]) <= 1e-9) {
                merged = true;
                break;
            }
        }
        if (!merged) reps.push_back(i);
    }
    std::vector<Angle> ties;
    ties.reserve(reps.size());
    for (std::size_t r : reps) ties.push_back(cands[r]);
    std::sort(ties.begin(), ties.end());
    // Stable uniform pick: index into the sorted tie list.
    std::size_t pick = 0;
    const std::uint64_t seed_used = rng.seed();
    if (ties.size() > 1) pick = rng.uniform_index(ties.size());

    // Find the chosen angle again among reps to preserve the exact value.
    MeanResult result;
    result.mean = ties[pick];
    result.tied_minimizers = std::move(ties);
    result.selection_seed_used = seed_used;
    double v = 0.0, w = 0.0;
    for (const Angle& p : sample.points) {
        double d = circle_dist(result.mean, p);
        v += d * d;
        w += d * d * d * d;
    }
    result.frechet_variance = v / static_cast<double>(sample.size());
    result.fourth_moment = w / static_cast<double>(sample.size());
    return result;
}

std::size_t TorusMeanResult::tied_count() const {
    std::size_t c = 1;
    for (const auto& t : tied_coordinates) c *= t.size();
    return c;
}

std::vector<TorusPoint> TorusMeanResult::tied_minimizers() const {
    std::vector<TorusPoint> out;
    const std::size_t m = tied_coordinates.size();
    std::vector<std::size_t> idx(m, 0);
    while (true) {
        TorusPoint p;
        p.coords.reserve(m);
        for (std::size_t i = 0; i < m; ++i) {
            p.coords.push_back(tied_coordinates[i][idx[i]]);
        }
        out.push_back(std::move(p));
        std::size_t i = m;
        while (i > 0) {
            --i;
            if (++idx[i] < tied_coordinates[i].size()) break;
            idx[i] = 0;
            if (i == 0) return out;
        }
        if (m == 0) return out;
    }
}

TorusMeanResult frechet_mean_torus(const std::vector<TorusPoint>& sample, Rng& rng) {
    if (sample.empty()) {
        throw std::invalid_argument("frechet_mean_torus: empty sample");
    }
    const std::size_t m = sample.front().dim();
    if (m == 0) {
        throw std::invalid_argument("frechet_mean_torus: zero-dimensional points");
    }
    for (const TorusPoint& p : sample) {
        if (p.dim() != m) {
            throw std::invalid_argument("frechet_mean_torus: dimension mismatch");
        }
    }
    TorusMeanResult result;
    result.selection_seed_used = rng.seed();
    result.mean.coords.resize(m);
    result.tied_coordinates.resize(m);
    double variance = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        CircleSample marginal;
        marginal.points.reserve(sample.size());
        for (const TorusPoint& p : sample) marginal.points.push_back(p[i]);
        MeanResult mr = frechet_mean_circle(marginal, rng);
        result.mean[i] = mr.mean;
        result.tied_coordinates[i] = std::move(mr.tied_minimizers);
        variance += mr.frechet_variance;
    }
    result.frechet_variance = variance;
    double w = 0.0;
    for (const TorusPoint& p : sample) {
        double d = torus_dist(result.mean, p);
        w += d * d * d * d;
    }
    result.fourth_moment = w / static_cast<double>(sample.size());
    return result;
}

GridOracleResult grid_oracle_mean(const CircleSample& sample, std::size_t grid_size) {
    if (grid_size < 10) {
        throw std::invalid_argument("grid_oracle_mean: grid_size must be >= 10");
    }
    if (sample.size() == 0) {
        throw std::invalid_argument("grid_oracle_mean: empty sample");
    }
    const std::size_t n = sample.size();
    std::vector<double> pts(n);
    for (std::size_t j = 0; j < n; ++j) pts[j] = sample.points[j].radians();

    std::vector<double> values(grid_size);
    double fmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid_size; ++i) {
        const double x = -kPi + kTwoPi * static_cast<double>(i) /
                         static_cast<double>(grid_size);
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double d = std::fabs(x - pts[j]);
            if (d > kPi) d = kTwoPi - d;
            acc += d * d;
        }
        values[i] = acc / static_cast<double>(n);
        fmin = std::min(fmin, values[i]);
    }
    GridOracleResult result;
    result.min_value = fmin;
    const double tol = kRelTieTol * fmin;
    for (std::size_t i = 0; i < grid_size; ++i) {
        if (values[i] <= fmin + tol) {
            result.argmin.push_back(Angle(-kPi + kTwoPi * static_cast<double>(i) /
                                          static_cast<double>(grid_size)));
        }
    }
    return result;
}

}  // namespace circfss
