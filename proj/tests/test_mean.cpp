#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "circfss/distributions.hpp"
#include "circfss/mean.hpp"

using namespace circfss;

namespace {

CircleSample make_sample(std::initializer_list<double> xs) {
    CircleSample s;
    for (double x : xs) s.points.emplace_back(x);
    return s;
}

bool contains_angle(const std::vector<Angle>& v, double x, double tol = 1e-12) {
    return std::any_of(v.begin(), v.end(), [&](const Angle& a) {
        return circle_dist(a, Angle(x)) <= tol;
    });
}

}  // namespace

TEST_CASE("frechet_value basics") {
    CHECK(frechet_value(make_sample({kPi / 2, -kPi / 2}), Angle(0.0)) ==
          doctest::Approx(kPi * kPi / 4));
    CHECK(frechet_value(make_sample({0.5}), Angle(0.5)) == 0.0);
    CHECK(frechet_value(make_sample({0.1, 0.2, 0.3}), Angle(0.2)) ==
          doctest::Approx(0.02 / 3));
    CHECK_THROWS_AS(frechet_value(CircleSample{}, Angle(0.0)), std::invalid_argument);
}

TEST_CASE("candidate set contains the stationary points") {
    auto single = circle_mean_candidates(make_sample({0.5}));
    CHECK(contains_angle(single, 0.5));
    CHECK(contains_angle(single, wrap_radians(0.5 + kPi)));

    auto pair = circle_mean_candidates(make_sample({0.1, 0.3}));
    CHECK(contains_angle(pair, 0.2));
    CHECK(contains_angle(pair, wrap_radians(0.2 + kPi)));

    CircleSample spaced;
    for (int j = 1; j <= 6; ++j) spaced.points.emplace_back(-kPi + kTwoPi * (j - 1) / 6.0);
    auto cands = circle_mean_candidates(spaced);
    for (int j = 1; j <= 6; ++j) {
        CHECK(contains_angle(cands, wrap_radians(-kPi + kTwoPi * (2 * j - 1) / 12.0), 1e-9));
    }
}

TEST_CASE("mean of a near-collinear sample is Euclidean") {
    Rng rng(1);
    MeanResult mr = frechet_mean_circle(make_sample({0.1, 0.2, 0.3}), rng);
    CHECK(mr.mean.radians() == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(mr.tied_minimizers.size() == 1);
    CHECK(mr.frechet_variance == doctest::Approx(0.02 / 3));
}

TEST_CASE("antipodal pair has two tied minimizers, selected uniformly") {
    std::set<double> seen;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        Rng rng(seed);
        MeanResult mr = frechet_mean_circle(make_sample({-kPi / 2, kPi / 2}), rng);
        REQUIRE(mr.tied_minimizers.size() == 2);
        CHECK(contains_angle(mr.tied_minimizers, 0.0, 1e-12));
        CHECK(contains_angle(mr.tied_minimizers, -kPi, 1e-12));
        seen.insert(mr.mean.radians());
    }
    CHECK(seen.size() == 2);  // both tied minimizers get picked across seeds
}

TEST_CASE("half-circle samples give the lifted Euclidean mean exactly") {
    Rng rng(7);
    for (int rep = 0; rep < 200; ++rep) {
        const double center = rng.uniform(-kPi, kPi);
        const std::size_t n = 1 + rng.uniform_index(20);
        std::vector<double> offsets(n);
        for (double& o : offsets) o = rng.uniform(-1.5, 1.5);

        CircleSample s;
        for (double o : offsets) s.points.emplace_back(center + o);
        MeanResult mr = frechet_mean_circle(s, rng);

        // Reference: lift representatives into a window around the center and
        // average; the intrinsic mean of a half-circle sample equals it.
        double sum = 0.0;
        for (const Angle& a : s.points) sum += signed_arc(Angle(center), a);
        Angle expected(center + sum / static_cast<double>(n));
        CHECK(circle_dist(mr.mean, expected) <= 1e-12);
    }
}

TEST_CASE("six equally spaced points tie at exactly six midpoints") {
    CircleSample spaced;
    for (int j = 1; j <= 6; ++j) spaced.points.emplace_back(-kPi + kTwoPi * (j - 1) / 6.0);
    Rng rng(11);
    MeanResult mr = frechet_mean_circle(spaced, rng);
    REQUIRE(mr.tied_minimizers.size() == 6);
    for (int j = 1; j <= 6; ++j) {
        CHECK(contains_angle(mr.tied_minimizers,
                             wrap_radians(-kPi + kTwoPi * (2 * j - 1) / 12.0), 1e-9));
    }
}

TEST_CASE("every tied minimizer attains the minimum") {
    Rng rng(13);
    for (int rep = 0; rep < 100; ++rep) {
        CircleSample s;
        std::size_t n = 2 + rng.uniform_index(15);
        for (std::size_t j = 0; j < n; ++j) s.points.emplace_back(rng.uniform(-kPi, kPi));
        MeanResult mr = frechet_mean_circle(s, rng);
        double fmin = frechet_value(s, mr.mean);
        CHECK(mr.frechet_variance == doctest::Approx(fmin));
        CHECK(mr.fourth_moment >= mr.frechet_variance * mr.frechet_variance - 1e-15);
        for (const Angle& c : circle_mean_candidates(s)) {
            CHECK(fmin <= frechet_value(s, c) + 1e-9 * fmin + 1e-15);
        }
        bool mean_in_ties = contains_angle(mr.tied_minimizers, mr.mean.radians(), 0.0);
        CHECK(mean_in_ties);
    }
}

TEST_CASE("torus mean is coordinatewise; diagonal sample ties on a 36 grid") {
    std::vector<TorusPoint> diag;
    for (int j = 1; j <= 6; ++j) {
        Angle a(-kPi + kTwoPi * (j - 1) / 6.0);
        diag.push_back(TorusPoint{{a, a}});
    }
    Rng rng(17);
    TorusMeanResult mr = frechet_mean_torus(diag, rng);
    CHECK(mr.tied_count() == 36);
    CHECK(mr.tied_minimizers().size() == 36);

    // m = 1 reduces to the circle mean
    std::vector<TorusPoint> lifted;
    CircleSample flat;
    Rng ra(5), rb(5);
    for (double x : {0.2, 1.1, -0.4}) {
        lifted.push_back(TorusPoint{{Angle(x)}});
        flat.points.emplace_back(x);
    }
    TorusMeanResult tm = frechet_mean_torus(lifted, ra);
    MeanResult cm = frechet_mean_circle(flat, rb);
    CHECK(tm.mean[0] == cm.mean);
    CHECK(tm.frechet_variance == doctest::Approx(cm.frechet_variance));

    // point mass
    std::vector<TorusPoint> constant(4, TorusPoint{{Angle(0.7), Angle(-2.0)}});
    TorusMeanResult pm = frechet_mean_torus(constant, rng);
    CHECK(pm.mean[0] == Angle(0.7));
    CHECK(pm.mean[1] == Angle(-2.0));
    CHECK(pm.frechet_variance == 0.0);
}

TEST_CASE("grid oracle locates known minimizers") {
    GridOracleResult r1 = grid_oracle_mean(make_sample({0.1, 0.2, 0.3}), 100000);
    REQUIRE(!r1.argmin.empty());
    for (const Angle& a : r1.argmin) {
        CHECK(circle_dist(a, Angle(0.2)) <= kTwoPi / 100000 + 1e-12);
    }

    GridOracleResult r2 = grid_oracle_mean(make_sample({-kPi / 2, kPi / 2}), 100000);
    bool near_zero = false, near_antipode = false;
    for (const Angle& a : r2.argmin) {
        if (circle_dist(a, Angle(0.0)) < 1e-3) near_zero = true;
        if (circle_dist(a, Angle(-kPi)) < 1e-3) near_antipode = true;
    }
    CHECK(near_zero);
    CHECK(near_antipode);

    GridOracleResult r3 = grid_oracle_mean(make_sample({0.5}), 100000);
    CHECK(circle_dist(r3.argmin.front(), Angle(0.5)) <= kTwoPi / 100000);
}

TEST_CASE("exact mean agrees with the grid oracle on random samples") {
    Rng rng(23);
    const std::size_t grid = 20000;
    std::vector<DistributionSpec> families{
        VonMisesMixture{3.0, 0.5, 0.5, 0.0}, PowerSmeary{1.0},
        PiecewiseAtom{{1.0, 2.0}, {0.8, 0.3}}, UniformInterval{2.0}};
    for (int rep = 0; rep < 60; ++rep) {
        const DistributionSpec& spec = families[rep % families.size()];
        CircleSample s = sample(spec, 2 + rng.uniform_index(19), rng);
        MeanResult mr = frechet_mean_circle(s, rng);
        GridOracleResult oracle = grid_oracle_mean(s, grid);
        double best = kPi;
        for (const Angle& a : oracle.argmin) {
            best = std::min(best, circle_dist(a, mr.mean));
        }
        CHECK(best <= kTwoPi / grid);
    }
}
