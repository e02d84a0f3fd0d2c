#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "circfss/distributions.hpp"
#include "circfss/fss.hpp"

using namespace circfss;

namespace {

CircleSample make_sample(std::initializer_list<double> xs) {
    CircleSample s;
    for (double x : xs) s.points.emplace_back(x);
    return s;
}

std::vector<Angle> make_angles(std::initializer_list<double> xs) {
    std::vector<Angle> v;
    for (double x : xs) v.emplace_back(x);
    return v;
}

}  // namespace

TEST_CASE("bootstrap means of a singleton collapse") {
    Rng rng(1);
    auto means = bootstrap_means(make_sample({0.5}), 3, rng);
    REQUIRE(means.size() == 3);
    for (const Angle& m : means) CHECK(m == Angle(0.5));
}

TEST_CASE("bootstrap means are deterministic under a fixed seed") {
    CircleSample s = make_sample({0.1, -0.4, 1.2, 0.9, -0.2});
    Rng a(42), b(42);
    auto m1 = bootstrap_means(s, 50, a);
    auto m2 = bootstrap_means(s, 50, b);
    REQUIRE(m1.size() == m2.size());
    for (std::size_t i = 0; i < m1.size(); ++i) CHECK(m1[i] == m2[i]);
    // half-circle sample: every bootstrap mean stays in the data's hull
    for (const Angle& m : m1) {
        CHECK(m.radians() >= -0.4);
        CHECK(m.radians() <= 1.2);
    }
}

TEST_CASE("bootstrap moments arithmetic") {
    Rng rng(2);
    BootstrapMoments bm = bootstrap_moments(make_angles({-0.1, 0.0, 0.1}), rng);
    CHECK(bm.B == 3);
    CHECK(bm.mean_of_means == Angle(0.0));
    CHECK(bm.v_star == doctest::Approx(0.02 / 3).epsilon(1e-12));
    CHECK(bm.w_star == doctest::Approx(2e-4 / 3).epsilon(1e-12));

    BootstrapMoments degenerate = bootstrap_moments(make_angles({0.7, 0.7, 0.7}), rng);
    CHECK(degenerate.v_star == 0.0);
    CHECK(degenerate.w_star == 0.0);

    BootstrapMoments wrapped =
        bootstrap_moments(make_angles({kPi - 0.1, -kPi + 0.1}), rng);
    CHECK(wrapped.v_star == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("w_star dominates v_star squared") {
    Rng rng(3);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<Angle> means;
        std::size_t B = 2 + rng.uniform_index(30);
        for (std::size_t b = 0; b < B; ++b) means.emplace_back(rng.uniform(-kPi, kPi));
        BootstrapMoments bm = bootstrap_moments(std::move(means), rng);
        CHECK(bm.w_star >= bm.v_star * bm.v_star - 1e-12);
    }
}

TEST_CASE("fss scale arithmetic and errors") {
    CHECK(fss_scale(0.02, 0.5, 100) == doctest::Approx(4.0));
    CHECK_THROWS_AS(fss_scale(0.02, 0.0, 100), std::invalid_argument);
}

TEST_CASE("fss test rejects degenerate samples") {
    Rng rng(4);
    CHECK_THROWS_AS(fss_test(make_sample({0.3, 0.3, 0.3}), 100, 0.05, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(fss_test(make_sample({0.1, 0.2}), 99, 0.05, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(fss_test(make_sample({0.1, 0.2}), 100, 0.0, rng),
                    std::invalid_argument);
}

TEST_CASE("fss scale is rotation invariant") {
    Rng base_rng(5);
    CircleSample s = sample(VonMisesMixture{3.0, 0.5, 0.5, 0.0}, 60, base_rng);
    Rng r1(9), r2(9);
    FssReport plain = fss_test(s, 200, 0.05, r1);
    CircleSample rotated;
    for (const Angle& x : s.points) rotated.points.emplace_back(x.radians() + 1.234);
    FssReport rot = fss_test(rotated, 200, 0.05, r2);
    CHECK(rot.scale == doctest::Approx(plain.scale).epsilon(1e-9));
    CHECK(rot.threshold == doctest::Approx(plain.threshold).epsilon(1e-9));
}

TEST_CASE("fss test detects strong finite sample smeariness") {
    Rng gen(6);
    CircleSample s = sample(VonMisesMixture{3.0, 0.5, 0.5, 0.0}, 100, gen);
    Rng rng(7);
    FssReport rep = fss_test(s, 1000, 0.05, rng);
    CHECK(rep.scale > 3.0);
    CHECK(rep.reject_absence);
    CHECK(rep.p_value == doctest::Approx(1e-3));

    nlohmann::json j = fss_report_to_json(rep);
    CHECK(j["n"] == 100);
    CHECK(j["B"] == 1000);
    CHECK(j["reject"] == true);
}

TEST_CASE("fss scale hovers near one without smeariness") {
    Rng gen(8);
    double acc = 0.0;
    const int reps = 50;
    for (int i = 0; i < reps; ++i) {
        CircleSample s = sample(UniformInterval{0.5}, 100, gen);
        MeanResult mr = frechet_mean_circle(s, gen);
        BootstrapMoments bm = bootstrap_moments(bootstrap_means(s, 400, gen), gen);
        acc += fss_scale(bm.v_star, mr.frechet_variance, 100);
    }
    CHECK(acc / reps == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("fss window classification") {
    std::vector<std::pair<std::size_t, double>> power_law;
    for (std::size_t n : {10, 20, 40, 80, 160, 320, 640}) {
        power_law.emplace_back(n, 0.3 * std::sqrt(static_cast<double>(n)));
    }
    auto w = classify_fss_window(power_law);
    REQUIRE(w.has_value());
    CHECK(w->r_minus == doctest::Approx(1.0).epsilon(0.05));
    CHECK(w->r_plus == doctest::Approx(1.0).epsilon(0.05));
    CHECK(w->n_minus == 10);
    CHECK(w->n_plus == 640);

    std::vector<std::pair<std::size_t, double>> flat{
        {10, 0.5}, {20, 0.5}, {40, 0.5}, {80, 0.5}, {160, 0.5}};
    CHECK(!classify_fss_window(flat).has_value());

    CHECK_THROWS_AS(classify_fss_window({{10, 1.0}, {20, 2.0}, {30, 3.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(classify_fss_window({{10, 1.0}, {10, 2.0}, {30, 3.0}, {40, 4.0}}),
                    std::invalid_argument);
}
