#include <doctest.h>

#include <cmath>
#include <sstream>

#include "circfss/distributions.hpp"
#include "circfss/windpipe.hpp"

using namespace circfss;

namespace {

ParsedWind parse(const std::string& text) {
    std::istringstream is(text);
    return parse_wind_csv(is);
}

std::string day_row(int year, int month, int day, double deg) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT12:00:00Z,%.6f\n", year, month, day,
                  deg);
    return buf;
}

}  // namespace

TEST_CASE("wind csv parsing") {
    ParsedWind one = parse("timestamp,direction_deg\n2018-07-01T12:00:00Z,90.0\n");
    REQUIRE(one.records.size() == 1);
    CHECK(one.records[0].direction.radians() == doctest::Approx(kPi / 2).epsilon(1e-12));
    CHECK(one.skipped_rows == 0);

    ParsedWind out_of_range = parse(
        "timestamp,direction_deg\n"
        "2018-07-01T00:00:00Z,360.0\n"
        "2018-07-01T01:00:00Z,-5.0\n"
        "2018-07-01T02:00:00Z,\n"
        "2018-07-01T03:00:00Z,abc\n"
        "2018-07-01T04:00:00Z,359.9\n");
    CHECK(out_of_range.records.size() == 1);
    CHECK(out_of_range.skipped_rows == 4);

    CHECK_THROWS(parse("timestamp,direction_deg\n"));          // header only
    CHECK_THROWS(parse("time,direction_deg\n1,2\n"));          // missing column
    CHECK_THROWS(parse(""));                                    // empty stream

    ParsedWind with_station =
        parse("timestamp,direction_deg,station_id\n2018-07-01T12:00:00Z,10.0,basel\n");
    CHECK(with_station.records[0].station_id == "basel");
}

TEST_CASE("daily means group by utc day") {
    std::string csv = "timestamp,direction_deg\n";
    csv += "2018-03-01T06:00:00Z,10.0\n";
    csv += "2018-03-01T18:00:00Z,20.0\n";
    csv += "2018-03-02T12:00:00Z,50.0\n";
    ParsedWind pw = parse(csv);
    Rng rng(1);
    YearlySample ys = daily_means(pw.records, 2018, rng);
    REQUIRE(ys.daily_means.size() == 2);
    CHECK(ys.daily_means.points[0].degrees() == doctest::Approx(15.0).epsilon(1e-9));
    CHECK(ys.daily_means.points[1].degrees() == doctest::Approx(50.0).epsilon(1e-9));
    CHECK(ys.year == 2018);
}

TEST_CASE("tied daily mean resolves deterministically under a seed") {
    std::string csv = "timestamp,direction_deg\n";
    csv += "2018-03-01T06:00:00Z,90.0\n";
    csv += "2018-03-01T18:00:00Z,270.0\n";
    ParsedWind pw = parse(csv);
    Rng r1(5), r2(5);
    YearlySample a = daily_means(pw.records, 2018, r1);
    YearlySample b = daily_means(pw.records, 2018, r2);
    REQUIRE(a.daily_means.size() == 1);
    double v = a.daily_means.points[0].radians();
    CHECK((v == doctest::Approx(0.0) || v == doctest::Approx(-kPi)));
    CHECK(a.daily_means.points[0] == b.daily_means.points[0]);
}

TEST_CASE("full-year synthetic sample has one entry per day") {
    std::string csv = "timestamp,direction_deg\n";
    // non-leap year, one record per day
    int days_in_month[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    for (int m = 1; m <= 12; ++m) {
        for (int d = 1; d <= days_in_month[m - 1]; ++d) {
            csv += day_row(2018, m, d, 10.0 + (m + d) % 40);
        }
    }
    ParsedWind pw = parse(csv);
    Rng rng(2);
    YearlySample ys = daily_means(pw.records, 2018, rng);
    CHECK(ys.daily_means.size() == 365);

    auto years = yearly_samples(pw.records, rng);
    REQUIRE(years.size() == 1);
    CHECK(years[0].year == 2018);
}

TEST_CASE("pairwise matrix on identical years accepts everywhere") {
    std::vector<YearlySample> years;
    for (int y = 2000; y < 2004; ++y) {
        YearlySample ys;
        ys.year = y;
        Rng gen(77);  // same seed: identical samples
        ys.daily_means = sample(VonMisesMixture{3.0, 1.0, 0.0, 0.0}, 40, gen);
        years.push_back(std::move(ys));
    }
    Rng rng(3);
    PairwiseMatrix m = yearly_pairwise_matrix(years, TestMethod::quantile, 0.05, 100, rng);
    REQUIRE(m.years.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            CHECK(!m.reject[m.index(i, j)]);
            CHECK(m.raw_p[m.index(i, j)] == m.raw_p[m.index(j, i)]);
        }
    }
}

TEST_CASE("a shifted year is singled out") {
    std::vector<YearlySample> years;
    Rng gen(11);
    for (int y = 2000; y < 2005; ++y) {
        YearlySample ys;
        ys.year = y;
        ys.daily_means = sample(VonMisesMixture{3.0, 1.0, 0.0, 0.0}, 60, gen);
        if (y == 2002) {
            for (Angle& a : ys.daily_means.points) a = Angle(a.radians() + kPi);
        }
        years.push_back(std::move(ys));
    }
    Rng rng(4);
    PairwiseMatrix m = yearly_pairwise_matrix(years, TestMethod::bootstrap, 0.05, 200, rng);
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = i + 1; j < 5; ++j) {
            bool planted = (i == 2) != (j == 2);
            CHECK(static_cast<bool>(m.reject[m.index(i, j)]) == planted);
        }
    }
}

TEST_CASE("fss by year flags smeary samples and is deterministic") {
    std::vector<YearlySample> years(2);
    Rng gen(21);
    years[0].year = 2000;
    years[0].daily_means = sample(VonMisesMixture{3.0, 0.5, 0.5, 0.0}, 100, gen);
    years[1].year = 2001;
    years[1].daily_means = sample(UniformInterval{0.5}, 100, gen);

    Rng r1(6), r2(6);
    auto rows1 = fss_by_year(years, 1000, 0.05, r1);
    auto rows2 = fss_by_year(years, 1000, 0.05, r2);
    REQUIRE(rows1.size() == 2);
    CHECK(rows1[0].p_value == doctest::Approx(1e-3));
    CHECK(rows1[0].reject_absence);
    CHECK(rows1[1].scale == doctest::Approx(1.0).epsilon(0.5));
    CHECK(!rows1[1].reject_absence);
    for (std::size_t i = 0; i < rows1.size(); ++i) {
        CHECK(rows1[i].scale == rows2[i].scale);
        CHECK(rows1[i].p_value == rows2[i].p_value);
    }
}

TEST_CASE("station pairing keeps only shared days") {
    std::string csv_a = "timestamp,direction_deg\n";
    csv_a += "2018-03-01T12:00:00Z,10.0\n";
    csv_a += "2018-03-02T12:00:00Z,20.0\n";
    csv_a += "2018-03-03T12:00:00Z,30.0\n";
    std::string csv_b = "timestamp,direction_deg\n";
    csv_b += "2018-03-02T12:00:00Z,40.0\n";
    csv_b += "2018-03-03T12:00:00Z,50.0\n";
    csv_b += "2018-03-04T12:00:00Z,60.0\n";
    ParsedWind a = parse(csv_a), b = parse(csv_b);
    Rng rng(7);
    auto paired = pair_stations(a.records, b.records, {2018}, rng);
    REQUIRE(paired.size() == 1);
    REQUIRE(paired[0].size() == 2);
    CHECK(paired[0][0].dim() == 2);
    CHECK(paired[0][0][0].degrees() == doctest::Approx(20.0).epsilon(1e-9));
    CHECK(paired[0][0][1].degrees() == doctest::Approx(40.0).epsilon(1e-9));
}

TEST_CASE("matrix csv writers") {
    PairwiseMatrix m;
    m.years = {2000, 2001};
    m.raw_p = {1.0, 0.5, 0.5, 1.0};
    m.adjusted_p = {1.0, 0.5, 0.5, 1.0};
    m.reject = {0, 1, 1, 0};
    std::ostringstream raw, rej;
    write_pairs_raw_csv(m, raw);
    CHECK(raw.str() == "year,2000,2001\n2000,,0.5\n2001,0.5,\n");
    write_pairs_reject_csv(m, rej);
    CHECK(rej.str() == "year,2000,2001\n2000,,1\n2001,1,\n");
}
