#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "circfss/fss.hpp"
#include "circfss/inference.hpp"

namespace circfss {

struct WindRecord {
    std::int64_t epoch_seconds = 0;  // UTC instant
    Angle direction;                 // wrap(direction_deg * pi / 180)
    std::string station_id;
};

struct ParsedWind {
    std::vector<WindRecord> records;
    std::size_t skipped_rows = 0;  // missing or unparseable direction values
};

/// Reads `timestamp,direction_deg[,station_id]` CSV rows. Timestamps are
/// ISO-8601 UTC instants; directions must lie in [0, 360). Throws on a
/// missing header column or when no valid row remains.
ParsedWind parse_wind_csv(std::istream& is);
ParsedWind parse_wind_csv_file(const std::string& path);

struct YearlySample {
    std::string station_id;
    int year = 0;
    CircleSample daily_means;  // one angle per calendar day with data
};

/// Groups records by UTC calendar day and takes the circle mean of each
/// day's directions. Days with fewer than min_count records are dropped.
YearlySample daily_means(const std::vector<WindRecord>& records, int year, Rng& rng,
                         std::size_t min_count = 1);

/// All yearly samples present in the records of one station, in year order.
std::vector<YearlySample> yearly_samples(const std::vector<WindRecord>& records,
                                         Rng& rng, std::size_t min_count = 1);

/// Joint sample over two stations: for each UTC day present at both, the
/// pair of daily means as a point on the 2-torus.
std::vector<TorusSample> pair_stations(const std::vector<WindRecord>& records_a,
                                       const std::vector<WindRecord>& records_b,
                                       const std::vector<int>& years, Rng& rng,
                                       std::size_t min_count = 1);

struct PairwiseMatrix {
    std::vector<int> years;
    /// Row-major Y x Y matrices; diagonal entries are 1 (raw/adjusted) and
    /// false (reject), off-diagonal entries are symmetric.
    std::vector<double> raw_p;
    std::vector<double> adjusted_p;
    std::vector<std::uint8_t> reject;
    TestMethod method = TestMethod::quantile;
    double alpha = 0.05;

    std::size_t index(std::size_t i, std::size_t j) const { return i * years.size() + j; }
};

/// Two-sample test on every year pair followed by a Benjamini-Hochberg
/// correction over the Y(Y-1)/2 p-values. Years with < 2 days are skipped.
PairwiseMatrix yearly_pairwise_matrix(const std::vector<YearlySample>& samples,
                                      TestMethod method, double alpha, std::size_t B,
                                      Rng& rng);

/// Torus variant for two paired stations (dimension k = 2); samples[i] is
/// the paired-day sample for years[i].
PairwiseMatrix yearly_pairwise_matrix(const std::vector<int>& years,
                                      const std::vector<TorusSample>& samples,
                                      TestMethod method, double alpha, std::size_t B,
                                      Rng& rng);

struct YearFssRow {
    int year = 0;
    std::size_t n = 0;
    double scale = 0.0;
    double p_value = 1.0;
    bool reject_absence = false;
};

/// FSS significance test per yearly sample.
std::vector<YearFssRow> fss_by_year(const std::vector<YearlySample>& samples,
                                    std::size_t B, double alpha, Rng& rng);

void write_fss_table_csv(const std::vector<YearFssRow>& rows, std::ostream& os);
void write_pairs_raw_csv(const PairwiseMatrix& m, std::ostream& os);
void write_pairs_bh_csv(const PairwiseMatrix& m, std::ostream& os);
void write_pairs_reject_csv(const PairwiseMatrix& m, std::ostream& os);

}  // namespace circfss
