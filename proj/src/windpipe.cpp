#include "circfss/windpipe.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace circfss {

namespace {

// Days since 1970-01-01 of a proleptic Gregorian date (Hinnant's algorithm).
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const auto doy = static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<int>(yoe) + static_cast<int>(era) * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y += m <= 2;
}

bool parse_iso8601(const std::string& text, std::int64_t& epoch) {
    int y, mo, d, h, mi, s;
    char tail = '\0';
    int fields = std::sscanf(text.c_str(), "%d-%d-%dT%d:%d:%d%c",
                             &y, &mo, &d, &h, &mi, &s, &tail);
    if (fields < 6) return false;
    if (fields == 7 && tail != 'Z') return false;
    if (mo < 1 || mo > 12 || d < 1 || d > 31) return false;
    if (h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 60) return false;
    epoch = days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + s;
    return true;
}

int utc_year(std::int64_t epoch) {
    int y;
    unsigned m, d;
    std::int64_t days = epoch / 86400;
    if (epoch < 0 && epoch % 86400 != 0) --days;
    civil_from_days(days, y, m, d);
    return y;
}

std::int64_t utc_day(std::int64_t epoch) {
    std::int64_t days = epoch / 86400;
    if (epoch < 0 && epoch % 86400 != 0) --days;
    return days;
}

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string trimmed(std::string s) {
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

/// Daily-mean angles per UTC day for one year of records.
std::map<std::int64_t, Angle> day_means_map(const std::vector<WindRecord>& records,
                                            int year, Rng& rng, std::size_t min_count) {
    std::map<std::int64_t, CircleSample> by_day;
    for (const WindRecord& r : records) {
        if (utc_year(r.epoch_seconds) == year) {
            by_day[utc_day(r.epoch_seconds)].points.push_back(r.direction);
        }
    }
    std::map<std::int64_t, Angle> means;
    for (auto& [day, points] : by_day) {
        if (points.size() < min_count) continue;
        means.emplace(day, frechet_mean_circle(points, rng).mean);
    }
    return means;
}

PairwiseMatrix pairwise_core(const std::vector<int>& years,
                             const std::vector<TorusSample>& samples,
                             TestMethod method, double alpha, std::size_t B, Rng& rng) {
    std::vector<int> kept_years;
    std::vector<const TorusSample*> kept;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].size() < 2) {
            std::cerr << "warning: year " << years[i]
                      << " has fewer than 2 days of data, skipped\n";
            continue;
        }
        kept_years.push_back(years[i]);
        kept.push_back(&samples[i]);
    }
    const std::size_t y = kept.size();
    if (y < 2) throw std::invalid_argument("pairwise matrix: need >= 2 usable years");

    PairwiseMatrix m;
    m.years = kept_years;
    m.method = method;
    m.alpha = alpha;
    m.raw_p.assign(y * y, 1.0);
    m.adjusted_p.assign(y * y, 1.0);
    m.reject.assign(y * y, 0);

    const std::uint64_t base = rng.next_u64();
    std::vector<double> p_values;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < y; ++i) {
        for (std::size_t j = i + 1; j < y; ++j) {
            TestOutcome out;
            if (method == TestMethod::quantile) {
                out = quantile_two_sample(*kept[i], *kept[j], alpha);
            } else {
                Rng child = Rng::derive(base, i, j);
                out = bootstrap_two_sample(*kept[i], *kept[j], alpha, B, child);
            }
            m.raw_p[m.index(i, j)] = m.raw_p[m.index(j, i)] = out.p_value;
            p_values.push_back(out.p_value);
            pairs.emplace_back(i, j);
        }
    }
    BhResult bh = bh_adjust(p_values, alpha);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        auto [i, j] = pairs[k];
        m.adjusted_p[m.index(i, j)] = m.adjusted_p[m.index(j, i)] = bh.adjusted_p[k];
        m.reject[m.index(i, j)] = m.reject[m.index(j, i)] = bh.reject[k] ? 1 : 0;
    }
    return m;
}

void write_matrix_csv(const PairwiseMatrix& m, std::ostream& os,
                      const std::function<void(std::size_t, std::size_t)>& cell) {
    os << "year";
    for (int year : m.years) os << ',' << year;
    os << '\n';
    for (std::size_t i = 0; i < m.years.size(); ++i) {
        os << m.years[i];
        for (std::size_t j = 0; j < m.years.size(); ++j) {
            os << ',';
            cell(i, j);
        }
        os << '\n';
    }
}

}  // namespace

ParsedWind parse_wind_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) {
        throw std::runtime_error("wind csv: empty input");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> header = split_csv_row(line);
    for (std::string& h : header) h = trimmed(h);
    auto column = [&](const std::string& name) -> std::ptrdiff_t {
        auto it = std::find(header.begin(), header.end(), name);
        return it == header.end() ? -1 : it - header.begin();
    };
    const std::ptrdiff_t ts_col = column("timestamp");
    const std::ptrdiff_t dir_col = column("direction_deg");
    const std::ptrdiff_t station_col = column("station_id");
    if (ts_col < 0 || dir_col < 0) {
        throw std::runtime_error(
            "wind csv: header must contain timestamp and direction_deg columns");
    }

    ParsedWind out;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trimmed(line).empty()) continue;
        std::vector<std::string> fields = split_csv_row(line);
        const auto needed = static_cast<std::size_t>(std::max(ts_col, dir_col)) + 1;
        if (fields.size() < needed) {
            ++out.skipped_rows;
            continue;
        }
        WindRecord rec;
        if (!parse_iso8601(trimmed(fields[static_cast<std::size_t>(ts_col)]),
                           rec.epoch_seconds)) {
            ++out.skipped_rows;
            continue;
        }
        const std::string dir_text = trimmed(fields[static_cast<std::size_t>(dir_col)]);
        char* end = nullptr;
        const double deg = std::strtod(dir_text.c_str(), &end);
        if (dir_text.empty() || end != dir_text.c_str() + dir_text.size() ||
            !std::isfinite(deg) || deg < 0.0 || deg >= 360.0) {
            ++out.skipped_rows;
            continue;
        }
        rec.direction = Angle(deg * kPi / 180.0);
        if (station_col >= 0 && fields.size() > static_cast<std::size_t>(station_col)) {
            rec.station_id = trimmed(fields[static_cast<std::size_t>(station_col)]);
        }
        out.records.push_back(std::move(rec));
    }
    if (out.records.empty()) {
        throw std::runtime_error("wind csv: no valid data rows");
    }
    return out;
}

ParsedWind parse_wind_csv_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("wind csv: cannot open " + path);
    return parse_wind_csv(is);
}

YearlySample daily_means(const std::vector<WindRecord>& records, int year, Rng& rng,
                         std::size_t min_count) {
    YearlySample out;
    out.year = year;
    if (!records.empty()) out.station_id = records.front().station_id;
    for (const auto& [day, mean] : day_means_map(records, year, rng, min_count)) {
        out.daily_means.points.push_back(mean);
    }
    return out;
}

std::vector<YearlySample> yearly_samples(const std::vector<WindRecord>& records,
                                         Rng& rng, std::size_t min_count) {
    std::vector<int> years;
    for (const WindRecord& r : records) years.push_back(utc_year(r.epoch_seconds));
    std::sort(years.begin(), years.end());
    years.erase(std::unique(years.begin(), years.end()), years.end());

    std::vector<YearlySample> out;
    for (int year : years) {
        YearlySample s = daily_means(records, year, rng, min_count);
        if (!s.daily_means.points.empty()) out.push_back(std::move(s));
    }
    return out;
}

std::vector<TorusSample> pair_stations(const std::vector<WindRecord>& records_a,
                                       const std::vector<WindRecord>& records_b,
                                       const std::vector<int>& years, Rng& rng,
                                       std::size_t min_count) {
    std::vector<TorusSample> out;
    for (int year : years) {
        auto means_a = day_means_map(records_a, year, rng, min_count);
        auto means_b = day_means_map(records_b, year, rng, min_count);
        TorusSample paired;
        for (const auto& [day, a] : means_a) {
            auto it = means_b.find(day);
            if (it != means_b.end()) paired.push_back(TorusPoint{{a, it->second}});
        }
        out.push_back(std::move(paired));
    }
    return out;
}

PairwiseMatrix yearly_pairwise_matrix(const std::vector<YearlySample>& samples,
                                      TestMethod method, double alpha, std::size_t B,
                                      Rng& rng) {
    std::vector<int> years;
    std::vector<TorusSample> lifted;
    for (const YearlySample& s : samples) {
        years.push_back(s.year);
        TorusSample t;
        t.reserve(s.daily_means.size());
        for (const Angle& a : s.daily_means.points) t.push_back(TorusPoint{{a}});
        lifted.push_back(std::move(t));
    }
    return pairwise_core(years, lifted, method, alpha, B, rng);
}

PairwiseMatrix yearly_pairwise_matrix(const std::vector<int>& years,
                                      const std::vector<TorusSample>& samples,
                                      TestMethod method, double alpha, std::size_t B,
                                      Rng& rng) {
    if (years.size() != samples.size()) {
        throw std::invalid_argument("pairwise matrix: years/samples size mismatch");
    }
    return pairwise_core(years, samples, method, alpha, B, rng);
}

std::vector<YearFssRow> fss_by_year(const std::vector<YearlySample>& samples,
                                    std::size_t B, double alpha, Rng& rng) {
    const std::uint64_t base = rng.next_u64();
    std::vector<YearFssRow> rows;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        Rng child = Rng::derive(base, 0, i);
        FssReport rep = fss_test(samples[i].daily_means, B, alpha, child);
        rows.push_back(YearFssRow{samples[i].year, rep.n, rep.scale, rep.p_value,
                                  rep.reject_absence});
    }
    return rows;
}

void write_fss_table_csv(const std::vector<YearFssRow>& rows, std::ostream& os) {
    os.precision(12);
    os << "year,n,scale,p,reject\n";
    for (const YearFssRow& r : rows) {
        os << r.year << ',' << r.n << ',' << r.scale << ',' << r.p_value << ','
           << (r.reject_absence ? 1 : 0) << '\n';
    }
}

void write_pairs_raw_csv(const PairwiseMatrix& m, std::ostream& os) {
    os.precision(12);
    write_matrix_csv(m, os, [&](std::size_t i, std::size_t j) {
        if (i != j) os << m.raw_p[m.index(i, j)];
    });
}

void write_pairs_bh_csv(const PairwiseMatrix& m, std::ostream& os) {
    os.precision(12);
    write_matrix_csv(m, os, [&](std::size_t i, std::size_t j) {
        if (i != j) os << m.adjusted_p[m.index(i, j)];
    });
}

void write_pairs_reject_csv(const PairwiseMatrix& m, std::ostream& os) {
    write_matrix_csv(m, os, [&](std::size_t i, std::size_t j) {
        if (i != j) os << (m.reject[m.index(i, j)] ? 1 : 0);
    });
}

}  // namespace circfss
