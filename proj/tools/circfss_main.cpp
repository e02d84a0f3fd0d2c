#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "circfss/fss.hpp"
#include "circfss/inference.hpp"
#include "circfss/parallel.hpp"
#include "circfss/simlab.hpp"
#include "circfss/windpipe.hpp"

namespace {

using nlohmann::json;

std::vector<circfss::Angle> read_angle_csv(const std::string& path, bool degrees) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::vector<circfss::Angle> angles;
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        char* end = nullptr;
        double v = std::strtod(line.c_str(), &end);
        if (end == line.c_str()) {
            if (angles.empty()) continue;  // header row
            throw std::runtime_error("unparseable angle row in " + path + ": " + line);
        }
        if (degrees) v *= circfss::kPi / 180.0;
        angles.emplace_back(v);
    }
    if (angles.empty()) throw std::runtime_error("no angles found in " + path);
    return angles;
}

json read_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    return json::parse(is);
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot write " + tmp);
        os << content;
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        throw std::runtime_error("cannot move " + tmp + " to " + path);
    }
}

std::string iso_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

struct ManifestWriter {
    std::string subcommand;
    json config = json::object();
    std::uint64_t seed = 0;
    std::string start_time = iso_now();
    std::vector<std::string> outputs;
    std::string path;  // empty disables

    void finish() const {
        if (path.empty()) return;
        json m{{"subcommand", subcommand}, {"config", config},  {"seed", seed},
               {"start_time", start_time}, {"end_time", iso_now()},
               {"outputs", outputs}};
        write_file_atomic(path, m.dump(2) + "\n");
    }
};

circfss::TestMethod parse_method(const std::string& name) {
    if (name == "quantile") return circfss::TestMethod::quantile;
    if (name == "bootstrap") return circfss::TestMethod::bootstrap;
    throw std::invalid_argument("--method must be quantile or bootstrap");
}

struct CommonOpts {
    std::uint64_t seed = 1;
    double alpha = 0.05;
    std::size_t bootstrap_b = 1000;
    unsigned workers = 0;  // 0 -> default_workers()
    bool degrees = false;

    unsigned effective_workers() const {
        return workers > 0 ? workers : circfss::default_workers();
    }
};

void add_common(CLI::App* cmd, CommonOpts& o, bool stochastic = true) {
    if (stochastic) cmd->add_option("--seed", o.seed, "master rng seed");
    cmd->add_option("--alpha", o.alpha, "significance level");
    cmd->add_option("--bootstrap", o.bootstrap_b, "bootstrap replicate count B");
    cmd->add_option("--workers", o.workers, "worker thread bound (0 = auto)");
    cmd->add_flag("--degrees", o.degrees, "angles in input files are degrees");
}

void emit(const json& j) { std::cout << j.dump(2) << '\n'; }

int run(int argc, char** argv) {
    CLI::App app{"circular statistics toolkit: intrinsic means, finite sample "
                 "smeariness diagnostics, mean tests, simulations, wind pipeline"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string in_path, in2_path, out_prefix, config_path, manifest_path;
    double mu0 = 0.0;
    std::string method_name = "quantile";

    auto* mean_cmd = app.add_subcommand("mean", "intrinsic mean of a CSV of angles");
    mean_cmd->add_option("--in", in_path, "input CSV, one angle per row")->required();
    add_common(mean_cmd, opts);

    auto* fss_cmd = app.add_subcommand(
        "fss", "finite sample smeariness significance test on a CSV sample");
    fss_cmd->add_option("--in", in_path)->required();
    add_common(fss_cmd, opts);

    auto* t1_cmd = app.add_subcommand("test1", "one-sample mean test");
    t1_cmd->add_option("--in", in_path)->required();
    t1_cmd->add_option("--mu0", mu0, "hypothesized mean (radians or --degrees)");
    t1_cmd->add_option("--method", method_name, "quantile or bootstrap");
    add_common(t1_cmd, opts);

    auto* t2_cmd = app.add_subcommand("test2", "two-sample mean test");
    t2_cmd->add_option("--in", in_path)->required();
    t2_cmd->add_option("--in2", in2_path)->required();
    t2_cmd->add_option("--method", method_name, "quantile or bootstrap");
    add_common(t2_cmd, opts);

    auto* sim = app.add_subcommand("simulate", "Monte Carlo experiments");
    sim->require_subcommand(1);
    auto* sim_vc = sim->add_subcommand("variance-curve", "scaled variance vs n");
    auto* sim_sp = sim->add_subcommand("size-power", "rejection frequency table");
    auto* sim_ft = sim->add_subcommand("fss-table", "median FSS scale table");
    auto* sim_ls = sim->add_subcommand("log-smeary", "log-smeary large-n summary");
    double ls_r = 1.0;
    std::size_t ls_n = 1000000, ls_reps = 200;
    for (CLI::App* c : {sim_vc, sim_sp, sim_ft}) {
        c->add_option("--config", config_path, "experiment config JSON")->required();
        c->add_option("--out", out_prefix, "output CSV path")->required();
        add_common(c, opts);
    }
    sim_ls->add_option("--r", ls_r, "smeariness order");
    sim_ls->add_option("--n", ls_n, "sample size (>= 10^4)");
    sim_ls->add_option("--reps", ls_reps, "replications");
    add_common(sim_ls, opts);

    auto* wind = app.add_subcommand("wind", "wind-direction pipeline");
    wind->require_subcommand(1);
    auto* wind_fss = wind->add_subcommand("fss", "per-year FSS table");
    auto* wind_pairs = wind->add_subcommand("pairs", "pairwise year test matrices");
    for (CLI::App* c : {wind_fss, wind_pairs}) {
        c->add_option("--in", in_path, "wind records CSV")->required();
        c->add_option("--out", out_prefix, "output path prefix")->required();
        add_common(c, opts);
    }
    wind_pairs->add_option("--method", method_name, "quantile or bootstrap");

    for (CLI::App* c : {mean_cmd, fss_cmd, t1_cmd, t2_cmd, sim_vc, sim_sp, sim_ft,
                        sim_ls, wind_fss, wind_pairs}) {
        c->add_option("--manifest", manifest_path, "run manifest JSON path");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    ManifestWriter manifest;
    manifest.seed = opts.seed;
    manifest.path = manifest_path;
    circfss::Rng rng(opts.seed);

    if (mean_cmd->parsed()) {
        manifest.subcommand = "mean";
        circfss::CircleSample s(read_angle_csv(in_path, opts.degrees));
        circfss::MeanResult mr = circfss::frechet_mean_circle(s, rng);
        emit(json{{"mean", mr.mean.radians()},
                  {"ties", mr.tied_minimizers.size()},
                  {"variance", mr.frechet_variance}});
    } else if (fss_cmd->parsed()) {
        manifest.subcommand = "fss";
        circfss::CircleSample s(read_angle_csv(in_path, opts.degrees));
        emit(circfss::fss_report_to_json(
            circfss::fss_test(s, opts.bootstrap_b, opts.alpha, rng)));
    } else if (t1_cmd->parsed()) {
        manifest.subcommand = "test1";
        circfss::CircleSample s(read_angle_csv(in_path, opts.degrees));
        circfss::Angle target(opts.degrees ? mu0 * circfss::kPi / 180.0 : mu0);
        circfss::TestOutcome out =
            parse_method(method_name) == circfss::TestMethod::quantile
                ? circfss::quantile_one_sample(s, target, opts.alpha)
                : circfss::bootstrap_one_sample(s, target, opts.alpha,
                                                opts.bootstrap_b, rng);
        emit(circfss::test_outcome_to_json(out));
    } else if (t2_cmd->parsed()) {
        manifest.subcommand = "test2";
        circfss::CircleSample x(read_angle_csv(in_path, opts.degrees));
        circfss::CircleSample y(read_angle_csv(in2_path, opts.degrees));
        circfss::TestOutcome out =
            parse_method(method_name) == circfss::TestMethod::quantile
                ? circfss::quantile_two_sample(x, y, opts.alpha)
                : circfss::bootstrap_two_sample(x, y, opts.alpha, opts.bootstrap_b,
                                                rng);
        emit(circfss::test_outcome_to_json(out));
    } else if (sim_vc->parsed()) {
        manifest.subcommand = "simulate variance-curve";
        json cfg = read_json_file(config_path);
        manifest.config = cfg;
        circfss::DistributionSpec spec = circfss::spec_from_json(cfg.at("spec"));
        auto n_grid = cfg.at("n_grid").get<std::vector<std::size_t>>();
        auto reps = cfg.value("replications", std::size_t{2000});
        circfss::VarianceCurve curve = circfss::variance_curve(
            spec, n_grid, reps, rng, opts.effective_workers());
        std::ostringstream os;
        circfss::write_variance_curve_csv(curve, os);
        write_file_atomic(out_prefix, os.str());
        manifest.outputs.push_back(out_prefix);
    } else if (sim_sp->parsed()) {
        manifest.subcommand = "simulate size-power";
        json cfg = read_json_file(config_path);
        manifest.config = cfg;
        circfss::SizePowerConfig config = circfss::size_power_config_from_json(cfg);
        config.seed = opts.seed;
        config.workers = opts.effective_workers();
        std::ostringstream os;
        circfss::write_size_power_csv(circfss::size_power_curve(config), os);
        write_file_atomic(out_prefix, os.str());
        manifest.outputs.push_back(out_prefix);
    } else if (sim_ft->parsed()) {
        manifest.subcommand = "simulate fss-table";
        json cfg = read_json_file(config_path);
        manifest.config = cfg;
        std::vector<circfss::DistributionSpec> specs;
        for (const json& sj : cfg.at("specs")) specs.push_back(circfss::spec_from_json(sj));
        auto n_list = cfg.at("n_list").get<std::vector<std::size_t>>();
        auto b = cfg.value("B", opts.bootstrap_b);
        auto reps = cfg.value("replications", std::size_t{50});
        std::ostringstream os;
        circfss::write_fss_scale_csv(
            circfss::fss_scale_table(specs, n_list, b, reps, rng,
                                     opts.effective_workers()),
            os);
        write_file_atomic(out_prefix, os.str());
        manifest.outputs.push_back(out_prefix);
    } else if (sim_ls->parsed()) {
        manifest.subcommand = "simulate log-smeary";
        circfss::LogSmearySummary s = circfss::log_smeary_smoke(
            ls_r, ls_n, ls_reps, rng, opts.effective_workers());
        emit(json{{"n", s.n},
                  {"replications", s.replications},
                  {"positive_sign_frequency", s.positive_sign_frequency},
                  {"median_rescaled_magnitude", s.median_rescaled_magnitude},
                  {"median_magnitude", s.median_magnitude}});
    } else if (wind_fss->parsed()) {
        manifest.subcommand = "wind fss";
        circfss::ParsedWind parsed = circfss::parse_wind_csv_file(in_path);
        auto samples = circfss::yearly_samples(parsed.records, rng);
        auto rows = circfss::fss_by_year(samples, opts.bootstrap_b, opts.alpha, rng);
        std::ostringstream os;
        circfss::write_fss_table_csv(rows, os);
        const std::string path = out_prefix + "fss_table.csv";
        write_file_atomic(path, os.str());
        manifest.outputs.push_back(path);
    } else if (wind_pairs->parsed()) {
        manifest.subcommand = "wind pairs";
        circfss::ParsedWind parsed = circfss::parse_wind_csv_file(in_path);
        auto samples = circfss::yearly_samples(parsed.records, rng);
        circfss::PairwiseMatrix m = circfss::yearly_pairwise_matrix(
            samples, parse_method(method_name), opts.alpha, opts.bootstrap_b, rng);
        struct Out {
            const char* name;
            void (*writer)(const circfss::PairwiseMatrix&, std::ostream&);
        };
        for (const Out& o : {Out{"pairs_raw.csv", circfss::write_pairs_raw_csv},
                             Out{"pairs_bh.csv", circfss::write_pairs_bh_csv},
                             Out{"pairs_reject.csv", circfss::write_pairs_reject_csv}}) {
            std::ostringstream os;
            o.writer(m, os);
            const std::string path = out_prefix + o.name;
            write_file_atomic(path, os.str());
            manifest.outputs.push_back(path);
        }
    }

    manifest.finish();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
