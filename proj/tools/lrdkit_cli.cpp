// lrdkit command-line front end.
//
//   lrdkit lrdtest series.csv ...        long-memory tests and DFA Hurst exponent
//   lrdkit xcorr x.csv y.csv             DCCA/DMCA coefficients with surrogate p-values
//   lrdkit volatility prices.csv         log Garman-Klass variance (and log volume)
//   lrdkit chain seg1.csv seg2.csv ...   chain overlapping search-interest segments
//   lrdkit synth --hurst 0.8 ...         fractional Gaussian noise
//
// Exit status: 0 success, 1 analysis or data error, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lrdkit/lrdkit.hpp"

namespace {

using json = nlohmann::ordered_json;
using lrdkit::format_double;

enum class Format { Csv, Json };

struct Common {
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string out;
    Format format = Format::Csv;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// "start:stop:step" or "a,b,c".
std::vector<std::size_t> parse_grid(const std::string& text) {
    std::vector<std::size_t> grid;
    auto number = [&](const std::string& s) -> std::size_t {
        std::size_t pos = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(s, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos == 0 || pos != s.size()) throw UsageError("bad grid entry '" + s + "' in '" + text + "'");
        return static_cast<std::size_t>(v);
    };
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
        if (parts.size() != 3) throw UsageError("grid range must be start:stop:step, got '" + text + "'");
        const auto start = number(parts[0]), stop = number(parts[1]), step = number(parts[2]);
        if (step == 0 || stop < start) throw UsageError("empty grid range '" + text + "'");
        for (std::size_t s = start; s <= stop; s += step) grid.push_back(s);
    } else {
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ',');) grid.push_back(number(p));
    }
    if (grid.empty()) throw UsageError("empty grid '" + text + "'");
    return grid;
}

// Writes to --out when given, otherwise stdout.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw lrdkit::InvalidInput("cannot write '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

void write_series(const std::string& path, const lrdkit::TimeSeries& ts) {
    Sink sink(path);
    lrdkit::write_series_csv(sink.stream(), ts);
}

lrdkit::TimeSeries read_trends(const std::string& path) {
    return std::get<lrdkit::TimeSeries>(lrdkit::read_series_csv(path, lrdkit::CsvSchema::Trends));
}

json series_json(const lrdkit::TimeSeries& ts) {
    json rows = json::array();
    for (std::size_t i = 0; i < ts.size(); ++i) {
        rows.push_back({{"date", lrdkit::format_iso_date(ts.dates->at(i))}, {"value", ts.values[i]}});
    }
    return rows;
}

// ---------------------------------------------------------------------------
// lrdtest
// ---------------------------------------------------------------------------

struct LrdtestArgs {
    std::vector<std::string> inputs;
    std::size_t surrogates = 1000;
    std::size_t block_size = 25;
    std::size_t s_min = 10;
    std::size_t s_max = 0;
    std::string fluct_out;
};

void run_lrdtest(const LrdtestArgs& a, const Common& c) {
    struct Row {
        std::string label;
        std::size_t n_obs;
        std::array<lrdkit::LrdTestResult, 2> tests;
        lrdkit::HurstEstimate hurst;
    };
    std::vector<Row> rows;
    for (const auto& path : a.inputs) {
        const auto ts = read_trends(path);
        lrdkit::BootstrapConfig cfg;
        cfg.block_size = a.block_size;
        cfg.n_surrogates = a.surrogates;
        cfg.seed = c.seed;
        cfg.threads = c.threads;
        rows.push_back({ts.label, ts.size(), lrdkit::block_bootstrap_tests(ts.values, cfg),
                        lrdkit::dfa_hurst(ts.values, a.s_min, a.s_max)});
    }

    Sink sink(c.out);
    auto& out = sink.stream();
    if (c.format == Format::Csv) {
        out << "label,n_obs,V_T,p_V,M_T,p_M,q_star,H_DFA\n";
        for (const auto& r : rows) {
            out << r.label << ',' << r.n_obs << ',' << format_double(r.tests[0].statistic) << ','
                << format_double(r.tests[0].p_value) << ',' << format_double(r.tests[1].statistic) << ','
                << format_double(r.tests[1].p_value) << ',' << r.tests[0].q_used << ','
                << format_double(r.hurst.h) << '\n';
        }
    } else {
        json doc{{"schema_version", 1},
                 {"command", "lrdtest"},
                 {"seed", c.seed},
                 {"surrogates", a.surrogates},
                 {"block_size", a.block_size}};
        json results = json::array();
        for (const auto& r : rows) {
            results.push_back({{"label", r.label},
                               {"n_obs", r.n_obs},
                               {"V_T", r.tests[0].statistic},
                               {"p_V", r.tests[0].p_value},
                               {"M_T", r.tests[1].statistic},
                               {"p_M", r.tests[1].p_value},
                               {"q_star", r.tests[0].q_used},
                               {"H_DFA", r.hurst.h},
                               {"H_DFA_r_squared", r.hurst.r_squared},
                               {"redraws", r.tests[0].redraws}});
        }
        doc["results"] = std::move(results);
        out << doc.dump(2) << '\n';
    }

    if (!a.fluct_out.empty()) {
        Sink fs(a.fluct_out);
        fs.stream() << "label,scale,F,boxes\n";
        for (const auto& r : rows) {
            const auto& f = r.hurst.scales_used;
            for (std::size_t i = 0; i < f.scales.size(); ++i) {
                fs.stream() << r.label << ',' << f.scales[i] << ',' << format_double(f.values[i]) << ','
                            << f.boxes_per_scale[i] << '\n';
            }
        }
    }
}

// ---------------------------------------------------------------------------
// xcorr
// ---------------------------------------------------------------------------

struct XcorrArgs {
    std::string x, y;
    std::string method = "both";
    std::string grid, dcca_grid, dmca_grid;
    std::size_t surrogates = 1000;
    double level = 0.10;
    std::string summary;
};

void run_xcorr(const XcorrArgs& a, const Common& c) {
    using lrdkit::XcorrMethod;
    std::vector<lrdkit::MethodGrid> methods;
    if (a.method != "dmca") {
        methods.push_back({XcorrMethod::DCCA, !a.dcca_grid.empty() ? parse_grid(a.dcca_grid)
                                              : !a.grid.empty() && a.method == "dcca" ? parse_grid(a.grid)
                                                                                      : lrdkit::dcca_default_grid()});
    }
    if (a.method != "dcca") {
        methods.push_back({XcorrMethod::DMCA, !a.dmca_grid.empty() ? parse_grid(a.dmca_grid)
                                              : !a.grid.empty() && a.method == "dmca" ? parse_grid(a.grid)
                                                                                      : lrdkit::dmca_default_grid()});
    }
    if (!a.grid.empty() && a.method == "both") {
        throw UsageError("--grid needs --method dcca or dmca; use --dcca-grid/--dmca-grid with both");
    }

    const auto [x, y] = lrdkit::align_by_date(read_trends(a.x), read_trends(a.y));
    lrdkit::SurrogateConfig cfg;
    cfg.n_surrogates = a.surrogates;
    cfg.seed = c.seed;
    cfg.significance_level = a.level;
    cfg.threads = c.threads;
    const auto correlograms = lrdkit::xcorr_significance(x.values, y.values, methods, cfg);

    std::vector<lrdkit::AverageCoefficient> averages;
    for (const auto& cg : correlograms) averages.push_back(lrdkit::average_coefficient(cg));
    const char sign = lrdkit::correlation_sign(averages, a.level);
    for (const auto& cg : correlograms) {
        for (std::size_t i = 0; i < cg.scales.size(); ++i) {
            if (cg.degenerate[i]) {
                std::cerr << "warning: " << to_string(cg.method) << " scale " << cg.scales[i]
                          << " has zero detrended variance\n";
            }
        }
    }

    Sink sink(c.out);
    auto& out = sink.stream();
    if (c.format == Format::Json) {
        json doc{{"schema_version", 1},
                 {"command", "xcorr"},
                 {"x", x.label},
                 {"y", y.label},
                 {"n_obs", x.size()},
                 {"seed", c.seed},
                 {"surrogates", a.surrogates},
                 {"level", a.level}};
        json methods_json = json::array();
        for (std::size_t m = 0; m < correlograms.size(); ++m) {
            const auto& cg = correlograms[m];
            json scales = json::array();
            for (std::size_t i = 0; i < cg.scales.size(); ++i) {
                const double p = (*cg.p_values)[i];
                scales.push_back({{"scale", cg.scales[i]},
                                  {"rho", cg.rho[i]},
                                  {"p_value", p},
                                  {"rho_masked", p >= a.level ? 0.0 : cg.rho[i]},
                                  {"degenerate", static_cast<bool>(cg.degenerate[i])}});
            }
            methods_json.push_back({{"method", to_string(cg.method)},
                                    {"mean_rho", averages[m].mean},
                                    {"std_rho", averages[m].std_dev},
                                    {"p_value", *averages[m].p_value},
                                    {"significant", *averages[m].p_value < a.level},
                                    {"scales", std::move(scales)}});
        }
        doc["methods"] = std::move(methods_json);
        doc["sign"] = std::string(1, sign);
        out << doc.dump(2) << '\n';
        return;
    }

    out << "method,scale,rho,p_value,rho_masked\n";
    for (const auto& cg : correlograms) {
        for (std::size_t i = 0; i < cg.scales.size(); ++i) {
            const double p = (*cg.p_values)[i];
            out << to_string(cg.method) << ',' << cg.scales[i] << ',' << format_double(cg.rho[i]) << ','
                << format_double(p) << ',' << format_double(p >= a.level ? 0.0 : cg.rho[i]) << '\n';
        }
    }

    std::ostringstream summary;
    summary << "x,y,n_obs";
    for (const auto& cg : correlograms) {
        const std::string m = to_string(cg.method);
        summary << ",mean_" << m << ",std_" << m << ",p_" << m << ",sig_" << m;
    }
    summary << ",sign\n" << x.label << ',' << y.label << ',' << x.size();
    for (const auto& av : averages) {
        summary << ',' << format_double(av.mean) << ',' << format_double(av.std_dev) << ','
                << format_double(*av.p_value) << ',' << (*av.p_value < a.level ? 'Y' : 'N');
    }
    summary << ',' << sign << '\n';
    if (a.summary.empty()) {
        out << '\n' << summary.str();
    } else {
        Sink s(a.summary);
        s.stream() << summary.str();
    }
}

// ---------------------------------------------------------------------------
// volatility
// ---------------------------------------------------------------------------

struct VolatilityArgs {
    std::string input;
    std::string volume_out;
    std::optional<double> floor;
};

void report_clamped(const lrdkit::LogTransformed& lt) {
    if (lt.clamped_count() == 0) return;
    std::cerr << "warning: " << lt.series.label << ": " << lt.clamped_count() << " value(s) clamped to floor "
              << format_double(lt.floor) << '\n';
}

json clamped_json(const lrdkit::LogTransformed& lt) {
    json dates = json::array();
    for (std::size_t i = 0; i < lt.clamped.size(); ++i) {
        if (lt.clamped[i]) dates.push_back(lrdkit::format_iso_date(lt.series.dates->at(i)));
    }
    return {{"floor", lt.floor}, {"clamped_dates", std::move(dates)}};
}

void run_volatility(const VolatilityArgs& a, const Common& c) {
    const auto bars = std::get<std::vector<lrdkit::OhlcvBar>>(
        lrdkit::read_series_csv(a.input, lrdkit::CsvSchema::Ohlcv));
    const auto variance = lrdkit::log_transform(lrdkit::garman_klass_series(bars, "gk_variance"), a.floor);
    const auto volume = lrdkit::log_transform(lrdkit::volume_series(bars, "volume"), a.floor);
    report_clamped(variance);
    report_clamped(volume);

    if (c.format == Format::Json) {
        json doc{{"schema_version", 1}, {"command", "volatility"}, {"input", a.input}};
        doc["log_variance"] = {{"series", series_json(variance.series)}, {"clamping", clamped_json(variance)}};
        doc["log_volume"] = {{"series", series_json(volume.series)}, {"clamping", clamped_json(volume)}};
        Sink sink(c.out);
        sink.stream() << doc.dump(2) << '\n';
    } else {
        write_series(c.out, variance.series);
    }
    if (!a.volume_out.empty()) write_series(a.volume_out, volume.series);
}

// ---------------------------------------------------------------------------
// chain
// ---------------------------------------------------------------------------

struct ChainArgs {
    std::vector<std::string> inputs;
    std::size_t overlap_days = 1;
};

void run_chain(const ChainArgs& a, const Common& c) {
    std::vector<lrdkit::TrendsSegment> segments;
    for (const auto& path : a.inputs) segments.push_back(lrdkit::TrendsSegment::from_series(read_trends(path)));
    const auto chained = lrdkit::chain_segments(segments, a.overlap_days);
    if (c.format == Format::Json) {
        json doc{{"schema_version", 1}, {"command", "chain"}, {"segments", a.inputs.size()}};
        doc["series"] = series_json(chained);
        Sink sink(c.out);
        sink.stream() << doc.dump(2) << '\n';
    } else {
        write_series(c.out, chained);
    }
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

struct SynthArgs {
    double hurst = 0.5;
    std::size_t length = 2500;
    double sigma = 1.0;
    std::string start = "2004-01-01";
    std::optional<double> rho;
    std::optional<double> hurst2;
    std::string out2;
};

lrdkit::TimeSeries with_dates(lrdkit::TimeSeries ts, lrdkit::Date start) {
    std::vector<lrdkit::Date> dates;
    dates.reserve(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) dates.push_back(lrdkit::add_days(start, static_cast<long>(i)));
    ts.dates = std::move(dates);
    return ts;
}

void run_synth(const SynthArgs& a, const Common& c) {
    const auto start = lrdkit::parse_iso_date(a.start);
    if (!start) throw UsageError("--start must be an ISO date, got '" + a.start + "'");
    if (!a.rho) {
        if (!a.out2.empty() || a.hurst2) throw UsageError("--out2 and --hurst2 need --rho");
        const auto ts = with_dates(lrdkit::generate_fgn({a.hurst, a.length, c.seed, a.sigma}), *start);
        if (c.format == Format::Json) {
            json doc{{"schema_version", 1}, {"command", "synth"}, {"hurst", a.hurst}, {"seed", c.seed}};
            doc["series"] = series_json(ts);
            Sink sink(c.out);
            sink.stream() << doc.dump(2) << '\n';
        } else {
            write_series(c.out, ts);
        }
        return;
    }
    if (a.out2.empty()) throw UsageError("--rho writes a pair; --out2 is required");
    auto [x, y] = lrdkit::generate_correlated_pair(a.hurst, a.hurst2.value_or(a.hurst), *a.rho, a.length, c.seed,
                                                   a.sigma);
    write_series(c.out, with_dates(std::move(x), *start));
    write_series(a.out2, with_dates(std::move(y), *start));
}

// ---------------------------------------------------------------------------

struct OpenUnitInterval : CLI::Validator {
    OpenUnitInterval() {
        name_ = "(0,1)";
        func_ = [](const std::string& s) -> std::string {
            double v = 0.0;
            if (!CLI::detail::lexical_cast(s, v) || !(v > 0.0 && v < 1.0)) return "value " + s + " not in (0, 1)";
            return {};
        };
    }
};

void add_common(CLI::App* cmd, Common& c, bool seeded) {
    if (seeded) cmd->add_option("--seed", c.seed, "RNG seed")->capture_default_str();
    cmd->add_option("--out", c.out, "Output file (default: stdout)");
    cmd->add_option("--format", c.format, "Report format")
        ->transform(CLI::CheckedTransformer(std::map<std::string, Format>{{"csv", Format::Csv}, {"json", Format::Json}},
                                            CLI::ignore_case))
        ->default_str("csv");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Long-range dependence and detrended cross-correlation toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from a key = value file; flags override it");
    app.get_config_formatter_base()->arrayDelimiter(',');
    Common common;
    app.add_option("--threads", common.threads, "Worker threads (0 = all cores)")->capture_default_str();

    LrdtestArgs lrd;
    auto* lrdtest = app.add_subcommand("lrdtest", "Modified R/S and rescaled variance tests with DFA Hurst exponent");
    lrdtest->add_option("inputs", lrd.inputs, "date,value CSV files")->required()->check(CLI::ExistingFile);
    lrdtest->add_option("--surrogates", lrd.surrogates, "Bootstrap surrogates")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    lrdtest->add_option("--block-size", lrd.block_size, "Bootstrap block length")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    lrdtest->add_option("--s-min", lrd.s_min, "Smallest DFA scale")->capture_default_str()->check(CLI::Range(4, 1 << 30));
    lrdtest->add_option("--s-max", lrd.s_max, "Largest DFA scale (0 = min(500, T/5))")->capture_default_str();
    lrdtest->add_option("--fluct-out", lrd.fluct_out, "Write DFA fluctuation functions as CSV");
    add_common(lrdtest, common, true);

    XcorrArgs xc;
    auto* xcorr = app.add_subcommand("xcorr", "DCCA and DMCA coefficients with TAAFT surrogate p-values");
    xcorr->add_option("x", xc.x, "First date,value CSV")->required()->check(CLI::ExistingFile);
    xcorr->add_option("y", xc.y, "Second date,value CSV")->required()->check(CLI::ExistingFile);
    xcorr->add_option("--method", xc.method, "dcca, dmca or both")
        ->capture_default_str()
        ->check(CLI::IsMember({"dcca", "dmca", "both"}, CLI::ignore_case));
    xcorr->add_option("--grid", xc.grid, "Scale grid for a single method: start:stop:step or a,b,c");
    xcorr->add_option("--dcca-grid", xc.dcca_grid, "DCCA scales (default 10:250:10)");
    xcorr->add_option("--dmca-grid", xc.dmca_grid, "DMCA windows (default 11:251:10)");
    xcorr->add_option("--surrogates", xc.surrogates, "TAAFT surrogate pairs")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    xcorr->add_option("--level", xc.level, "Significance level")->capture_default_str()->check(OpenUnitInterval());
    xcorr->add_option("--summary", xc.summary, "Write the summary row to this file instead of after the scales");
    add_common(xcorr, common, true);

    VolatilityArgs vol;
    auto* volatility = app.add_subcommand("volatility", "Log Garman-Klass variance and log volume from OHLCV bars");
    volatility->add_option("input", vol.input, "date,open,high,low,close,volume CSV")
        ->required()
        ->check(CLI::ExistingFile);
    volatility->add_option("--volume-out", vol.volume_out, "Write the log volume series here");
    volatility->add_option("--floor", vol.floor, "Clamp floor (default: smallest positive value x 1e-3)")
        ->check(CLI::PositiveNumber);
    add_common(volatility, common, false);

    ChainArgs ch;
    auto* chain = app.add_subcommand("chain", "Chain overlapping daily search-interest segments");
    chain->add_option("segments", ch.inputs, "Segment CSVs in date order")->required()->check(CLI::ExistingFile);
    chain->add_option("--overlap-days", ch.overlap_days, "Minimum overlap between neighbours")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    add_common(chain, common, false);

    SynthArgs syn;
    auto* synth = app.add_subcommand("synth", "Fractional Gaussian noise by circulant embedding");
    synth->add_option("--hurst", syn.hurst, "Hurst exponent")->capture_default_str()->check(OpenUnitInterval());
    synth->add_option("--length", syn.length, "Number of observations")
        ->capture_default_str()
        ->check(CLI::Range(std::size_t{16}, std::size_t{1} << 40));
    synth->add_option("--sigma", syn.sigma, "Standard deviation")->capture_default_str()->check(CLI::PositiveNumber);
    synth->add_option("--start", syn.start, "Date of the first observation")->capture_default_str();
    synth->add_option("--rho", syn.rho, "Generate a correlated pair with this driver correlation")
        ->check(CLI::Range(-1.0, 1.0));
    synth->add_option("--hurst2", syn.hurst2, "Hurst exponent of the second series")->check(OpenUnitInterval());
    synth->add_option("--out2", syn.out2, "Output file for the second series");
    add_common(synth, common, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*lrdtest) run_lrdtest(lrd, common);
        if (*xcorr) run_xcorr(xc, common);
        if (*volatility) run_volatility(vol, common);
        if (*chain) run_chain(ch, common);
        if (*synth) run_synth(syn, common);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const lrdkit::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
