#include "ratq/cli.hpp"

#include "ratq/distribution.hpp"
#include "ratq/farey.hpp"
#include "ratq/sampling.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cstdlib>
#include <iomanip>
#include <ostream>

namespace ratq {

namespace {

using nlohmann::json;

json to_json(const BoundedValue& v) {
    return json{{"value", v.value}, {"error_bound", v.error_bound}};
}

int threads_or_env(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("RATQ_THREADS")) {
        const int parsed = std::atoi(env);
        if (parsed > 0) return parsed;
    }
    return 1;
}

std::pair<double, double> parse_interval_spec(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("interval probe \"" + text + "\": expected a:b");
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
}

struct ModelFlags {
    std::string den;
    std::string num = "equi";
    double tol = 1e-12;

    void attach(CLI::App* cmd) {
        cmd->add_option("--den", den,
                        "denominator model: equi:k=N | geom:w=X | poisson:lambda=X | "
                        "custom:@file.csv | custom:p1,p2,...")
            ->required();
        cmd->add_option("--num", num, "numerator model: equi | binom:p=X (default equi)");
        cmd->add_option("--tol", tol, "series truncation tolerance (default 1e-12)");
    }

    RationalDistribution dist() const {
        return RationalDistribution(parse_denominator_model(den), parse_numerator_model(num), tol);
    }
};

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    out << std::setprecision(17);

    CLI::App app{"distributions over the rationals in [0,1]: exact enumeration, "
                 "certified evaluation, sampling"};
    app.name("ratq");
    app.require_subcommand(1);

    ModelFlags pmf_flags, cdf_flags, interval_flags, moments_flags, charfn_flags, sample_flags,
        histogram_flags, audit_flags;
    std::string format;  // per-command default when empty

    app.add_option("--format", format, "output format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));

    // pmf
    auto* pmf_cmd = app.add_subcommand("pmf", "atom probability P{Q = q}");
    pmf_flags.attach(pmf_cmd);
    std::string pmf_q;
    std::int64_t pmf_rows = 0;
    pmf_cmd->add_option("--q", pmf_q, "rational as n/m");
    pmf_cmd->add_option("--rows", pmf_rows,
                        "emit every atom with denominator <= M (csv: q,m,value,error_bound)");

    // cdf
    auto* cdf_cmd = app.add_subcommand("cdf", "P{Q <= x}");
    cdf_flags.attach(cdf_cmd);
    double cdf_x = 0.0;
    std::int64_t cdf_grid = 0;
    auto* cdf_x_opt = cdf_cmd->add_option("--x", cdf_x, "evaluation point");
    cdf_cmd->add_option("--grid", cdf_grid, "emit x = 0, 1/G, ..., 1 (csv: x,value,error_bound)");

    // interval
    auto* interval_cmd = app.add_subcommand("interval", "P{a < Q <= b}");
    interval_flags.attach(interval_cmd);
    double interval_a = 0.0, interval_b = 1.0;
    interval_cmd->add_option("--a", interval_a, "left endpoint")->required();
    interval_cmd->add_option("--b", interval_b, "right endpoint")->required();

    // moments
    auto* moments_cmd = app.add_subcommand("moments", "mean, second moment, variance");
    moments_flags.attach(moments_cmd);

    // charfn
    auto* charfn_cmd = app.add_subcommand("charfn", "characteristic function E[e^{iuQ}]");
    charfn_flags.attach(charfn_cmd);
    double charfn_u = 0.0;
    double charfn_from = 0.0, charfn_to = 0.0;
    std::int64_t charfn_count = 0;
    auto* charfn_u_opt = charfn_cmd->add_option("--u", charfn_u, "evaluation point");
    charfn_cmd->add_option("--u-from", charfn_from, "grid start");
    charfn_cmd->add_option("--u-to", charfn_to, "grid end");
    charfn_cmd->add_option("--u-count", charfn_count,
                           "grid size (csv: u,re,im,abs,error_bound)");

    // sample
    auto* sample_cmd = app.add_subcommand("sample", "draw random rationals (csv: one n/m per line)");
    sample_flags.attach(sample_cmd);
    std::int64_t sample_count = 1;
    std::uint64_t sample_seed = 0;
    int sample_threads = 0;
    sample_cmd->add_option("--count", sample_count, "number of draws")->required();
    sample_cmd->add_option("--seed", sample_seed, "RNG seed (default 0)");
    sample_cmd->add_option("--threads", sample_threads,
                           "worker threads; RATQ_THREADS as fallback (default 1)");

    // histogram
    auto* histogram_cmd =
        app.add_subcommand("histogram", "sample and bin; uniformity report "
                                        "(csv: bin,lo,hi,frequency)");
    histogram_flags.attach(histogram_cmd);
    std::int64_t histogram_count = 1;
    std::uint64_t histogram_seed = 0;
    int histogram_bins = 20;
    int histogram_threads = 0;
    histogram_cmd->add_option("--count", histogram_count, "number of draws")->required();
    histogram_cmd->add_option("--seed", histogram_seed, "RNG seed (default 0)");
    histogram_cmd->add_option("--bins", histogram_bins, "equal-width bins over [0,1] (default 20)");
    histogram_cmd->add_option("--threads", histogram_threads,
                              "worker threads; RATQ_THREADS as fallback (default 1)");

    // sweep
    auto* sweep_cmd = app.add_subcommand(
        "sweep", "flattening-family convergence table "
                 "(csv: k,mu,s_log_k,pmf@...,interval@...,cdf_sup_dev)");
    std::string sweep_family = "equi";
    std::vector<std::int64_t> sweep_ks;
    std::vector<std::string> sweep_probe_qs;
    std::vector<std::string> sweep_probe_intervals;
    std::int64_t sweep_grid = 1001;
    double sweep_tol = 1e-12;
    sweep_cmd->add_option("--family", sweep_family, "equi | geom | poisson")
        ->check(CLI::IsMember({"equi", "geom", "poisson"}));
    sweep_cmd->add_option("--k", sweep_ks, "flattening indices (repeatable)")->required();
    sweep_cmd->add_option("--probe-q", sweep_probe_qs, "pmf probes as n/m (default 1/2)");
    sweep_cmd->add_option("--probe-interval", sweep_probe_intervals,
                          "interval probes as a:b (default 0.25:0.75)");
    sweep_cmd->add_option("--grid", sweep_grid, "CDF deviation grid size (default 1001)");
    sweep_cmd->add_option("--tol", sweep_tol, "series truncation tolerance");

    // nu
    auto* nu_cmd = app.add_subcommand("nu", "row counts and row sums "
                                            "(csv: m,nu,sigma_num,sigma_den)");
    std::int64_t nu_max = 1;
    nu_cmd->add_option("--max", nu_max, "largest denominator")->required();

    // audit
    auto* audit_cmd = app.add_subcommand("audit", "normalization audit over rows 1..M");
    audit_flags.attach(audit_cmd);
    std::int64_t audit_max = 1;
    audit_cmd->add_option("--max", audit_max, "largest row")->required();

    // index
    auto* index_cmd = app.add_subcommand("index", "global index <-> rational");
    std::string index_q;
    std::int64_t index_k = 0;
    index_cmd->add_option("--q", index_q, "rational as n/m");
    index_cmd->add_option("--k", index_k, "1-based global index");

    // let --format and friends appear after the subcommand name too
    for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough();

    std::reverse(args.begin(), args.end());  // CLI11 consumes argv back to front
    try {
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    const auto want = [&](const char* fallback) {
        return format.empty() ? std::string(fallback) : format;
    };

    try {
        if (pmf_cmd->parsed()) {
            const RationalDistribution dist = pmf_flags.dist();
            if (pmf_rows > 0) {
                if (want("csv") == "csv") {
                    out << "q,m,value,error_bound\n";
                    for (std::int64_t m = 1; m <= pmf_rows; ++m)
                        for (const Rational& q : row(m)) {
                            const BoundedValue v = dist.pmf(q);
                            out << q.str() << ',' << m << ',' << v.value << ',' << v.error_bound
                                << '\n';
                        }
                } else {
                    json rows = json::array();
                    for (std::int64_t m = 1; m <= pmf_rows; ++m)
                        for (const Rational& q : row(m)) {
                            json r = to_json(dist.pmf(q));
                            r["q"] = q.str();
                            rows.push_back(std::move(r));
                        }
                    out << json{{"query", "pmf"}, {"rows", rows}}.dump(2) << "\n";
                }
                return 0;
            }
            if (pmf_q.empty()) throw std::invalid_argument("pmf: need --q or --rows");
            const Rational q = Rational::parse(pmf_q);
            json record = to_json(dist.pmf(q));
            record["query"] = "pmf(" + q.str() + ")";
            if (want("json") == "json") {
                out << record.dump(2) << "\n";
            } else {
                out << "query,value,error_bound\n"
                    << record["query"].get<std::string>() << ','
                    << record["value"].get<double>() << ',' << record["error_bound"].get<double>()
                    << '\n';
            }
            return 0;
        }

        if (cdf_cmd->parsed()) {
            const RationalDistribution dist = cdf_flags.dist();
            if (cdf_grid > 0) {
                if (want("csv") == "csv") {
                    out << "x,value,error_bound\n";
                    for (std::int64_t g = 0; g <= cdf_grid; ++g) {
                        const double x = static_cast<double>(g) / static_cast<double>(cdf_grid);
                        const BoundedValue v = dist.cdf(x);
                        out << x << ',' << v.value << ',' << v.error_bound << '\n';
                    }
                } else {
                    json rows = json::array();
                    for (std::int64_t g = 0; g <= cdf_grid; ++g) {
                        const double x = static_cast<double>(g) / static_cast<double>(cdf_grid);
                        json r = to_json(dist.cdf(x));
                        r["x"] = x;
                        rows.push_back(std::move(r));
                    }
                    out << json{{"query", "cdf"}, {"rows", rows}}.dump(2) << "\n";
                }
                return 0;
            }
            if (cdf_x_opt->count() == 0) throw std::invalid_argument("cdf: need --x or --grid");
            json record = to_json(dist.cdf(cdf_x));
            record["query"] = "cdf";
            record["x"] = cdf_x;
            out << record.dump(2) << "\n";
            return 0;
        }

        if (interval_cmd->parsed()) {
            json record = to_json(interval_flags.dist().interval(interval_a, interval_b));
            record["query"] = "interval";
            record["a"] = interval_a;
            record["b"] = interval_b;
            out << record.dump(2) << "\n";
            return 0;
        }

        if (moments_cmd->parsed()) {
            const RationalDistribution dist = moments_flags.dist();
            out << json{{"query", "moments"},
                        {"mean", to_json(dist.mean())},
                        {"second_moment", to_json(dist.second_moment())},
                        {"variance", to_json(dist.variance())}}
                       .dump(2)
                << "\n";
            return 0;
        }

        if (charfn_cmd->parsed()) {
            const RationalDistribution dist = charfn_flags.dist();
            if (charfn_count > 0) {
                out << "u,re,im,abs,error_bound\n";
                for (std::int64_t g = 0; g < charfn_count; ++g) {
                    const double u =
                        charfn_count == 1
                            ? charfn_from
                            : charfn_from + (charfn_to - charfn_from) * static_cast<double>(g) /
                                                static_cast<double>(charfn_count - 1);
                    const BoundedComplex v = dist.charfn(u);
                    out << u << ',' << v.value.real() << ',' << v.value.imag() << ','
                        << std::abs(v.value) << ',' << v.error_bound << '\n';
                }
                return 0;
            }
            if (charfn_u_opt->count() == 0)
                throw std::invalid_argument("charfn: need --u or --u-from/--u-to/--u-count");
            const BoundedComplex v = dist.charfn(charfn_u);
            out << json{{"query", "charfn"},
                        {"u", charfn_u},
                        {"re", v.value.real()},
                        {"im", v.value.imag()},
                        {"error_bound", v.error_bound}}
                       .dump(2)
                << "\n";
            return 0;
        }

        if (sample_cmd->parsed()) {
            const RationalDistribution dist = sample_flags.dist();
            const int threads = threads_or_env(sample_threads);
            const std::vector<Rational> sample = sample_many(dist, sample_count, sample_seed, threads);
            if (want("csv") == "csv") {
                out << "q\n";
                for (const Rational& q : sample) out << q.str() << '\n';
            } else {
                json values = json::array();
                for (const Rational& q : sample) values.push_back(q.str());
                out << json{{"query", "sample"},
                            {"rng", Rng::algorithm()},
                            {"seed", sample_seed},
                            {"threads", threads},
                            {"samples", values}}
                           .dump(2)
                    << "\n";
            }
            return 0;
        }

        if (histogram_cmd->parsed()) {
            SampleConfig config{histogram_flags.dist(), histogram_count, histogram_seed,
                                histogram_bins, threads_or_env(histogram_threads)};
            const UniformityReport report = histogram(config);
            if (want("json") == "json") {
                out << json{{"query", "histogram"},
                            {"rng", Rng::algorithm()},
                            {"seed", histogram_seed},
                            {"threads", config.threads},
                            {"bins", report.bin_frequencies},
                            {"ks_statistic", report.ks_statistic},
                            {"max_atom_frequency", report.max_atom_frequency},
                            {"mu", report.mu}}
                           .dump(2)
                    << "\n";
            } else {
                out << "bin,lo,hi,frequency\n";
                const double width = 1.0 / static_cast<double>(report.bin_frequencies.size());
                for (std::size_t b = 0; b < report.bin_frequencies.size(); ++b)
                    out << (b + 1) << ',' << width * static_cast<double>(b) << ','
                        << width * static_cast<double>(b + 1) << ',' << report.bin_frequencies[b]
                        << '\n';
            }
            return 0;
        }

        if (sweep_cmd->parsed()) {
            DenominatorModel::Kind family = DenominatorModel::Kind::FiniteEquiprobable;
            if (sweep_family == "geom") family = DenominatorModel::Kind::Geometric;
            if (sweep_family == "poisson") family = DenominatorModel::Kind::Poisson;
            std::vector<Rational> probes;
            for (const auto& text : sweep_probe_qs) probes.push_back(Rational::parse(text));
            if (probes.empty()) probes.push_back(Rational(1, 2));
            std::vector<std::pair<double, double>> intervals;
            for (const auto& text : sweep_probe_intervals)
                intervals.push_back(parse_interval_spec(text));
            if (intervals.empty()) intervals.emplace_back(0.25, 0.75);
            const auto rows = convergence_sweep(family, sweep_ks, probes, intervals,
                                                static_cast<int>(sweep_grid), sweep_tol);
            if (want("csv") == "json") {
                json records = json::array();
                for (const SweepRow& r : rows) {
                    json record{{"k", r.k},
                                {"mu", r.mu},
                                {"s_log_k", r.s_log_k},
                                {"cdf_sup_dev", r.cdf_sup_deviation}};
                    for (std::size_t j = 0; j < probes.size(); ++j)
                        record["pmf@" + probes[j].str()] = r.pmf_probes[j];
                    for (std::size_t j = 0; j < intervals.size(); ++j)
                        record["interval@" + std::to_string(intervals[j].first) + ":" +
                               std::to_string(intervals[j].second)] = r.interval_probes[j];
                    records.push_back(std::move(record));
                }
                out << json{{"query", "sweep"}, {"family", sweep_family}, {"rows", records}}.dump(2)
                    << "\n";
                return 0;
            }
            out << "k,mu,s_log_k";
            for (const Rational& q : probes) out << ",pmf@" << q.str();
            for (const auto& [a, b] : intervals) out << ",interval@" << a << ':' << b;
            out << ",cdf_sup_dev\n";
            for (const SweepRow& r : rows) {
                out << r.k << ',' << r.mu << ',' << r.s_log_k;
                for (double v : r.pmf_probes) out << ',' << v;
                for (double v : r.interval_probes) out << ',' << v;
                out << ',' << r.cdf_sup_deviation << '\n';
            }
            return 0;
        }

        if (nu_cmd->parsed()) {
            const ratq::FareyTable table = ratq::FareyTable::up_to(nu_max);
            if (want("csv") == "json") {
                json rows = json::array();
                for (std::int64_t m = 1; m <= nu_max; ++m) {
                    const ratq::Fraction s = table.row_sum(m);
                    rows.push_back(json{{"m", m},
                                        {"nu", table.row_count(m)},
                                        {"sigma_num", s.num},
                                        {"sigma_den", s.den}});
                }
                out << json{{"query", "nu"}, {"rows", rows}}.dump(2) << "\n";
            } else {
                table.write_csv(out);
            }
            return 0;
        }

        if (audit_cmd->parsed()) {
            const NormalizationAudit audit = audit_flags.dist().normalization_audit(audit_max);
            out << json{{"query", "normalization_audit"},
                        {"m_max", audit_max},
                        {"partial_sum", audit.partial_sum},
                        {"tail_bound", audit.tail_bound}}
                       .dump(2)
                << "\n";
            return 0;
        }

        if (index_cmd->parsed()) {
            if (!index_q.empty() && index_k > 0)
                throw std::invalid_argument("index: give --q or --k, not both");
            if (!index_q.empty()) {
                const Rational q = Rational::parse(index_q);
                out << json{{"query", "index"}, {"q", q.str()}, {"index", index_of(q)}}.dump(2)
                    << "\n";
            } else if (index_k > 0) {
                out << json{{"query", "index"}, {"k", index_k}, {"q", at_index(index_k).str()}}.dump(2)
                    << "\n";
            } else {
                throw std::invalid_argument("index: need --q or --k");
            }
            return 0;
        }
    } catch (const series_truncation_error& e) {
        err << "evaluation error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::out_of_range& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace ratq
