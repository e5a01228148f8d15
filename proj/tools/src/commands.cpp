#include "gchp/cli/commands.hpp"

#include "gchp/diagnostics.hpp"
#include "gchp/error.hpp"
#include "gchp/report_json.hpp"
#include "gchp/rng.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

namespace gchp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json provenance_json(const Provenance& p) { return json{{"config_hash", p.config_hash}, {"seed", p.seed}}; }

void write_json(const fs::path& path, const json& doc) { write_file_atomic(path, doc.dump(2) + "\n"); }

std::string session_stem(int id) { return "session_" + std::to_string(id); }

std::string cell(double x) { return format_double(x); }
std::string cell(std::size_t x) { return std::to_string(x); }

fs::path ensure_dir(const fs::path& dir) {
    fs::create_directories(dir);
    return dir;
}

lob::EventFile read_events(const fs::path& path, double fallback_tick) {
    auto f = lob::read_event_file(path);
    if (!(f.tick > 0.0)) f.tick = fallback_tick;
    return f;
}

// Fixed-point digits needed to print multiples of tick/2 exactly.
int price_decimals(double tick) {
    const double half = tick / 2.0;
    for (int d = 0; d <= 12; ++d) {
        const double scaled = half * std::pow(10.0, d);
        if (std::abs(scaled - std::round(scaled)) < 1e-9 * std::max(1.0, scaled)) return d;
    }
    return 12;
}

std::string fixed(double x, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
    return buf;
}

// ---------------------------------------------------------------- ingest

int ingest(const RunConfig& c, std::ostream& log) {
    if (!c.calendar) throw ConfigError("ingest needs data.session_open and data.session_close");
    const auto cal = *c.calendar;
    auto files = resolve_inputs(c.inputs);
    if (c.format.layout == lob::Layout::LobsterLike) {
        std::erase_if(files, [](const fs::path& p) { return p.filename().string().find("orderbook") != std::string::npos; });
        if (files.empty()) throw InputError("no message files among the inputs");
    }

    std::map<long long, lob::MidExtractor> days;
    json doc{{"provenance", provenance_json(c.provenance)}, {"max_reject_ratio", c.max_reject_ratio}};
    json file_reports = json::array();
    bool breached = false;
    std::size_t outside = 0;
    for (const auto& path : files) {
        const auto report = lob::parse_lob_file({path, {}}, c.format, [&](const lob::LobUpdate& u) {
            const double day = std::floor(u.timestamp / cal.day_length);
            const double time_of_day = u.timestamp - day * cal.day_length;
            if (time_of_day < cal.open || time_of_day > cal.close) {
                ++outside;
                return;
            }
            const auto key = static_cast<long long>(day);
            auto it = days.try_emplace(key, c.tick, static_cast<int>(key)).first;
            it->second.push(time_of_day - cal.open, 0.5 * (u.best_bid() + u.best_ask()));
        });
        json reasons = json::object();
        for (const auto& [reason, n] : report.reasons) reasons[reason] = n;
        json samples = json::array();
        for (const auto& s : report.samples) samples.push_back({{"line", s.line}, {"reason", s.reason}});
        file_reports.push_back({{"source", report.source},
                                {"rows", report.rows},
                                {"accepted", report.accepted},
                                {"rejected", report.rejected},
                                {"reject_ratio", report.reject_ratio()},
                                {"reasons", std::move(reasons)},
                                {"samples", std::move(samples)}});
        try {
            lob::check_reject_ratio(report, c.max_reject_ratio);
        } catch (const Error& e) {
            log << "ingest: " << e.detail() << "\n";
            breached = true;
        }
    }
    doc["files"] = std::move(file_reports);
    doc["outside_session"] = outside;

    ensure_dir(c.out);
    if (breached) {
        doc["status"] = "rejected";
        write_json(c.out / "ingest_report.json", doc);
        return kExitData;
    }

    const auto events_dir = ensure_dir(c.out / "events");
    json sessions = json::array();
    for (auto& [day, extractor] : days) {
        auto mid = extractor.take();
        mid.horizon = std::max(cal.close - cal.open, mid.points.empty() ? 0.0 : mid.points.back().time);
        const auto name = session_stem(mid.session_id) + ".csv";
        lob::write_event_file(events_dir / name, mid, c.tick, c.provenance);
        const std::size_t moves = mid.points.empty() ? 0 : mid.points.size() - 1;
        sessions.push_back({{"session", mid.session_id}, {"file", "events/" + name}, {"events", moves}});
        log << "ingest: session " << mid.session_id << ": " << moves << " mid-price changes\n";
    }
    doc["sessions"] = std::move(sessions);
    doc["status"] = "ok";
    write_json(c.out / "ingest_report.json", doc);
    return kExitOk;
}

// ---------------------------------------------------------------- diagnose

int diagnose(const RunConfig& c, std::ostream& log) {
    const auto files = resolve_inputs(c.inputs);
    const auto dir = ensure_dir(c.out / "diagnose");
    const auto& d = c.diagnose;
    json doc{{"provenance", provenance_json(c.provenance)}, {"tau", d.tau}};
    json sessions = json::array();

    for (const auto& path : files) {
        const auto f = read_events(path, c.tick);
        const int id = f.mid.session_id;
        const auto stem = session_stem(id);
        const EventSeries events = f.mid.points.empty() ? EventSeries({}, f.mid.horizon) : lob::event_series(f.mid);
        json done = json::array();
        json skipped = json::array();
        auto attempt = [&](const std::string& name, auto&& analysis) {
            try {
                analysis();
                done.push_back(name);
            } catch (const Error& e) {
                skipped.push_back({{"analysis", name}, {"reason", e.what()}});
                log << "diagnose: session " << id << ": " << name << " skipped: " << e.what() << "\n";
            } catch (const std::invalid_argument& e) {
                skipped.push_back({{"analysis", name}, {"reason", e.what()}});
                log << "diagnose: session " << id << ": " << name << " skipped: " << e.what() << "\n";
            }
        };

        attempt("counts", [&] {
            const auto wc = diagnostics::window_counts(events, d.tau);
            if (wc.counts.empty()) throw Error(ErrorCode::InsufficientData, "no whole window of length tau");
            Table counts({"window", "start", "count"});
            stamp(counts, c.provenance);
            counts.add_meta("tau", cell(d.tau));
            std::vector<double> values;
            for (std::size_t k = 0; k < wc.counts.size(); ++k) {
                counts.add_row({cell(k), cell(static_cast<double>(k) * d.tau), cell(wc.counts[k])});
                values.push_back(static_cast<double>(wc.counts[k]));
            }
            Table hist({"lower", "upper", "count"});
            stamp(hist, c.provenance);
            for (const auto& b : diagnostics::histogram(values, d.bins)) {
                hist.add_row({cell(b.lower), cell(b.upper), cell(b.count)});
            }
            write_file_atomic(dir / (stem + "_counts.csv"), counts.render());
            write_file_atomic(dir / (stem + "_count_histogram.csv"), hist.render());
        });

        attempt("interarrival", [&] {
            const auto gaps = diagnostics::interarrival_times(events);
            const auto fits = diagnostics::fit_distributions(gaps);
            Table ranking({"rank", "family", "first", "second", "ks_distance"});
            stamp(ranking, c.provenance);
            std::vector<std::string> columns{"x", "empirical"};
            for (std::size_t r = 0; r < fits.size(); ++r) {
                const auto& fit = fits[r];
                ranking.add_row({cell(r + 1), std::string(diagnostics::to_string(fit.family)), cell(fit.first),
                                 cell(fit.second), cell(fit.ks_distance)});
                columns.emplace_back(diagnostics::to_string(fit.family));
            }
            Table cdf(columns);
            stamp(cdf, c.provenance);
            for (const auto& row : diagnostics::cdf_table(gaps, fits, d.cdf_points)) {
                std::vector<double> cells{row.x, row.empirical};
                cells.insert(cells.end(), row.fitted.begin(), row.fitted.end());
                cdf.add_row(cells);
            }
            write_file_atomic(dir / (stem + "_interarrival_fits.csv"), ranking.render());
            write_file_atomic(dir / (stem + "_interarrival_cdf.csv"), cdf.render());
        });

        attempt("autocorrelation", [&] {
            const auto lags = diagnostics::autocorrelation(events, d.tau, d.lags);
            Table acf({"delta", "pairs", "correlation", "note"});
            stamp(acf, c.provenance);
            acf.add_meta("tau", cell(d.tau));
            for (const auto& l : lags) {
                acf.add_row({cell(l.delta), cell(l.pairs), l.value ? cell(*l.value) : std::string(), l.error});
            }
            write_file_atomic(dir / (stem + "_autocorrelation.csv"), acf.render());
        });

        sessions.push_back({{"session", id},
                            {"source", path.filename().string()},
                            {"events", events.size()},
                            {"horizon", events.horizon()},
                            {"analyses", std::move(done)},
                            {"skipped", std::move(skipped)}});
    }
    doc["sessions"] = std::move(sessions);
    write_json(dir / "report.json", doc);
    return kExitOk;
}

// ---------------------------------------------------------------- fit

int fit(const RunConfig& c, std::ostream& log) {
    const auto files = resolve_inputs(c.inputs);
    const auto dir = ensure_dir(c.out / "fit");

    struct Tally {
        std::size_t best{0};
        std::vector<double> errors;
    };
    std::map<ModelKind, Tally> tally;
    for (auto k : c.kinds) tally[k];
    std::size_t fitted = 0;
    Table skipped({"session", "reason"});
    stamp(skipped, c.provenance);

    for (const auto& path : files) {
        const auto f = read_events(path, c.tick);
        const int id = f.mid.session_id;
        const auto stem = session_stem(id);
        const auto moves = lob::price_moves(f.mid, f.tick);
        FitReport report;
        try {
            report = select_model(f.mid, moves, c.kinds, c.calibration);
        } catch (const Error& e) {
            log << "fit: session " << id << " skipped: " << e.what() << "\n";
            skipped.add_row({std::to_string(id), e.what()});
            write_file_atomic(dir / (stem + ".json"), fit_failure_json(id, e.what(), c.provenance));
            continue;
        }
        ++fitted;
        write_file_atomic(dir / (stem + ".json"), fit_report_json(report, id, c.provenance));

        Table curves({"kind", "window", "blocks", "std_emp", "std_fit", "std_theo"});
        stamp(curves, c.provenance);
        for (const auto& k : report.kinds) {
            if (!k.ok()) continue;
            tally[k.kind].errors.push_back(k.regression->error_rate);
            for (const auto& p : k.curve.points) {
                curves.add_row({std::string(to_string(k.kind)), cell(p.window), cell(p.windows), cell(p.std_dev),
                                cell(std::sqrt(k.regression->c * p.window)),
                                cell(k.regression->theoretical * std::sqrt(p.window))});
            }
        }
        ++tally[report.chosen].best;
        write_file_atomic(dir / (stem + "_curves.csv"), curves.render());
        log << "fit: session " << id << ": chosen " << to_string(report.chosen) << " (error rate "
            << report.best().regression->error_rate << ")\n";
    }

    Table summary({"kind", "best_fit_count", "pct_best", "mean_error", "best_error", "worst_error", "fitted"});
    stamp(summary, c.provenance);
    summary.add_meta("sessions", cell(files.size()));
    summary.add_meta("fitted_sessions", cell(fitted));
    for (auto k : c.kinds) {
        const auto& t = tally[k];
        std::vector<std::string> row{std::string(to_string(k)), cell(t.best),
                                     fitted == 0 ? std::string() : cell(100.0 * static_cast<double>(t.best) /
                                                                        static_cast<double>(fitted))};
        if (t.errors.empty()) {
            row.insert(row.end(), {"", "", ""});
        } else {
            const double mean = std::accumulate(t.errors.begin(), t.errors.end(), 0.0) /
                                static_cast<double>(t.errors.size());
            const auto [lo, hi] = std::minmax_element(t.errors.begin(), t.errors.end());
            row.insert(row.end(), {cell(mean), cell(*lo), cell(*hi)});
        }
        row.push_back(cell(t.errors.size()));
        summary.add_row(std::move(row));
    }
    write_file_atomic(dir / "summary.csv", summary.render());
    write_file_atomic(dir / "skipped.csv", skipped.render());
    return fitted == 0 ? kExitFit : kExitOk;
}

// ---------------------------------------------------------------- backtest

Table confusion3_table(const Confusion3& m, const Provenance& prov) {
    Table t({"truth", "pred_up", "pred_stationary", "pred_down"});
    stamp(t, prov);
    for (std::size_t i = 0; i < 3; ++i) {
        t.add_row({std::string(to_string(static_cast<Direction>(i))), cell(m[i][0]), cell(m[i][1]), cell(m[i][2])});
    }
    return t;
}

Table confusion2_table(const Confusion2& m, const Provenance& prov) {
    Table t({"truth", "pred_volatile", "pred_calm"});
    stamp(t, prov);
    for (std::size_t i = 0; i < 2; ++i) {
        t.add_row({std::string(to_string(static_cast<Volatility>(i))), cell(m[i][0]), cell(m[i][1])});
    }
    return t;
}

void write_backtest_tables(const fs::path& dir, const std::string& stem, const BacktestReport& r,
                           const RunConfig& c) {
    write_file_atomic(dir / (stem + ".json"), backtest_report_json(r, c.provenance));
    write_file_atomic(dir / (stem + "_confusion3.csv"), confusion3_table(r.confusion3, c.provenance).render());
    write_file_atomic(dir / (stem + "_confusion2.csv"), confusion2_table(r.confusion2, c.provenance).render());

    Table windows({"window", "start", "kind", "error_rate", "s0", "s_true", "s_pred", "true3", "pred3", "true2",
                   "pred2"});
    stamp(windows, c.provenance);
    for (const auto& w : r.records) {
        windows.add_row({cell(w.window), cell(w.start), std::string(to_string(w.kind)), cell(w.error_rate),
                         cell(w.s0), cell(w.s_true), cell(w.s_pred), std::string(to_string(w.true3)),
                         std::string(to_string(w.pred3)), std::string(to_string(w.true2)),
                         std::string(to_string(w.pred2))});
    }
    write_file_atomic(dir / (stem + "_windows.csv"), windows.render());

    if (!r.records.empty()) {
        const auto metrics = report_metrics(r);
        Table hist({"lower", "upper", "count"});
        stamp(hist, c.provenance);
        hist.add_meta("error_mean", cell(metrics.error_mean));
        hist.add_meta("error_std", cell(metrics.error_std));
        for (const auto& b : metrics.histogram) hist.add_row({cell(b.lower), cell(b.upper), cell(b.count)});
        write_file_atomic(dir / (stem + "_error_histogram.csv"), hist.render());
    }

    if (c.dump_paths) {
        Table paths({"window", "path", "endpoint"});
        stamp(paths, c.provenance);
        for (const auto& w : r.records) {
            for (std::size_t p = 0; p < w.endpoints.size(); ++p) {
                paths.add_row({cell(w.window), cell(p), cell(w.endpoints[p])});
            }
        }
        write_file_atomic(dir / (stem + "_paths.csv"), paths.render());
    }
}

int backtest(const RunConfig& c, std::ostream& log) {
    const auto files = resolve_inputs(c.inputs);
    const auto dir = ensure_dir(c.out / "backtest");
    std::vector<BacktestReport> reports;
    Table skipped({"session", "window", "reason"});
    stamp(skipped, c.provenance);

    for (const auto& path : files) {
        const auto f = read_events(path, c.tick);
        const int id = f.mid.session_id;
        const auto moves = lob::price_moves(f.mid, f.tick);
        BacktestReport report;
        try {
            report = walk_forward(f.mid, moves, c.predict, c.kinds, c.calibration);
        } catch (const Error& e) {
            log << "backtest: session " << id << " skipped: " << e.what() << "\n";
            skipped.add_row({std::to_string(id), "", e.what()});
            continue;
        }
        for (const auto& s : report.skipped) skipped.add_row({std::to_string(id), cell(s.window), s.reason});
        write_backtest_tables(dir, session_stem(id), report, c);
        log << "backtest: session " << id << ": " << report.records.size() << " windows scored, "
            << report.skipped.size() << " skipped\n";
        reports.push_back(std::move(report));
    }
    write_file_atomic(dir / "skipped.csv", skipped.render());

    std::size_t scored = 0;
    for (const auto& r : reports) scored += r.records.size();
    if (!reports.empty()) write_backtest_tables(dir, "summary", merge_reports(reports), c);
    return scored == 0 ? kExitFit : kExitOk;
}

// ---------------------------------------------------------------- simulate

std::string lob_row(double time, double mid, double tick, int decimals) {
    // Two-tick spread around an on-grid mid, one tick around a half-tick mid.
    const double units = mid / tick;
    const bool on_tick = std::abs(units - std::round(units)) < 1e-6;
    const double best_bid = on_tick ? mid - tick : mid - tick / 2.0;
    const double best_ask = on_tick ? mid + tick : mid + tick / 2.0;
    std::string row = format_double(time);
    for (std::size_t level = 0; level < lob::kMaxDepth; ++level) {
        const double offset = static_cast<double>(level) * tick;
        const std::string size = std::to_string(10 * (level + 1));
        row += ',' + fixed(best_ask + offset, decimals) + ',' + size + ',' + fixed(best_bid - offset, decimals) + ',' +
               size;
    }
    row += '\n';
    return row;
}

int simulate(const RunConfig& c, std::ostream& log) {
    const lob::SessionCalendar cal = c.calendar.value_or(lob::SessionCalendar{0.0, 86400.0, 86400.0});
    const double horizon = cal.close - cal.open;
    const auto lob_dir = ensure_dir(c.out / "lob");
    const auto sim_dir = ensure_dir(c.out / "simulated");
    const auto& g = c.generator;
    const int decimals = price_decimals(g.tick);

    json sessions = json::array();
    for (std::size_t day = 0; day < c.days; ++day) {
        const int id = static_cast<int>(day);
        const auto session = simulate_gchp(g, horizon, derive_seed(c.seed, day), id);
        lob::write_event_file(sim_dir / (session_stem(id) + ".csv"), session.mid, g.tick, c.provenance);

        std::string text = "# config_hash=" + c.provenance.config_hash + "\n# seed=" + std::to_string(c.seed) + "\n";
        const double offset = static_cast<double>(day) * cal.day_length + cal.open;
        for (const auto& p : session.mid.points) text += lob_row(offset + p.time, p.mid, g.tick, decimals);
        char name[32];
        std::snprintf(name, sizeof name, "day_%03d.csv", id);
        write_file_atomic(lob_dir / name, text);

        std::vector<std::size_t> visits(g.values.size(), 0);
        for (auto s : session.states) ++visits[s];
        sessions.push_back({{"session", id},
                            {"events", session.moves.size()},
                            {"open_mid", session.mid.points.front().mid},
                            {"close_mid", session.mid.points.back().mid},
                            {"state_visits", visits}});
        log << "simulate: day " << id << ": " << session.moves.size() << " mid-price changes\n";
    }

    json P = json::array();
    for (std::size_t i = 0; i < g.P.size(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < g.P.size(); ++j) row.push_back(g.P(i, j));
        P.push_back(std::move(row));
    }
    json doc{{"provenance", provenance_json(c.provenance)},
             {"hawkes",
              {{"lambda", g.hawkes.lambda0()},
               {"alpha", g.hawkes.alpha()},
               {"beta", g.hawkes.beta()},
               {"branching_ratio", g.hawkes.branching_ratio()}}},
             {"values", g.values},
             {"transition", std::move(P)},
             {"initial_state", g.initial_state},
             {"s0", g.s0},
             {"tick", g.tick},
             {"horizon", horizon},
             {"session_open", cal.open},
             {"session_close", cal.close},
             {"day_length", cal.day_length},
             {"expected_events", g.hawkes.stationary_rate() * horizon},
             {"sessions", std::move(sessions)}};
    write_json(sim_dir / "truth.json", doc);
    return kExitOk;
}

template <class F>
int guarded(F&& body, std::ostream& err) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const InputError& e) {
        err << "input error: " << e.what() << "\n";
        return kExitData;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.code() == ErrorCode::AllKindsFailed ? kExitFit : kExitData;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    }
}

} // namespace

int cmd_ingest(const RunConfig& config, std::ostream& log) { return ingest(config, log); }
int cmd_diagnose(const RunConfig& config, std::ostream& log) { return diagnose(config, log); }
int cmd_fit(const RunConfig& config, std::ostream& log) { return fit(config, log); }
int cmd_backtest(const RunConfig& config, std::ostream& log) { return backtest(config, log); }
int cmd_simulate(const RunConfig& config, std::ostream& log) { return simulate(config, log); }

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Compound Hawkes mid-price modelling toolkit", "gchp"};
    app.require_subcommand(1);

    std::string config_file;
    std::vector<std::string> assignments;
    std::vector<std::string> inputs;
    // Flag values are kept as text and applied through Settings so the file
    // and the command line go through the same validation.
    std::map<std::string, std::string> flags;
    const std::vector<std::pair<std::string, std::string>> flag_keys{
        {"seed", "run.seed"},         {"out", "run.out"},        {"format", "data.format"},
        {"tick", "data.tick"},        {"kinds", "model.kinds"},  {"method", "predict.method"},
        {"paths", "predict.paths"},   {"train", "predict.train"}, {"test", "predict.test"},
        {"step", "predict.step"},     {"alpha3", "predict.alpha3"}, {"alpha2", "predict.alpha2"},
    };

    const std::vector<std::pair<std::string, std::string>> commands{
        {"ingest", "Parse order-book files into per-session event files"},
        {"diagnose", "Event clustering, inter-arrival fits and autocorrelation tables"},
        {"fit", "Fit every model kind per session and pick the best"},
        {"backtest", "Walk-forward mid-price prediction and confusion matrices"},
        {"simulate", "Generate synthetic order-book and event files"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_file, "INI config file");
        for (const auto& [flag, key] : flag_keys) {
            sub->add_option("--" + flag, flags[key], "overrides " + key);
        }
        sub->add_option("--set", assignments, "section.key=value override")->allow_extra_args(false);
        sub->add_option("inputs", inputs, "input files or directories");
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    return guarded(
        [&] {
            Settings settings;
            if (!config_file.empty()) settings.load_file(config_file);
            for (const auto& a : assignments) settings.set_assignment(a);
            for (const auto& [key, value] : flags) {
                if (!value.empty()) settings.set(key, value);
            }
            if (!inputs.empty()) {
                std::string joined;
                for (const auto& i : inputs) joined += (joined.empty() ? "" : ",") + i;
                settings.set("data.inputs", joined);
            }
            const auto config = make_run_config(settings);
            const auto* sub = app.get_subcommands().front();
            const auto& name = sub->get_name();
            if (name == "ingest") return cmd_ingest(config, err);
            if (name == "diagnose") return cmd_diagnose(config, err);
            if (name == "fit") return cmd_fit(config, err);
            if (name == "backtest") return cmd_backtest(config, err);
            return cmd_simulate(config, err);
        },
        err);
}

} // namespace gchp::cli
