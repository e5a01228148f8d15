#include "gchp/lob.hpp"

#include "gchp/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace gchp::lob {

FormatSpec FormatSpec::levels10() {
    FormatSpec spec;
    spec.name = "levels-10";
    spec.layout = Layout::Levels10;
    return spec;
}

FormatSpec FormatSpec::lobster_like() {
    FormatSpec spec;
    spec.name = "lobster-like";
    spec.layout = Layout::LobsterLike;
    spec.price_scale = 1e-4; // integer prices in 1/10000 units
    spec.columns.timestamp = 0;
    spec.columns.first_level = 0;
    return spec;
}

FormatSpec format_by_name(std::string_view name) {
    if (name == "levels-10") return FormatSpec::levels10();
    if (name == "lobster-like") return FormatSpec::lobster_like();
    throw Error(ErrorCode::UnknownFormat, "unknown LOB format '" + std::string(name) +
                                              "' (expected levels-10 or lobster-like)");
}

namespace {

constexpr std::size_t kMaxSamples = 20;

void split(std::string_view line, char delimiter, std::vector<std::string_view>& out) {
    out.clear();
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delimiter, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool blank(std::string_view line) { return trim(line).empty(); }

bool on_grid(double price, double tick) {
    const double units = price / tick;
    return std::abs(units - std::round(units)) <= 1e-6;
}

// Builds an update from the timestamp field and the level fields. Returns the
// rejection reason on failure.
std::optional<std::string> decode(std::string_view time_field, const std::vector<std::string_view>& fields,
                                  const FormatSpec& format, LobUpdate& update) {
    try {
        update.timestamp = parse_double(time_field) * format.time_scale;
    } catch (const std::invalid_argument&) {
        return "bad timestamp";
    }
    if (!std::isfinite(update.timestamp)) return "bad timestamp";

    const auto& c = format.columns;
    const std::size_t depth = std::min(format.depth, kMaxDepth);
    update.depth = 0;
    for (std::size_t level = 0; level < depth; ++level) {
        const std::size_t base = c.first_level + level * c.level_stride;
        const std::size_t needed = base + std::max({c.ask_price, c.ask_size, c.bid_price, c.bid_size});
        if (needed >= fields.size()) {
            if (level == 0) return "missing columns";
            break;
        }
        const auto ask_p = trim(fields[base + c.ask_price]);
        const auto bid_p = trim(fields[base + c.bid_price]);
        if (ask_p.empty() || bid_p.empty()) {
            if (level == 0) return "empty best level";
            break;
        }
        LobLevel out;
        try {
            out.ask_price = parse_double(ask_p);
            out.bid_price = parse_double(bid_p);
            out.ask_size = parse_double(fields[base + c.ask_size]);
            out.bid_size = parse_double(fields[base + c.bid_size]);
        } catch (const std::invalid_argument&) {
            return "bad number";
        }
        if (std::abs(out.ask_price) >= format.empty_level_marker ||
            std::abs(out.bid_price) >= format.empty_level_marker) {
            if (level == 0) return "empty best level";
            break;
        }
        out.ask_price *= format.price_scale;
        out.bid_price *= format.price_scale;
        if (!std::isfinite(out.ask_price) || !std::isfinite(out.bid_price)) return "bad number";
        if (level > 0) {
            const auto& prev = update.levels[level - 1];
            if (!(out.ask_price > prev.ask_price) || !(out.bid_price < prev.bid_price)) return "unsorted levels";
        }
        update.levels[level] = out;
        ++update.depth;
    }
    if (!(update.best_ask() > update.best_bid())) return "crossed book";
    if (format.tick > 0.0 && (!on_grid(update.best_bid(), format.tick) || !on_grid(update.best_ask(), format.tick))) {
        return "off tick grid";
    }
    return std::nullopt;
}

std::filesystem::path companion_of(const LobSource& source) {
    if (!source.companion.empty()) return source.companion;
    auto name = source.path.filename().string();
    const auto pos = name.find("message");
    if (pos == std::string::npos) {
        throw std::invalid_argument("lobster-like source " + source.path.string() +
                                    " has no order-book companion and no 'message' in its name");
    }
    name.replace(pos, 7, "orderbook");
    return source.path.parent_path() / name;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open LOB file " + path.string());
    return in;
}

} // namespace

ParseReport parse_lob_file(const LobSource& source, const FormatSpec& format,
                           const std::function<void(const LobUpdate&)>& sink) {
    ParseReport report;
    report.source = source.path.string();

    auto reject = [&](std::size_t line, const std::string& reason) {
        ++report.rejected;
        ++report.reasons[reason];
        if (report.samples.size() < kMaxSamples) report.samples.push_back({line, reason});
    };

    double last_time = -std::numeric_limits<double>::infinity();
    LobUpdate update;
    auto accept_or_reject = [&](std::size_t line_no, std::optional<std::string> reason) {
        if (!reason && update.timestamp < last_time) reason = "time went backwards";
        if (reason) {
            reject(line_no, *reason);
            return;
        }
        last_time = update.timestamp;
        ++report.accepted;
        sink(update);
    };

    std::vector<std::string_view> fields;
    std::string line;
    if (format.layout == Layout::Levels10) {
        auto in = open_input(source.path);
        std::size_t line_no = 0;
        bool header_pending = format.header;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.front() == '#') continue;
            if (header_pending) {
                header_pending = false;
                continue;
            }
            if (blank(line)) continue;
            ++report.rows;
            split(line, format.delimiter, fields);
            if (format.columns.timestamp >= fields.size()) {
                reject(line_no, "missing columns");
                continue;
            }
            accept_or_reject(line_no, decode(fields[format.columns.timestamp], fields, format, update));
        }
        return report;
    }

    auto messages = open_input(source.path);
    auto books = open_input(companion_of(source));
    std::string book_line;
    std::vector<std::string_view> message_fields;
    std::size_t line_no = 0;
    while (std::getline(messages, line)) {
        ++line_no;
        const bool have_book = static_cast<bool>(std::getline(books, book_line));
        if (format.header && line_no == 1) continue;
        if (blank(line)) continue;
        ++report.rows;
        if (!have_book) {
            reject(line_no, "missing order-book row");
            continue;
        }
        split(line, format.delimiter, message_fields);
        split(book_line, format.delimiter, fields);
        if (format.columns.timestamp >= message_fields.size()) {
            reject(line_no, "missing columns");
            continue;
        }
        accept_or_reject(line_no, decode(message_fields[format.columns.timestamp], fields, format, update));
    }
    return report;
}

void check_reject_ratio(const ParseReport& report, double max_ratio) {
    if (report.reject_ratio() <= max_ratio) return;
    std::ostringstream msg;
    msg << report.source << ": rejected " << report.rejected << " of " << report.rows << " rows ("
        << report.reject_ratio() * 100.0 << "% > " << max_ratio * 100.0 << "% cap)";
    for (const auto& [reason, count] : report.reasons) msg << "; " << reason << ": " << count;
    throw Error(ErrorCode::MalformedRow, msg.str());
}

double mid_at(const MidSeries& series, double t) {
    if (series.points.empty()) throw std::invalid_argument("mid_at: empty series");
    const auto it = std::upper_bound(series.points.begin(), series.points.end(), t,
                                     [](double value, const MidPoint& p) { return value < p.time; });
    if (it == series.points.begin()) return series.points.front().mid;
    return std::prev(it)->mid;
}

EventSeries event_series(const MidSeries& series) {
    std::vector<double> times;
    if (series.points.size() > 1) {
        times.reserve(series.points.size() - 1);
        for (std::size_t i = 1; i < series.points.size(); ++i) times.push_back(series.points[i].time);
    }
    const double horizon = times.empty() ? series.horizon : std::max(series.horizon, times.back());
    return EventSeries(std::move(times), horizon);
}

PriceMoveSeries price_moves(const MidSeries& series, double tick) {
    const double half = tick / 2.0;
    std::vector<PriceMove> moves;
    if (series.points.size() > 1) moves.reserve(series.points.size() - 1);
    for (std::size_t i = 1; i < series.points.size(); ++i) {
        const auto units = std::llround(series.points[i].mid / half) - std::llround(series.points[i - 1].mid / half);
        moves.push_back({series.points[i].time, static_cast<double>(units) * half});
    }
    return PriceMoveSeries(std::move(moves), tick);
}

MidExtractor::MidExtractor(double tick, int session_id) : half_tick_(tick / 2.0) {
    if (!(tick > 0.0)) throw std::invalid_argument("MidExtractor: tick must be positive");
    series_.session_id = session_id;
}

void MidExtractor::push(const LobUpdate& update) {
    push(update.timestamp, 0.5 * (update.best_bid() + update.best_ask()));
}

void MidExtractor::push(double time, double mid) {
    const auto units = std::llround(mid / half_tick_);
    auto& points = series_.points;
    if (!points.empty() && units == last_units_) return;
    if (!points.empty() && !(time > points.back().time)) {
        time = std::nextafter(points.back().time, std::numeric_limits<double>::infinity());
    }
    points.push_back({time, static_cast<double>(units) * half_tick_});
    last_units_ = units;
    series_.horizon = std::max(series_.horizon, time);
}

MidSeries MidExtractor::take() {
    MidSeries out = std::move(series_);
    series_ = MidSeries{};
    series_.session_id = out.session_id;
    return out;
}

MidExtraction extract_mid_events(std::span<const LobUpdate> updates, double tick) {
    MidExtractor extractor(tick);
    for (const auto& u : updates) extractor.push(u);
    MidSeries mid = extractor.take();
    PriceMoveSeries moves = price_moves(mid, tick);
    return {std::move(mid), std::move(moves)};
}

std::vector<MidSeries> split_sessions(const MidSeries& series, const SessionCalendar& calendar) {
    if (!(calendar.day_length > 0.0) || !(calendar.open < calendar.close) || calendar.open < 0.0 ||
        calendar.close > calendar.day_length) {
        throw std::invalid_argument("split_sessions: invalid session calendar");
    }
    std::map<long long, MidSeries> days;
    for (const auto& p : series.points) {
        const auto day = static_cast<long long>(std::floor(p.time / calendar.day_length));
        const double time_of_day = p.time - static_cast<double>(day) * calendar.day_length;
        if (time_of_day < calendar.open || time_of_day > calendar.close) continue;
        auto& session = days[day];
        double t = time_of_day - calendar.open;
        if (!session.points.empty() && !(t > session.points.back().time)) {
            t = std::nextafter(session.points.back().time, std::numeric_limits<double>::infinity());
        }
        session.points.push_back({t, p.mid});
    }
    std::vector<MidSeries> out;
    out.reserve(days.size());
    for (auto& [day, session] : days) {
        session.session_id = static_cast<int>(day);
        session.horizon = calendar.close - calendar.open;
        if (!session.points.empty()) session.horizon = std::max(session.horizon, session.points.back().time);
        out.push_back(std::move(session));
    }
    return out;
}

std::string render_event_file(const MidSeries& series, double tick, const Provenance& provenance) {
    Table table({"time", "mid"});
    table.add_meta("format", "gchp-events-v1");
    table.add_meta("session", std::to_string(series.session_id));
    table.add_meta("horizon", format_double(series.horizon));
    table.add_meta("tick", format_double(tick));
    stamp(table, provenance);
    for (const auto& p : series.points) table.add_row(std::vector<double>{p.time, p.mid});
    return table.render(',');
}

void write_event_file(const std::filesystem::path& path, const MidSeries& series, double tick,
                      const Provenance& provenance) {
    write_file_atomic(path, render_event_file(series, tick, provenance));
}

EventFile read_event_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open event file " + path.string());
    EventFile file;
    std::string line;
    bool header_seen = false;
    std::size_t line_no = 0;
    std::vector<std::string_view> fields;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        if (line.front() == '#') {
            const auto body = trim(std::string_view(line).substr(1));
            const auto eq = body.find('=');
            if (eq == std::string_view::npos) continue;
            const auto key = trim(body.substr(0, eq));
            const auto value = trim(body.substr(eq + 1));
            if (key == "session") file.mid.session_id = static_cast<int>(parse_double(value));
            else if (key == "horizon") file.mid.horizon = parse_double(value);
            else if (key == "tick") file.tick = parse_double(value);
            else if (key == "config_hash") file.provenance.config_hash = std::string(value);
            else if (key == "seed") file.provenance.seed = std::stoull(std::string(value));
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        split(line, ',', fields);
        if (fields.size() < 2) {
            throw Error(ErrorCode::MalformedRow, path.string() + ":" + std::to_string(line_no) + ": expected time,mid");
        }
        MidPoint p{};
        try {
            p.time = parse_double(fields[0]);
            p.mid = parse_double(fields[1]);
        } catch (const std::invalid_argument& e) {
            throw Error(ErrorCode::MalformedRow, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        if (!file.mid.points.empty() && !(p.time > file.mid.points.back().time)) {
            throw Error(ErrorCode::MalformedRow,
                        path.string() + ":" + std::to_string(line_no) + ": times must be strictly increasing");
        }
        file.mid.points.push_back(p);
    }
    if (!(file.tick > 0.0)) throw Error(ErrorCode::MalformedRow, path.string() + ": missing '# tick=' metadata");
    return file;
}

} // namespace gchp::lob
