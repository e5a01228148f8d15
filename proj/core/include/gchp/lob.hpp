#pragma once

#include "gchp/hawkes.hpp"
#include "gchp/io.hpp"
#include "gchp/states.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gchp::lob {

inline constexpr std::size_t kMaxDepth = 10;

struct LobLevel {
    double bid_price{0.0};
    double bid_size{0.0};
    double ask_price{0.0};
    double ask_size{0.0};
};

struct LobUpdate {
    double timestamp{0.0};
    std::size_t depth{0};
    std::array<LobLevel, kMaxDepth> levels{};

    [[nodiscard]] double best_bid() const noexcept { return levels[0].bid_price; }
    [[nodiscard]] double best_ask() const noexcept { return levels[0].ask_price; }
};

enum class Layout {
    Levels10,    // one file: timestamp followed by per-level column blocks
    LobsterLike, // message file (time) line-paired with an order-book file (levels)
};

// Positions are 0-based. Level l (0-based) occupies columns
// first_level + l * level_stride + {ask_price, ask_size, bid_price, bid_size}.
struct ColumnMap {
    std::size_t timestamp{0};
    std::size_t first_level{1};
    std::size_t level_stride{4};
    std::size_t ask_price{0};
    std::size_t ask_size{1};
    std::size_t bid_price{2};
    std::size_t bid_size{3};
};

struct FormatSpec {
    std::string name;
    Layout layout{Layout::Levels10};
    char delimiter{','};
    bool header{false};
    std::size_t depth{kMaxDepth};
    double price_scale{1.0};
    double time_scale{1.0};
    // When positive, rows whose best quotes are off this tick grid are rejected.
    double tick{0.0};
    // Raw prices with magnitude >= this mark an empty level.
    double empty_level_marker{9999999999.0};
    ColumnMap columns;

    [[nodiscard]] static FormatSpec levels10();
    [[nodiscard]] static FormatSpec lobster_like();
};

// "levels-10" or "lobster-like"; anything else throws Error(UnknownFormat).
[[nodiscard]] FormatSpec format_by_name(std::string_view name);

struct LobSource {
    std::filesystem::path path;
    // Order-book file for the lobster-like layout. When empty it is derived by
    // replacing "message" with "orderbook" in the file name.
    std::filesystem::path companion;
};

struct RejectedRow {
    std::size_t line{0};
    std::string reason;
};

struct ParseReport {
    std::string source;
    std::size_t rows{0};
    std::size_t accepted{0};
    std::size_t rejected{0};
    std::map<std::string, std::size_t> reasons;
    std::vector<RejectedRow> samples; // first few rejections

    [[nodiscard]] double reject_ratio() const noexcept {
        return rows == 0 ? 0.0 : static_cast<double>(rejected) / static_cast<double>(rows);
    }
};

inline constexpr double kDefaultMaxRejectRatio = 0.01;

// Streams updates in file order to `sink`; memory use does not grow with the
// file. Rows breaking the book invariants are skipped and counted. In the
// levels-10 layout lines starting with '#' are comments.
ParseReport parse_lob_file(const LobSource& source, const FormatSpec& format,
                           const std::function<void(const LobUpdate&)>& sink);

// Throws Error(MalformedRow) when the reject ratio exceeds `max_ratio`.
void check_reject_ratio(const ParseReport& report, double max_ratio = kDefaultMaxRejectRatio);

struct MidPoint {
    double time;
    double mid;
};

// Change-compressed mid-price path of one session. The first point is the
// opening state; every later point is a mid-price-change event.
struct MidSeries {
    int session_id{0};
    double horizon{0.0};
    std::vector<MidPoint> points;
};

// Last mid at or before t (the first mid for t before the first point).
[[nodiscard]] double mid_at(const MidSeries& series, double t);
[[nodiscard]] EventSeries event_series(const MidSeries& series);
[[nodiscard]] PriceMoveSeries price_moves(const MidSeries& series, double tick);

// Incremental mid-price extraction. Mids are snapped to the half-tick grid;
// only changes are kept, and tied timestamps are nudged forward by one ulp.
class MidExtractor {
public:
    explicit MidExtractor(double tick, int session_id = 0);

    void push(const LobUpdate& update);
    void push(double time, double mid);
    [[nodiscard]] const MidSeries& series() const noexcept { return series_; }
    [[nodiscard]] MidSeries take();

private:
    double half_tick_;
    std::int64_t last_units_{0};
    MidSeries series_;
};

struct MidExtraction {
    MidSeries mid;
    PriceMoveSeries moves;
};

[[nodiscard]] MidExtraction extract_mid_events(std::span<const LobUpdate> updates, double tick);

// Trading hours as seconds from midnight; a day is `day_length` seconds.
struct SessionCalendar {
    double open{0.0};
    double close{86400.0};
    double day_length{86400.0};
};

// Cuts an absolute-time series into per-day sessions, rebased to seconds from
// the session open. No move is ever formed across two sessions.
[[nodiscard]] std::vector<MidSeries> split_sessions(const MidSeries& series, const SessionCalendar& calendar);

// Canonical interchange file: '#' metadata lines then "time,mid" rows.
struct EventFile {
    MidSeries mid;
    double tick{0.0};
    Provenance provenance;
};

[[nodiscard]] std::string render_event_file(const MidSeries& series, double tick, const Provenance& provenance);
void write_event_file(const std::filesystem::path& path, const MidSeries& series, double tick,
                      const Provenance& provenance);
[[nodiscard]] EventFile read_event_file(const std::filesystem::path& path);

} // namespace gchp::lob
