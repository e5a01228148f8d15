#include "gchp/cli/config.hpp"

#include "gchp/error.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

namespace gchp::cli {

namespace fs = std::filesystem;

namespace {

const std::map<std::string, std::string>& defaults() {
    static const std::map<std::string, std::string> table{
        {"run.seed", "0"},
        {"run.out", "gchp-out"},

        {"data.inputs", ""},
        {"data.format", "levels-10"},
        {"data.tick", "0.01"},
        {"data.max_reject_ratio", "0.01"},
        {"data.session_open", ""},
        {"data.session_close", ""},
        {"data.day_length", "24h"},
        {"data.header", "false"},
        {"data.delimiter", ","},
        {"data.price_scale", "1"},
        {"data.time_scale", "1"},

        {"model.kinds", "DO,2SDO,4DO,NSDO"},
        {"model.nsdo_states", "8"},
        {"model.window_sizes", "30,60,120,300,600,1200"},
        {"model.min_windows", "10"},
        {"model.min_events", "50"},
        {"model.error_formula", "derivation"},
        {"model.starts", "16"},

        {"predict.method", "DiffusiveMean"},
        {"predict.train", "3h"},
        {"predict.test", "2h"},
        {"predict.step", "1h"},
        {"predict.alpha3", "0.025"},
        {"predict.alpha2", "0.04"},
        {"predict.paths", "250"},
        {"predict.draws", "1000"},
        {"predict.dump_paths", "false"},

        {"diagnose.tau", "60"},
        {"diagnose.lags", "0,60,120,300,600,1200,1800,3600"},
        {"diagnose.bins", "20"},
        {"diagnose.cdf_points", "200"},

        {"simulate.lambda", "1"},
        {"simulate.alpha", "0.5"},
        {"simulate.beta", "1"},
        {"simulate.values", "0.01,-0.01"},
        {"simulate.transition", "0.5,0.5;0.5,0.5"},
        {"simulate.initial_state", "0"},
        {"simulate.s0", "100"},
        {"simulate.days", "1"},
    };
    return table;
}

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

std::vector<std::string> split_list(std::string_view text, char sep) {
    std::vector<std::string> out;
    if (trim(text).empty()) return out;
    std::size_t begin = 0;
    while (true) {
        const auto end = text.find(sep, begin);
        out.push_back(trim(text.substr(begin, end == std::string_view::npos ? std::string_view::npos : end - begin)));
        if (end == std::string_view::npos) break;
        begin = end + 1;
    }
    return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& why) {
    throw ConfigError(key + " = '" + value + "': " + why);
}

double number(const Settings& s, const std::string& key) {
    const auto& v = s.get(key);
    try {
        return parse_double(trim(v));
    } catch (const std::exception&) {
        bad_value(key, v, "not a number");
    }
}

double positive(const Settings& s, const std::string& key) {
    const double x = number(s, key);
    if (!(x > 0.0)) bad_value(key, s.get(key), "must be positive");
    return x;
}

std::uint64_t unsigned_integer(const Settings& s, const std::string& key) {
    const auto text = trim(s.get(key));
    std::uint64_t x = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        bad_value(key, s.get(key), "not a non-negative integer");
    }
    return x;
}

bool boolean(const Settings& s, const std::string& key) {
    auto v = trim(s.get(key));
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    bad_value(key, s.get(key), "not a boolean");
}

double duration(const Settings& s, const std::string& key) {
    try {
        return parse_duration(s.get(key));
    } catch (const std::invalid_argument& e) {
        bad_value(key, s.get(key), e.what());
    }
}

std::vector<double> number_list(const Settings& s, const std::string& key) {
    std::vector<double> out;
    for (const auto& item : split_list(s.get(key), ',')) {
        try {
            out.push_back(parse_double(item));
        } catch (const std::exception&) {
            bad_value(key, s.get(key), "bad list item '" + item + "'");
        }
    }
    return out;
}

Eigen::MatrixXd matrix(const Settings& s, const std::string& key) {
    const auto rows = split_list(s.get(key), ';');
    if (rows.empty()) bad_value(key, s.get(key), "empty matrix");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto cells = split_list(rows[i], ',');
        if (cells.size() != rows.size()) bad_value(key, s.get(key), "matrix must be square");
        for (std::size_t j = 0; j < cells.size(); ++j) {
            try {
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = parse_double(cells[j]);
            } catch (const std::exception&) {
                bad_value(key, s.get(key), "bad entry '" + cells[j] + "'");
            }
        }
    }
    return m;
}

} // namespace

Settings::Settings() : values_(defaults()) {}

void Settings::load_file(const fs::path& path) {
    if (!fs::exists(path)) throw ConfigError("config file not found: " + path.string());
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(path.string(), tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("config file: ") + e.what());
    }
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw ConfigError(path.string() + ": key '" + section + "' outside a [section]");
        for (const auto& [key, value] : body) set(section + "." + key, value.get_value<std::string>());
    }
}

void Settings::set(const std::string& key, const std::string& value) {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second = trim(value);
}

void Settings::set_assignment(std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
    set(trim(assignment.substr(0, eq)), std::string(assignment.substr(eq + 1)));
}

const std::string& Settings::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
    return it->second;
}

std::string Settings::canonical() const {
    std::string out;
    for (const auto& [key, value] : values_) {
        // The output location does not change any result.
        if (key == "run.out") continue;
        out += key;
        out += '=';
        out += value;
        out += '\n';
    }
    return out;
}

double parse_duration(std::string_view text) {
    const auto s = trim(text);
    if (s.empty()) throw std::invalid_argument("empty duration");
    if (s.find(':') != std::string::npos) {
        const auto parts = split_list(s, ':');
        if (parts.size() < 2 || parts.size() > 3) throw std::invalid_argument("expected HH:MM[:SS]");
        double total = 0.0;
        double unit = 3600.0;
        for (const auto& p : parts) {
            total += parse_double(p) * unit;
            unit /= 60.0;
        }
        return total;
    }
    double total = 0.0;
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t j = i;
        while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.' || s[j] == 'e' ||
                                s[j] == 'E' || s[j] == '+' || s[j] == '-')) {
            ++j;
        }
        if (j == i) throw std::invalid_argument("bad duration '" + s + "'");
        const double value = parse_double(std::string_view(s).substr(i, j - i));
        double unit = 1.0;
        if (j < s.size()) {
            switch (s[j]) {
            case 'h': unit = 3600.0; break;
            case 'm': unit = 60.0; break;
            case 's': unit = 1.0; break;
            default: throw std::invalid_argument("bad duration unit in '" + s + "'");
            }
            ++j;
        } else if (i != 0) {
            throw std::invalid_argument("missing unit in '" + s + "'");
        }
        total += value * unit;
        i = j;
    }
    return total;
}

RunConfig make_run_config(const Settings& s) {
    RunConfig c;
    c.seed = unsigned_integer(s, "run.seed");
    c.out = s.get("run.out");
    for (const auto& p : split_list(s.get("data.inputs"), ',')) c.inputs.emplace_back(p);

    try {
        c.format = lob::format_by_name(trim(s.get("data.format")));
    } catch (const Error&) {
        bad_value("data.format", s.get("data.format"), "expected levels-10 or lobster-like");
    }
    const auto& delim = s.get("data.delimiter");
    if (delim == "tab" || delim == "\\t") {
        c.format.delimiter = '\t';
    } else if (delim.size() == 1) {
        c.format.delimiter = delim[0];
    } else {
        bad_value("data.delimiter", delim, "expected one character or 'tab'");
    }
    c.format.header = boolean(s, "data.header");
    c.format.price_scale = positive(s, "data.price_scale");
    c.format.time_scale = positive(s, "data.time_scale");
    c.tick = positive(s, "data.tick");
    c.format.tick = c.tick;
    c.max_reject_ratio = number(s, "data.max_reject_ratio");
    if (!(c.max_reject_ratio >= 0.0 && c.max_reject_ratio <= 1.0)) {
        bad_value("data.max_reject_ratio", s.get("data.max_reject_ratio"), "must be in [0, 1]");
    }
    const bool has_open = !s.get("data.session_open").empty();
    const bool has_close = !s.get("data.session_close").empty();
    if (has_open != has_close) throw ConfigError("data.session_open and data.session_close must be set together");
    if (has_open) {
        lob::SessionCalendar cal{duration(s, "data.session_open"), duration(s, "data.session_close"),
                                 duration(s, "data.day_length")};
        if (!(cal.day_length > 0.0) || !(cal.open >= 0.0) || !(cal.open < cal.close) || cal.close > cal.day_length) {
            throw ConfigError("session hours must satisfy 0 <= open < close <= day_length");
        }
        c.calendar = cal;
    }

    const auto kinds = split_list(s.get("model.kinds"), ',');
    if (kinds.size() == 1 && (kinds[0] == "all" || kinds[0] == "ALL")) {
        c.kinds = all_model_kinds();
    } else {
        for (const auto& k : kinds) {
            try {
                const auto kind = parse_model_kind(k);
                if (std::find(c.kinds.begin(), c.kinds.end(), kind) == c.kinds.end()) c.kinds.push_back(kind);
            } catch (const std::exception&) {
                bad_value("model.kinds", s.get("model.kinds"), "unknown kind '" + k + "'");
            }
        }
    }
    if (c.kinds.empty()) bad_value("model.kinds", s.get("model.kinds"), "no model kinds");

    c.calibration.nsdo_states = unsigned_integer(s, "model.nsdo_states");
    if (c.calibration.nsdo_states < 2) bad_value("model.nsdo_states", s.get("model.nsdo_states"), "must be >= 2");
    c.calibration.window_sizes = number_list(s, "model.window_sizes");
    if (c.calibration.window_sizes.empty()) bad_value("model.window_sizes", "", "no window sizes");
    for (double n : c.calibration.window_sizes) {
        if (!(n > 0.0)) bad_value("model.window_sizes", s.get("model.window_sizes"), "sizes must be positive");
    }
    c.calibration.min_windows = unsigned_integer(s, "model.min_windows");
    if (c.calibration.min_windows < 2) bad_value("model.min_windows", s.get("model.min_windows"), "must be >= 2");
    c.calibration.min_events = unsigned_integer(s, "model.min_events");
    const auto formula = trim(s.get("model.error_formula"));
    if (formula == "derivation") {
        c.calibration.formula = ErrorRateFormula::DerivationConsistent;
    } else if (formula == "printed") {
        c.calibration.formula = ErrorRateFormula::Printed;
    } else {
        bad_value("model.error_formula", formula, "expected derivation or printed");
    }
    const auto starts = unsigned_integer(s, "model.starts");
    if (starts < 1 || starts > 1024) bad_value("model.starts", s.get("model.starts"), "must be in [1, 1024]");
    c.calibration.hawkes.starts = static_cast<int>(starts);

    try {
        c.predict.method = parse_predict_method(trim(s.get("predict.method")));
    } catch (const std::exception&) {
        bad_value("predict.method", s.get("predict.method"),
                  "expected DiffusiveMean, DiffusiveNoisy, JumpDiffusionNoisy or MonteCarlo");
    }
    c.predict.train_len = duration(s, "predict.train");
    c.predict.test_len = duration(s, "predict.test");
    c.predict.step = duration(s, "predict.step");
    c.predict.alpha3 = number(s, "predict.alpha3");
    c.predict.alpha2 = number(s, "predict.alpha2");
    c.predict.paths = unsigned_integer(s, "predict.paths");
    c.predict.draws = unsigned_integer(s, "predict.draws");
    c.predict.seed = c.seed;
    c.dump_paths = boolean(s, "predict.dump_paths");
    c.predict.keep_endpoints = c.dump_paths;
    try {
        c.predict.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("predict: ") + e.what());
    }

    c.diagnose.tau = positive(s, "diagnose.tau");
    c.diagnose.lags = number_list(s, "diagnose.lags");
    for (double d : c.diagnose.lags) {
        if (!(d >= 0.0)) bad_value("diagnose.lags", s.get("diagnose.lags"), "lags must be non-negative");
    }
    c.diagnose.bins = unsigned_integer(s, "diagnose.bins");
    c.diagnose.cdf_points = unsigned_integer(s, "diagnose.cdf_points");
    if (c.diagnose.bins < 1) bad_value("diagnose.bins", s.get("diagnose.bins"), "must be >= 1");
    if (c.diagnose.cdf_points < 2) bad_value("diagnose.cdf_points", s.get("diagnose.cdf_points"), "must be >= 2");

    try {
        c.generator.hawkes = HawkesParams(number(s, "simulate.lambda"), number(s, "simulate.alpha"),
                                          number(s, "simulate.beta"));
        c.generator.values = number_list(s, "simulate.values");
        c.generator.P = TransitionMatrix(matrix(s, "simulate.transition"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("simulate: ") + e.what());
    }
    if (c.generator.values.size() != c.generator.P.size()) {
        throw ConfigError("simulate.values and simulate.transition disagree on the number of states");
    }
    c.generator.initial_state = unsigned_integer(s, "simulate.initial_state");
    if (c.generator.initial_state >= c.generator.values.size()) {
        bad_value("simulate.initial_state", s.get("simulate.initial_state"), "no such state");
    }
    c.generator.s0 = positive(s, "simulate.s0");
    c.generator.tick = c.tick;
    c.days = unsigned_integer(s, "simulate.days");
    if (c.days < 1) bad_value("simulate.days", s.get("simulate.days"), "must be >= 1");

    c.provenance = {content_hash(s.canonical()), c.seed};
    return c;
}

std::vector<fs::path> resolve_inputs(const std::vector<fs::path>& inputs) {
    std::vector<fs::path> out;
    for (const auto& p : inputs) {
        if (!fs::exists(p)) throw InputError("input not found: " + p.string());
        if (!fs::is_directory(p)) {
            out.push_back(p);
            continue;
        }
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(p)) {
            if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        out.insert(out.end(), files.begin(), files.end());
    }
    if (out.empty()) throw InputError("no input files");
    return out;
}

} // namespace gchp::cli
