#include "gchp/report_json.hpp"

#include "gchp/error.hpp"

#include <nlohmann/json.hpp>

namespace gchp {

using nlohmann::json;

namespace {

json provenance_json(const Provenance& p) {
    return json{{"config_hash", p.config_hash}, {"seed", p.seed}};
}

json vector_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

json model_json(const GchpModel& m) {
    json P = json::array();
    for (std::size_t i = 0; i < m.P.size(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.P.size(); ++j) row.push_back(m.P(i, j));
        P.push_back(std::move(row));
    }
    return json{
        {"states", m.space.values()},
        {"transition", std::move(P)},
        {"stationary", vector_json(m.pi.pi)},
        {"a_star", m.limits.a_star},
        {"sigma", m.limits.sigma()},
        {"sigma_star", m.limits.sigma_star},
        {"sigma_bar", m.limits.sigma_bar},
    };
}

json curve_json(const DeviationCurve& c) {
    json points = json::array();
    for (const auto& p : c.points) {
        points.push_back({{"window", p.window}, {"blocks", p.windows}, {"std", p.std_dev}});
    }
    json skipped = json::array();
    for (const auto& s : c.skipped) skipped.push_back({{"window", s.window}, {"reason", s.reason}});
    return json{{"points", std::move(points)}, {"skipped", std::move(skipped)}};
}

} // namespace

std::string fit_report_json(const FitReport& report, int session_id, const Provenance& provenance) {
    json doc;
    doc["session"] = session_id;
    doc["provenance"] = provenance_json(provenance);
    doc["events"] = report.events;
    doc["horizon"] = report.horizon;
    if (report.hawkes) {
        const auto& h = *report.hawkes;
        doc["hawkes"] = {{"lambda", h.params.lambda0()},
                         {"alpha", h.params.alpha()},
                         {"beta", h.params.beta()},
                         {"branching_ratio", h.params.branching_ratio()},
                         {"log_likelihood", h.log_likelihood},
                         {"evaluations", h.evaluations},
                         {"boundary_starts", h.boundary_starts}};
    }
    json kinds = json::array();
    for (const auto& k : report.kinds) {
        json entry{{"kind", to_string(k.kind)}, {"ok", k.ok()}};
        if (k.model) entry["model"] = model_json(*k.model);
        if (!k.curve.points.empty() || !k.curve.skipped.empty()) entry["curve"] = curve_json(k.curve);
        if (k.regression) {
            entry["c"] = k.regression->c;
            entry["theoretical"] = k.regression->theoretical;
            entry["error_rate"] = k.regression->error_rate;
        }
        if (!k.error.empty()) entry["error"] = k.error;
        kinds.push_back(std::move(entry));
    }
    doc["kinds"] = std::move(kinds);
    doc["chosen"] = to_string(report.chosen);
    return doc.dump(2) + "\n";
}

std::string fit_failure_json(int session_id, const std::string& reason, const Provenance& provenance) {
    json doc{{"session", session_id}, {"provenance", provenance_json(provenance)}, {"skipped", reason}};
    return doc.dump(2) + "\n";
}

std::string backtest_report_json(const BacktestReport& report, const Provenance& provenance) {
    const auto& c = report.config;
    json doc;
    doc["session"] = report.session_id;
    doc["provenance"] = provenance_json(provenance);
    doc["config"] = {{"train", c.train_len}, {"test", c.test_len},     {"step", c.step},
                     {"alpha3", c.alpha3},   {"alpha2", c.alpha2},     {"method", to_string(c.method)},
                     {"paths", c.paths},     {"draws", c.draws},       {"seed", c.seed}};
    json records = json::array();
    for (const auto& r : report.records) {
        json e{{"window", r.window},
               {"start", r.start},
               {"kind", to_string(r.kind)},
               {"error_rate", r.error_rate},
               {"lambda", r.lambda0},
               {"alpha", r.alpha},
               {"beta", r.beta},
               {"a_star", r.a_star},
               {"sigma_star", r.sigma_star},
               {"sigma_bar", r.sigma_bar},
               {"last_state", r.last_state},
               {"s0", r.s0},
               {"s_true", r.s_true},
               {"s_pred", r.s_pred},
               {"delta_true", r.delta_true},
               {"delta_pred", r.delta_pred},
               {"true3", to_string(r.true3)},
               {"pred3", to_string(r.pred3)},
               {"true2", to_string(r.true2)},
               {"pred2", to_string(r.pred2)}};
        records.push_back(std::move(e));
    }
    doc["records"] = std::move(records);
    json skipped = json::array();
    for (const auto& s : report.skipped) {
        skipped.push_back({{"window", s.window}, {"start", s.start}, {"reason", s.reason}});
    }
    doc["skipped"] = std::move(skipped);
    doc["confusion3"] = report.confusion3;
    doc["confusion2"] = report.confusion2;
    if (!report.records.empty()) {
        const MetricsSummary m = report_metrics(report);
        auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
        json bins = json::array();
        for (const auto& b : m.histogram) bins.push_back({{"lower", b.lower}, {"upper", b.upper}, {"count", b.count}});
        doc["metrics"] = {{"scored", m.scored},
                          {"accuracy3", m.accuracy3},
                          {"accuracy2", m.accuracy2},
                          {"recall3", {opt(m.recall3[0]), opt(m.recall3[1]), opt(m.recall3[2])}},
                          {"recall2", {opt(m.recall2[0]), opt(m.recall2[1])}},
                          {"error_mean", m.error_mean},
                          {"error_std", m.error_std},
                          {"histogram", std::move(bins)}};
    }
    return doc.dump(2) + "\n";
}

} // namespace gchp
