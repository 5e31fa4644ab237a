#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "liquiforge/core/error.hpp"
#include "liquiforge/lva/netting.hpp"
#include "liquiforge/market/curve.hpp"
#include "liquiforge/market/model.hpp"
#include "liquiforge/products/products.hpp"
#include "liquiforge/reporting/manifest.hpp"
#include "liquiforge/sensitivity/regression.hpp"

namespace liquiforge {

inline constexpr double kDaysPerYear = 365.0;

struct ProductConfig {
    std::string id;
    ProductSpec spec;
};

struct StudyOptions {
    std::size_t halvings = 3;
    std::size_t base_steps = 5;
    std::size_t bootstrap = 200;
    std::size_t report_paths = 100;
};

struct RunConfig {
    ModelSpec model;
    TimeGrid grid = TimeGrid::uniform(5.0, 20);
    std::size_t paths = 10000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::vector<ProductConfig> products;
    std::vector<NettingConvention> conventions = all_conventions();
    std::vector<double> gaps_days{1.0, 5.0, 10.0, 20.0};
    RegressionBasis basis;
    StudyOptions study;
    std::string output_dir = "reports";
    std::vector<ReportFormat> formats{ReportFormat::CSV, ReportFormat::JSON};
    bool assertions = true;
    std::string hash;  // CRC-32 of the canonical config text
};

namespace config_detail {

using json = nlohmann::json;

[[noreturn]] inline void invalid(const std::string& path, const std::string& what) {
    fail(ErrorCode::ConfigInvalid, (path.empty() ? std::string("/") : path) + ": " + what);
}

inline void only_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
    if (!j.is_object()) invalid(path, "expected an object");
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) invalid(path + "/" + k, "unknown key");
}

inline const json& member(const json& j, const std::string& path, const std::string& key) {
    if (!j.contains(key)) invalid(path + "/" + key, "required");
    return j.at(key);
}

inline double number(const json& j, const std::string& path, double lo = -1e300, double hi = 1e300) {
    if (!j.is_number()) invalid(path, "expected a number");
    const double v = j.get<double>();
    if (!(v >= lo && v <= hi)) invalid(path, "out of range [" + format_number(lo) + ", " + format_number(hi) + "]");
    return v;
}

inline std::uint64_t integer(const json& j, const std::string& path, std::uint64_t lo, std::uint64_t hi) {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<long long>() < 0))
        invalid(path, "expected a non-negative integer");
    const auto v = j.get<std::uint64_t>();
    if (v < lo || v > hi) invalid(path, "out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
}

inline std::string text(const json& j, const std::string& path, const std::set<std::string>& allowed = {}) {
    if (!j.is_string()) invalid(path, "expected a string");
    auto s = j.get<std::string>();
    if (!allowed.empty() && !allowed.count(s)) {
        std::string list;
        for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
        invalid(path, "'" + s + "' is not one of {" + list + "}");
    }
    return s;
}

inline bool boolean(const json& j, const std::string& path) {
    if (!j.is_boolean()) invalid(path, "expected true or false");
    return j.get<bool>();
}

inline std::vector<double> numbers(const json& j, const std::string& path, double lo = -1e300) {
    if (!j.is_array()) invalid(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t k = 0; k < j.size(); ++k) out.push_back(number(j[k], path + "/" + std::to_string(k), lo));
    return out;
}

inline std::vector<DiscountCurve::Node> pairs(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) invalid(path, "expected a non-empty array of [t, value] pairs");
    std::vector<DiscountCurve::Node> out;
    for (std::size_t k = 0; k < j.size(); ++k) {
        const auto p = path + "/" + std::to_string(k);
        if (!j[k].is_array() || j[k].size() != 2) invalid(p, "expected [t, value]");
        out.emplace_back(number(j[k][0], p + "/0", 0.0), number(j[k][1], p + "/1"));
    }
    return out;
}

inline DiscountCurve parse_curve(const json& j, const std::string& path) {
    if (!j.is_object()) invalid(path, "expected an object");
    if (j.contains("flat_rate")) {
        only_keys(j, path, {"flat_rate", "spread", "horizon"});
        const double r = number(j["flat_rate"], path + "/flat_rate", -0.5, 1.0);
        const double s = j.contains("spread") ? number(j["spread"], path + "/spread", -0.5, 1.0) : 0.0;
        const double h = j.contains("horizon") ? number(j["horizon"], path + "/horizon", 1e-6, 200.0) : 30.0;
        return DiscountCurve::flat(CurveKind::FUNDING, r, h, s);
    }
    only_keys(j, path, {"ois", "spread"});
    auto ois = pairs(member(j, path, "ois"), path + "/ois");
    std::vector<DiscountCurve::Node> spread;
    if (j.contains("spread")) spread = pairs(j["spread"], path + "/spread");
    try {
        return DiscountCurve(CurveKind::FUNDING, std::move(ois), std::move(spread));
    } catch (const Error& e) {
        invalid(path, e.what());
    }
}

inline ModelSpec parse_model(const json& j, const std::string& path) {
    only_keys(j, path,
              {"kind", "mean_reversion", "volatility", "curve", "L0", "sigma", "T1", "T2", "discount_T1", "numeraire",
               "numeraire_maturity"});
    ModelSpec m;
    const auto kind = text(member(j, path, "kind"), path + "/kind", {"DETERMINISTIC", "BLACK_SINGLE_PERIOD", "GAUSSIAN_SHORT_RATE"});
    if (kind == "BLACK_SINGLE_PERIOD") {
        m.kind = ModelKind::BLACK_SINGLE_PERIOD;
        for (const char* k : {"mean_reversion", "volatility", "curve"})
            if (j.contains(k)) invalid(path + "/" + k, "not a Black model parameter");
        if (j.contains("L0")) m.black.L0 = number(j["L0"], path + "/L0", -0.5, 1.0);
        if (j.contains("sigma")) m.black.sigma = number(j["sigma"], path + "/sigma", 0.0, 5.0);
        if (j.contains("T1")) m.black.T1 = number(j["T1"], path + "/T1", 1e-6, 100.0);
        if (j.contains("T2")) m.black.T2 = number(j["T2"], path + "/T2", 1e-6, 100.0);
        if (j.contains("discount_T1")) m.black.discount_T1 = number(j["discount_T1"], path + "/discount_T1", 1e-12, 10.0);
        if (m.black.T2 <= m.black.T1) invalid(path + "/T2", "must exceed T1");
        m.numeraire = NumeraireChoice::terminal_bond(m.black.T2);
        if (j.contains("numeraire") && text(j["numeraire"], path + "/numeraire") != "TERMINAL_BOND")
            invalid(path + "/numeraire", "the Black model runs under the T2-bond measure");
        return m;
    }
    for (const char* k : {"L0", "sigma", "T1", "T2", "discount_T1"})
        if (j.contains(k)) invalid(path + "/" + k, "not a short-rate model parameter");
    m.kind = kind == "DETERMINISTIC" ? ModelKind::DETERMINISTIC : ModelKind::GAUSSIAN_SHORT_RATE;
    if (j.contains("mean_reversion")) m.gaussian.mean_reversion = number(j["mean_reversion"], path + "/mean_reversion", 0.0, 10.0);
    if (j.contains("volatility")) m.gaussian.volatility = number(j["volatility"], path + "/volatility", 0.0, 1.0);
    if (m.kind == ModelKind::DETERMINISTIC) {
        if (m.gaussian.volatility != 0.0) invalid(path + "/volatility", "a deterministic model has zero volatility");
        m.gaussian.volatility = 0.0;
    }
    if (j.contains("curve")) m.gaussian.curve = parse_curve(j["curve"], path + "/curve");
    const auto num = j.contains("numeraire") ? text(j["numeraire"], path + "/numeraire", {"FUNDING_ACCOUNT", "TERMINAL_BOND"})
                                             : std::string("FUNDING_ACCOUNT");
    if (num == "TERMINAL_BOND")
        m.numeraire = NumeraireChoice::terminal_bond(number(member(j, path, "numeraire_maturity"), path + "/numeraire_maturity", 1e-6));
    else if (j.contains("numeraire_maturity"))
        invalid(path + "/numeraire_maturity", "only used with the TERMINAL_BOND numeraire");
    return m;
}

inline TimeGrid parse_grid(const json& j, const std::string& path) {
    if (!j.is_object()) invalid(path, "expected an object");
    try {
        if (j.contains("times")) {
            only_keys(j, path, {"times"});
            return TimeGrid(numbers(j["times"], path + "/times", 0.0));
        }
        only_keys(j, path, {"horizon", "steps"});
        return TimeGrid::uniform(number(member(j, path, "horizon"), path + "/horizon", 1e-6, 100.0),
                                 integer(member(j, path, "steps"), path + "/steps", 1, 100000));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigInvalid) throw;
        invalid(path, e.what());
    }
}

inline StoppingTimeSpec parse_tau(const json& j, const std::string& path) {
    const auto kind = text(member(j, path, "kind"), path + "/kind", {"deterministic", "state_above", "coin"});
    if (kind == "deterministic") {
        only_keys(j, path, {"kind", "time"});
        return StoppingTimeSpec::deterministic(number(member(j, path, "time"), path + "/time", 0.0));
    }
    if (kind == "state_above") {
        only_keys(j, path, {"kind", "level"});
        return StoppingTimeSpec::state_above(number(member(j, path, "level"), path + "/level"));
    }
    only_keys(j, path, {"kind", "probability"});
    return StoppingTimeSpec::coin(number(member(j, path, "probability"), path + "/probability", 0.0, 1.0));
}

inline ProductConfig parse_product(const json& j, const std::string& path) {
    only_keys(j, path, {"id", "kind", "strike", "schedule", "exercise", "notional", "accrual", "tau"});
    ProductConfig p;
    static const std::map<std::string, ProductKind> kinds{
        {"FRA", ProductKind::FRA},
        {"CAPLET", ProductKind::CAPLET},
        {"SWAP", ProductKind::SWAP},
        {"SWAPTION_PHYSICAL", ProductKind::SWAPTION_PHYSICAL},
        {"SWAPTION_CASH", ProductKind::SWAPTION_CASH},
        {"UNIT_AT_TAU", ProductKind::UNIT_AT_TAU},
        {"DIGITAL_PAIR", ProductKind::DIGITAL_PAIR}};
    std::set<std::string> names;
    for (const auto& [k, v] : kinds) names.insert(k);
    const auto kind = text(member(j, path, "kind"), path + "/kind", names);
    p.spec.kind = kinds.at(kind);
    p.id = j.contains("id") ? text(j["id"], path + "/id") : kind;
    if (j.contains("strike")) p.spec.strike = number(j["strike"], path + "/strike", -1.0, 10.0);
    if (j.contains("schedule")) p.spec.schedule = numbers(j["schedule"], path + "/schedule", 0.0);
    if (j.contains("exercise")) p.spec.exercise = number(j["exercise"], path + "/exercise", 0.0);
    if (j.contains("notional")) p.spec.notional = number(j["notional"], path + "/notional");
    if (j.contains("accrual")) p.spec.accrual = boolean(j["accrual"], path + "/accrual");
    if (j.contains("tau")) p.spec.tau = parse_tau(j["tau"], path + "/tau");
    const bool single = kind == "FRA" || kind == "CAPLET" || kind == "DIGITAL_PAIR";
    if (single && p.spec.schedule.size() != 2) invalid(path + "/schedule", "expected [T1, T2]");
    if ((kind == "SWAP" || kind.rfind("SWAPTION", 0) == 0) && p.spec.schedule.size() < 2)
        invalid(path + "/schedule", "expected at least two dates");
    if (kind.rfind("SWAPTION", 0) == 0 && !p.spec.exercise) invalid(path + "/exercise", "required");
    if (kind == "UNIT_AT_TAU" && !p.spec.tau) invalid(path + "/tau", "required");
    return p;
}

} // namespace config_detail

inline RunConfig parse_run_config(const nlohmann::json& j) {
    using namespace config_detail;
    only_keys(j, "", {"model", "grid", "paths", "seed", "threads", "products", "conventions", "gaps_days", "regression", "study",
                      "outputs", "assertions"});
    RunConfig c;
    c.model = parse_model(member(j, "", "model"), "/model");
    c.grid = parse_grid(member(j, "", "grid"), "/grid");
    if (j.contains("paths")) c.paths = integer(j["paths"], "/paths", 1, 100000000);
    if (j.contains("seed")) c.seed = integer(j["seed"], "/seed", 0, UINT64_MAX);
    if (j.contains("threads")) c.threads = static_cast<unsigned>(integer(j["threads"], "/threads", 1, 1024));
    if (j.contains("products")) {
        const auto& arr = j["products"];
        if (!arr.is_array()) invalid("/products", "expected an array");
        std::set<std::string> ids;
        for (std::size_t k = 0; k < arr.size(); ++k) {
            c.products.push_back(parse_product(arr[k], "/products/" + std::to_string(k)));
            if (!ids.insert(c.products.back().id).second) invalid("/products/" + std::to_string(k) + "/id", "duplicate id");
        }
    }
    if (j.contains("conventions")) {
        const auto& arr = j["conventions"];
        if (!arr.is_array()) invalid("/conventions", "expected an array");
        c.conventions.clear();
        for (std::size_t k = 0; k < arr.size(); ++k)
            c.conventions.push_back(
                netting_convention_from_string(text(arr[k], "/conventions/" + std::to_string(k), {"X", "PHI", "REB", "KAPPA"})));
    }
    if (j.contains("gaps_days")) c.gaps_days = numbers(j["gaps_days"], "/gaps_days", 0.0);
    if (j.contains("regression")) {
        const auto& r = j["regression"];
        only_keys(r, "/regression", {"degree", "include_terminal_bond"});
        if (r.contains("degree")) c.basis.degree = static_cast<int>(integer(r["degree"], "/regression/degree", 0, 6));
        if (r.contains("include_terminal_bond"))
            c.basis.include_terminal_bond = boolean(r["include_terminal_bond"], "/regression/include_terminal_bond");
    }
    if (j.contains("study")) {
        const auto& s = j["study"];
        only_keys(s, "/study", {"halvings", "base_steps", "bootstrap", "report_paths"});
        if (s.contains("halvings")) c.study.halvings = integer(s["halvings"], "/study/halvings", 0, 10);
        if (s.contains("base_steps")) c.study.base_steps = integer(s["base_steps"], "/study/base_steps", 1, 10000);
        if (s.contains("bootstrap")) c.study.bootstrap = integer(s["bootstrap"], "/study/bootstrap", 0, 100000);
        if (s.contains("report_paths")) c.study.report_paths = integer(s["report_paths"], "/study/report_paths", 0, 100000000);
    }
    if (j.contains("outputs")) {
        const auto& o = j["outputs"];
        only_keys(o, "/outputs", {"directory", "formats"});
        if (o.contains("directory")) c.output_dir = text(o["directory"], "/outputs/directory");
        if (o.contains("formats")) {
            if (!o["formats"].is_array() || o["formats"].empty()) invalid("/outputs/formats", "expected a non-empty array");
            c.formats.clear();
            for (std::size_t k = 0; k < o["formats"].size(); ++k)
                c.formats.push_back(text(o["formats"][k], "/outputs/formats/" + std::to_string(k), {"CSV", "JSON"}) == "CSV"
                                        ? ReportFormat::CSV
                                        : ReportFormat::JSON);
        }
    }
    if (j.contains("assertions")) c.assertions = boolean(j["assertions"], "/assertions");
    try {
        c.model.validate();
    } catch (const Error& e) {
        invalid("/model", e.what());
    }
    c.hash = crc32_hex(j.dump());
    return c;
}

inline nlohmann::json read_config_json(const std::string& file) {
    std::ifstream in(file);
    if (!in) fail(ErrorCode::ConfigInvalid, file + ": cannot open");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorCode::ConfigInvalid, file + ": " + e.what());
    }
}

inline RunConfig load_run_config(const std::string& file) { return parse_run_config(read_config_json(file)); }

} // namespace liquiforge
