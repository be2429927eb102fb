#pragma once

// Line-oriented config files with named blocks. Hand-editable, diff-able:
//
//   [model]
//   alpha = 0.5
//   cs = 10
//   cm = 10
//   support = 40 60 80
//   probs = 0.2 0.5 0.3
//
//   [report]
//   class = greedy            # identity | greedy | general
//   row = 1 0 0               # one line per matrix row, omitted for identity
//   row = 0.5 0.5 0
//   row = 0.5 0 0.5
//
//   [policy]
//   kind = I                  # I (deviation penalty) | II (demand feedback)
//   pi = 5
//
//   [sim]
//   horizon = 10000
//   seed = 42
//   noise = 0
//   replications = 1
//
// '#' starts a comment. Parse errors carry 1-based line numbers.

#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "scgame/errors.hpp"
#include "scgame/market.hpp"
#include "scgame/report.hpp"
#include "scgame/sim.hpp"

namespace scgame {

struct ParsedConfig {
    std::optional<MarketModel> model;
    std::optional<ReportPolicy> report;
    std::optional<PunitiveSpec> policy;
    std::int64_t horizon = 1;
    std::uint64_t seed = 1;
    double noise = 0.0;
    int replications = 1;
    bool has_sim = false;

    const MarketModel& need_model() const {
        if (!model) throw ConfigError("config is missing the [model] section");
        return *model;
    }
    const ReportPolicy& need_report() const {
        if (!report) throw ConfigError("config is missing the [report] section");
        return *report;
    }
    const PunitiveSpec& need_policy() const {
        if (!policy) throw ConfigError("config is missing the [policy] section");
        return *policy;
    }

    SimConfig sim_config() const {
        SimConfig cfg{need_model(), need_report(), need_policy(), horizon, seed, noise, false};
        return cfg;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& tok, int line) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &used);
    } catch (const std::exception&) {
        throw ConfigError("expected a number, got '" + tok + "'", line);
    }
    if (used != tok.size()) throw ConfigError("trailing characters after number '" + tok + "'", line);
    return v;
}

inline std::vector<double> parse_list(const std::string& value, int line) {
    std::istringstream is(value);
    std::vector<double> out;
    std::string tok;
    while (is >> tok) out.push_back(parse_double(tok, line));
    if (out.empty()) throw ConfigError("expected a list of numbers", line);
    return out;
}

} // namespace detail

/// Parses a config stream. `origin` names the source in error messages only.
inline ParsedConfig parse_config(std::istream& in, const std::string& origin = "config") {
    using detail::parse_double;
    using detail::parse_list;
    using detail::trim;

    struct ModelFields {
        std::optional<double> alpha, cs, cm;
        std::vector<double> support, probs;
        int line = 0;
    } mf;
    struct ReportFields {
        std::optional<ReportClass> cls;
        ReportPolicy::Matrix rows;
        int line = 0;
    } rf;
    struct PolicyFields {
        std::optional<PolicyKind> kind;
        std::optional<double> pi;
        int line = 0;
    } pf;

    ParsedConfig out;
    std::string section;
    std::string raw;
    int line = 0;
    bool saw_model = false, saw_report = false, saw_policy = false;

    while (std::getline(in, raw)) {
        ++line;
        const std::size_t hash = raw.find('#');
        std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (text.empty()) continue;
        if (text.front() == '[') {
            if (text.back() != ']') throw ConfigError("unterminated section header", line);
            section = text.substr(1, text.size() - 2);
            if (section == "model") {
                saw_model = true;
                mf.line = line;
            } else if (section == "report") {
                saw_report = true;
                rf.line = line;
            } else if (section == "policy") {
                saw_policy = true;
                pf.line = line;
            } else if (section == "sim") {
                out.has_sim = true;
            } else {
                throw ConfigError("unknown section [" + section + "]", line);
            }
            continue;
        }
        const std::size_t eq = text.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (section.empty()) throw ConfigError("key '" + key + "' outside any section", line);

        if (section == "model") {
            if (key == "alpha") mf.alpha = parse_double(value, line);
            else if (key == "cs") mf.cs = parse_double(value, line);
            else if (key == "cm") mf.cm = parse_double(value, line);
            else if (key == "support") mf.support = parse_list(value, line);
            else if (key == "probs") mf.probs = parse_list(value, line);
            else throw ConfigError("unknown [model] key '" + key + "'", line);
        } else if (section == "report") {
            if (key == "class") {
                if (value == "identity") rf.cls = ReportClass::identity;
                else if (value == "greedy") rf.cls = ReportClass::greedy;
                else if (value == "general") rf.cls = ReportClass::general;
                else throw ConfigError("unknown report class '" + value + "'", line);
            } else if (key == "row") {
                rf.rows.push_back(parse_list(value, line));
            } else {
                throw ConfigError("unknown [report] key '" + key + "'", line);
            }
        } else if (section == "policy") {
            if (key == "kind") {
                if (value == "I" || value == "1") pf.kind = PolicyKind::deviation;
                else if (value == "II" || value == "2") pf.kind = PolicyKind::demand;
                else throw ConfigError("policy kind must be I or II, got '" + value + "'", line);
            } else if (key == "pi") {
                pf.pi = parse_double(value, line);
            } else {
                throw ConfigError("unknown [policy] key '" + key + "'", line);
            }
        } else if (section == "sim") {
            if (key == "horizon") out.horizon = static_cast<std::int64_t>(parse_double(value, line));
            else if (key == "seed") out.seed = static_cast<std::uint64_t>(parse_double(value, line));
            else if (key == "noise") out.noise = parse_double(value, line);
            else if (key == "replications") out.replications = static_cast<int>(parse_double(value, line));
            else throw ConfigError("unknown [sim] key '" + key + "'", line);
        }
    }

    if (saw_model) {
        if (!mf.alpha || !mf.cs || !mf.cm || mf.support.empty() || mf.probs.empty())
            throw ConfigError("[model] needs alpha, cs, cm, support and probs", mf.line);
        try {
            out.model.emplace(*mf.alpha, *mf.cs, *mf.cm, mf.support, mf.probs);
        } catch (const AssumptionError& e) {
            throw AssumptionError(origin + ": " + e.what());
        } catch (const ModelError& e) {
            throw ConfigError(std::string(e.what()), mf.line);
        }
    }
    if (saw_report) {
        if (!rf.cls) throw ConfigError("[report] needs a class", rf.line);
        if (*rf.cls == ReportClass::identity && rf.rows.empty()) {
            if (!out.model) throw ConfigError("identity report without rows needs a [model] for its size", rf.line);
            out.report = ReportPolicy::identity(out.model->states());
        } else {
            try {
                out.report = ReportPolicy::validated(rf.rows, *rf.cls);
            } catch (const PolicyError& e) {
                throw ConfigError(std::string(e.what()), rf.line);
            }
        }
        if (out.model && out.report->states() != out.model->states())
            throw ConfigError("report matrix is " + std::to_string(out.report->states()) + "x" +
                                  std::to_string(out.report->states()) + " but the model has " +
                                  std::to_string(out.model->states()) + " states",
                              rf.line);
    }
    if (saw_policy) {
        if (!pf.kind || !pf.pi) throw ConfigError("[policy] needs kind and pi", pf.line);
        out.policy = PunitiveSpec{*pf.kind, *pf.pi};
    }
    return out;
}

inline ParsedConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in, path);
}

} // namespace scgame
