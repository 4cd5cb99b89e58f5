#include "cfwp/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

namespace cfwp {

namespace {

void reject_unknown_keys(const Json& obj, const std::vector<std::string>& allowed,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
}

double require_number(const Json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key) || !j[key].is_number())
        throw ConfigError("missing or non-numeric '" + key + "' in " + where);
    return j[key].get<double>();
}

AsymptoticHint parse_hint(const Json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
        throw ConfigError("hint in " + where + " must be an object with a 'type'");
    std::string type = j["type"].get<std::string>();
    if (type == "none") {
        reject_unknown_keys(j, {"type"}, where);
        return AsymptoticHint::none();
    }
    if (type == "power") {
        reject_unknown_keys(j, {"type", "p", "coeff"}, where);
        double p = require_number(j, "p", where);
        double coeff = require_number(j, "coeff", where);
        if (!(coeff > 0.0)) throw ConfigError("hint coeff must be positive in " + where);
        return AsymptoticHint::power(p, coeff);
    }
    if (type == "bounded-below") {
        reject_unknown_keys(j, {"type", "c"}, where);
        double c = require_number(j, "c", where);
        if (!(c > 0.0)) throw ConfigError("hint bound must be positive in " + where);
        return AsymptoticHint::bounded_below(c);
    }
    throw ConfigError("unknown hint type '" + type + "' in " + where);
}

Profile build_profile(const std::string& text, const std::vector<std::string>& names,
                      const ParamBinding& binding, const AsymptoticHint& hint,
                      const std::string& which) {
    try {
        return Profile::symbolic(text, names, binding, hint);
    } catch (const Error& e) {
        throw ConfigError(std::string("geometry.") + which + ": " + e.what());
    }
}

}  // namespace

RunConfig parse_config(const Json& doc) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown_keys(doc, {"geometry", "mode", "sweep", "tolerances", "window"}, "config");

    if (!doc.contains("geometry") || !doc["geometry"].is_object())
        throw ConfigError("config requires a 'geometry' object");
    const Json& g = doc["geometry"];
    reject_unknown_keys(g, {"m", "alpha", "beta", "gamma", "params", "hints"}, "geometry");

    if (!g.contains("m") || !g["m"].is_number_integer())
        throw ConfigError("geometry.m must be an integer");
    int m = g["m"].get<int>();
    if (m < 1) throw ConfigError("geometry.m must be >= 1");

    for (const char* key : {"alpha", "beta"})
        if (!g.contains(key) || !g[key].is_string())
            throw ConfigError(std::string("geometry.") + key + " must be an expression string");

    ParamBinding binding;
    std::vector<std::string> names;
    if (g.contains("params")) {
        if (!g["params"].is_object()) throw ConfigError("geometry.params must be an object");
        for (auto it = g["params"].begin(); it != g["params"].end(); ++it) {
            if (!it.value().is_number())
                throw ConfigError("geometry.params." + it.key() + " must be a number");
            names.push_back(it.key());
            binding.set(it.key(), it.value().get<double>());
        }
    }

    AsymptoticHint ha = AsymptoticHint::none();
    AsymptoticHint hb = AsymptoticHint::none();
    AsymptoticHint hg = AsymptoticHint::none();
    if (g.contains("hints")) {
        if (!g["hints"].is_object()) throw ConfigError("geometry.hints must be an object");
        reject_unknown_keys(g["hints"], {"alpha", "beta", "gamma"}, "geometry.hints");
        if (g["hints"].contains("alpha")) ha = parse_hint(g["hints"]["alpha"], "hints.alpha");
        if (g["hints"].contains("beta")) hb = parse_hint(g["hints"]["beta"], "hints.beta");
        if (g["hints"].contains("gamma")) hg = parse_hint(g["hints"]["gamma"], "hints.gamma");
    }

    // Window: config value, overridable by the environment at the CLI layer.
    Window window;
    if (doc.contains("window")) {
        const Json& w = doc["window"];
        if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number())
            throw ConfigError("window must be [tmin, tmax]");
        window.tmin = w[0].get<double>();
        window.tmax = w[1].get<double>();
        if (!(window.tmin > 0.0) || !(window.tmax > window.tmin))
            throw ConfigError("window requires 0 < tmin < tmax");
    }

    Profile alpha = build_profile(g["alpha"].get<std::string>(), names, binding, ha, "alpha");
    Profile beta = build_profile(g["beta"].get<std::string>(), names, binding, hb, "beta");
    std::optional<Profile> gamma;
    if (g.contains("gamma") && !g["gamma"].is_null()) {
        if (!g["gamma"].is_string())
            throw ConfigError("geometry.gamma must be an expression string or null");
        gamma = build_profile(g["gamma"].get<std::string>(), names, binding, hg, "gamma");
    }

    RunConfig cfg{Json::object(), [&] {
        try {
            return CfwpGeometry(m, std::move(alpha), std::move(beta), std::move(gamma), window);
        } catch (const Error& e) {
            throw ConfigError(std::string("geometry rejected: ") + e.what());
        }
    }(), std::nullopt, std::nullopt, ClassifyOptions{}, window};
    cfg.raw = doc;

    if (doc.contains("mode")) {
        const Json& md = doc["mode"];
        if (!md.is_object()) throw ConfigError("mode must be an object");
        reject_unknown_keys(md, {"k", "l", "epsilon", "lambda"}, "mode");
        for (const char* key : {"k", "l", "epsilon"})
            if (!md.contains(key) || !md[key].is_number_integer())
                throw ConfigError(std::string("mode.") + key + " must be an integer");
        ModeIndex mode;
        mode.k = md["k"].get<int>();
        mode.l = md["l"].get<int>();
        mode.epsilon = md["epsilon"].get<int>();
        mode.lambda = require_number(md, "lambda", "mode");
        try {
            validate_mode(mode, m);
        } catch (const Error& e) {
            throw ConfigError(std::string("mode rejected: ") + e.what());
        }
        cfg.mode = mode;
    }

    if (doc.contains("sweep")) {
        const Json& sw = doc["sweep"];
        if (!sw.is_object()) throw ConfigError("sweep must be an object");
        reject_unknown_keys(sw, {"k", "l", "epsilon", "lambda"}, "sweep");
        if (!sw.contains("k") || !sw["k"].is_array() || sw["k"].size() != 2 ||
            !sw["k"][0].is_number_integer() || !sw["k"][1].is_number_integer())
            throw ConfigError("sweep.k must be [kmin, kmax]");
        SweepGrid grid;
        grid.k_min = sw["k"][0].get<int>();
        grid.k_max = sw["k"][1].get<int>();
        if (sw.contains("l")) {
            if (!sw["l"].is_array()) throw ConfigError("sweep.l must be an array");
            grid.l_values.clear();
            for (const auto& v : sw["l"]) {
                if (!v.is_number_integer()) throw ConfigError("sweep.l entries must be integers");
                grid.l_values.push_back(v.get<int>());
            }
        }
        if (sw.contains("epsilon")) {
            if (!sw["epsilon"].is_array()) throw ConfigError("sweep.epsilon must be an array");
            grid.eps_values.clear();
            for (const auto& v : sw["epsilon"]) {
                if (!v.is_number_integer())
                    throw ConfigError("sweep.epsilon entries must be integers");
                grid.eps_values.push_back(v.get<int>());
            }
        }
        if (!sw.contains("lambda") || !sw["lambda"].is_array())
            throw ConfigError("sweep.lambda must be an array of numbers");
        for (const auto& v : sw["lambda"]) {
            if (!v.is_number()) throw ConfigError("sweep.lambda entries must be numbers");
            grid.lambda_values.push_back(v.get<double>());
        }
        cfg.sweep_grid = grid;
    }

    if (doc.contains("tolerances")) {
        const Json& tol = doc["tolerances"];
        if (!tol.is_object()) throw ConfigError("tolerances must be an object");
        reject_unknown_keys(tol, {"relTol"}, "tolerances");
        if (tol.contains("relTol")) {
            double r = require_number(tol, "relTol", "tolerances");
            if (!(r > 0.0) || r > 1e-2) throw ConfigError("tolerances.relTol out of range");
            cfg.classify.shoot.rel_tol = r;
        }
    }

    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IOError("cannot open config file '" + path + "'");
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    return parse_config(doc);
}

void apply_overrides(Json& doc, const std::vector<std::string>& sets) {
    for (const std::string& kv : sets) {
        auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("--set expects key.path=value, got '" + kv + "'");
        std::string path = kv.substr(0, eq);
        std::string value = kv.substr(eq + 1);

        Json* node = &doc;
        std::size_t pos = 0;
        while (true) {
            auto dot = path.find('.', pos);
            std::string key = path.substr(pos, dot == std::string::npos ? dot : dot - pos);
            if (key.empty()) throw ConfigError("--set: empty key segment in '" + kv + "'");
            if (dot == std::string::npos) {
                Json parsed = Json::parse(value, nullptr, false);
                (*node)[key] = parsed.is_discarded() ? Json(value) : parsed;
                break;
            }
            node = &(*node)[key];
            pos = dot + 1;
        }
    }
}

Window window_from_env(Window fallback) {
    const char* env = std::getenv("CFWP_WINDOW");
    if (!env) return fallback;
    double tmin = 0.0, tmax = 0.0;
    if (std::sscanf(env, "%lf,%lf", &tmin, &tmax) != 2 || !(tmin > 0.0) || !(tmax > tmin))
        throw ConfigError("CFWP_WINDOW must be 'tmin,tmax' with 0 < tmin < tmax");
    return Window{tmin, tmax};
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

Json to_json(const HypothesisReport& rep) {
    Json j;
    j["condition"] = to_string(rep.condition);
    j["status"] = to_string(rep.status);
    Json ev = Json::array();
    for (const auto& [x, v] : rep.evidence) ev.push_back(Json::array({x, v}));
    j["evidence"] = std::move(ev);
    j["narrative"] = rep.narrative;
    return j;
}

Json to_json(const HypothesesOutcome& out) {
    Json arr = Json::array();
    for (const auto& rep : out.reports) arr.push_back(to_json(rep));
    return arr;
}

Json to_json(const ModeIndex& mode) {
    Json j;
    j["k"] = mode.k;
    j["l"] = mode.l;
    j["epsilon"] = mode.epsilon;
    j["lambda"] = mode.lambda;
    return j;
}

Json to_json(const ModeVerdict& v) {
    Json j;
    j["mode"] = to_json(v.mode);
    j["verdict"] = to_string(v.verdict);
    j["hypothesesOk"] = v.hypotheses_ok;
    j["boundedDim"] = v.bounded_dim;
    if (v.matching_residual) j["residual"] = *v.matching_residual;
    else j["residual"] = nullptr;
    j["degenerate"] = v.matching_degenerate;
    Json trajs = Json::array();
    for (const auto& tr : v.trajectories) {
        Json t;
        t["exponent"] = tr.exponent;
        t["blowUp"] = tr.blow_up;
        t["l2"] = to_string(tr.l2);
        Json pp = Json::array();
        for (const auto& [hz, p] : tr.p_partials) pp.push_back(Json::array({hz, p}));
        t["p_partials"] = std::move(pp);
        trajs.push_back(std::move(t));
    }
    j["trajectories"] = std::move(trajs);
    j["note"] = v.note;
    return j;
}

Json to_json(const IdentityReport& rep) {
    Json j;
    Json checks = Json::array();
    for (const auto& c : rep.checks) {
        Json cj;
        cj["name"] = c.name;
        cj["status"] = c.status == IdentityCheck::Status::Pass     ? "pass"
                       : c.status == IdentityCheck::Status::Fail   ? "fail"
                                                                   : "skipped";
        if (c.status != IdentityCheck::Status::Skipped) {
            cj["residual"] = c.residual;
            cj["threshold"] = c.threshold;
        }
        checks.push_back(std::move(cj));
    }
    j["checks"] = std::move(checks);
    j["allPassed"] = rep.all_passed;
    return j;
}

Json sweep_report_to_json(const SweepReport& report, const Json& geometry_block) {
    Json j;
    j["geometry"] = geometry_block;

    Json grid = Json::array();
    for (std::size_t i = 0; i < report.verdicts.size(); ++i) {
        const ModeVerdict& v = report.verdicts[i];
        Json e;
        e["mode"] = to_json(v.mode);
        e["verdict"] = to_string(v.verdict);
        if (v.matching_residual) e["residual"] = *v.matching_residual;
        else e["residual"] = nullptr;
        e["boundedDim"] = v.bounded_dim;
        Json incs = Json::array();
        if (!v.trajectories.empty()) {
            const auto& pp = v.trajectories.front().p_partials;
            for (std::size_t q = 1; q < pp.size(); ++q)
                incs.push_back(pp[q].second - pp[q - 1].second);
        }
        e["p_increments"] = std::move(incs);
        grid.push_back(std::move(e));
    }
    j["grid"] = std::move(grid);

    Json summary;
    summary["total"] = report.verdicts.size();
    summary["no-L2"] = report.no_l2;
    summary["candidate-L2"] = report.candidate;
    summary["inconclusive"] = report.inconclusive;
    summary["hypotheses"] = to_json(report.hypotheses);
    if (report.worst_index) {
        Json worst;
        worst["mode"] = to_json(report.verdicts[*report.worst_index].mode);
        worst["residual"] = *report.verdicts[*report.worst_index].matching_residual;
        summary["worst"] = std::move(worst);
    } else {
        summary["worst"] = nullptr;
    }
    j["summary"] = std::move(summary);
    return j;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IOError("cannot open '" + tmp + "' for writing");
        out << content;
        if (!out) throw IOError("write failed for '" + tmp + "'");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw IOError("cannot rename '" + tmp + "' to '" + path + "'");
}

std::string format_17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace cfwp
