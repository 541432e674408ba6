#include "svolkit/cli.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

namespace svolkit {

using json = nlohmann::json;

std::string to_string(Task t) {
    switch (t) {
    case Task::density: return "density";
    case Task::price: return "price";
    case Task::validate: return "validate";
    case Task::table: return "table";
    }
    return "unknown";
}

std::string to_string(Method m) {
    switch (m) {
    case Method::auto_: return "auto";
    case Method::closed_form: return "closed_form";
    case Method::mixing_mc: return "mixing_mc";
    case Method::payoff_mc: return "payoff_mc";
    }
    return "unknown";
}

std::string to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

Task task_from_string(const std::string& s) {
    if (s == "density") return Task::density;
    if (s == "price") return Task::price;
    if (s == "validate") return Task::validate;
    if (s == "table") return Task::table;
    throw ConfigError("unknown task '" + s + "'");
}

Method method_from_string(const std::string& s) {
    if (s == "auto") return Method::auto_;
    if (s == "closed_form") return Method::closed_form;
    if (s == "mixing_mc") return Method::mixing_mc;
    if (s == "payoff_mc") return Method::payoff_mc;
    throw ConfigError("unknown method '" + s + "'");
}

OutputFormat format_from_string(const std::string& s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    throw ConfigError("unknown output format '" + s + "'");
}

void RunConfig::validate() const {
    try {
        model.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("t must be positive");
    if (t > model.horizon * (1.0 + 1e-12)) throw ConfigError("t exceeds the model horizon");
    if (!(grid.r_min > 0.0) || !(grid.r_max > grid.r_min) || !std::isfinite(grid.r_max))
        throw ConfigError("r-grid needs 0 < r_min < r_max");
    if (grid.n_points < 2) throw ConfigError("r-grid needs n_points >= 2");
    for (double k : strikes)
        if (!(k > 0.0) || !std::isfinite(k)) throw ConfigError("strikes must be positive");
    if (n_paths < 2) throw ConfigError("paths must be >= 2");
    if (n_steps < 0) throw ConfigError("steps must be >= 0");
    if (threads < 0) throw ConfigError("threads must be >= 0");
}

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

json model_json(const ModelSpec& m) {
    return json{{"x0", m.x0},
                {"y0", m.y0},
                {"rho", m.rho},
                {"horizon", m.horizon},
                {"vol", {{"kind", to_string(m.vol.kind)}, {"sigma", m.vol.sigma}}}};
}

ModelSpec model_from(const json& j) {
    if (!j.is_object()) throw ConfigError("model must be a JSON object");
    reject_unknown(j, {"x0", "y0", "rho", "horizon", "vol"}, "model");
    ModelSpec m;
    if (j.contains("x0")) m.x0 = j.at("x0").get<double>();
    if (j.contains("y0")) m.y0 = j.at("y0").get<double>();
    if (j.contains("rho")) m.rho = j.at("rho").get<double>();
    if (j.contains("horizon")) m.horizon = j.at("horizon").get<double>();
    if (j.contains("vol")) {
        const json& v = j.at("vol");
        if (!v.is_object()) throw ConfigError("vol must be a JSON object");
        reject_unknown(v, {"kind", "sigma"}, "vol");
        if (v.contains("kind")) {
            try {
                m.vol.kind = vol_kind_from_string(v.at("kind").get<std::string>());
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        }
        if (v.contains("sigma")) m.vol.sigma = v.at("sigma").get<double>();
    }
    return m;
}

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
}

} // namespace

std::string model_to_json(const ModelSpec& m) { return model_json(m).dump(2); }

ModelSpec model_from_json(const std::string& text) {
    try {
        return model_from(parse(text));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad model document: ") + e.what());
    }
}

std::string config_to_json(const RunConfig& c) {
    json j{{"model", model_json(c.model)},
           {"task", to_string(c.task)},
           {"t", c.t},
           {"grid", {{"r_min", c.grid.r_min}, {"r_max", c.grid.r_max}, {"n_points", c.grid.n_points}}},
           {"strikes", c.strikes},
           {"kind", c.kind == OptionKind::call ? "call" : "put"},
           {"method", to_string(c.method)},
           {"mc", {{"n_paths", c.n_paths}, {"n_steps", c.n_steps}, {"seed", c.seed}}},
           {"threads", c.threads},
           {"output", {{"format", to_string(c.format)}, {"path", c.out_path}}},
           {"allow_local_martingale", c.allow_local_martingale}};
    return j.dump(2);
}

RunConfig config_from_json(const std::string& text) {
    const json j = parse(text);
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    RunConfig c;
    try {
        if (!j.contains("model")) {
            // bare model document
            c.model = model_from(j);
            return c;
        }
        reject_unknown(j,
                       {"model", "task", "t", "grid", "strikes", "kind", "method", "mc", "threads", "output",
                        "allow_local_martingale"},
                       "config");
        c.model = model_from(j.at("model"));
        if (j.contains("task")) c.task = task_from_string(j.at("task").get<std::string>());
        if (j.contains("t")) c.t = j.at("t").get<double>();
        if (j.contains("grid")) {
            const json& g = j.at("grid");
            reject_unknown(g, {"r_min", "r_max", "n_points"}, "grid");
            if (g.contains("r_min")) c.grid.r_min = g.at("r_min").get<double>();
            if (g.contains("r_max")) c.grid.r_max = g.at("r_max").get<double>();
            if (g.contains("n_points")) c.grid.n_points = g.at("n_points").get<int>();
        }
        if (j.contains("strikes")) c.strikes = j.at("strikes").get<std::vector<double>>();
        if (j.contains("kind")) {
            const std::string k = j.at("kind").get<std::string>();
            if (k != "call" && k != "put") throw ConfigError("kind must be call or put");
            c.kind = k == "call" ? OptionKind::call : OptionKind::put;
        }
        if (j.contains("method")) c.method = method_from_string(j.at("method").get<std::string>());
        if (j.contains("mc")) {
            const json& m = j.at("mc");
            reject_unknown(m, {"n_paths", "n_steps", "seed"}, "mc");
            if (m.contains("n_paths")) c.n_paths = m.at("n_paths").get<long>();
            if (m.contains("n_steps")) c.n_steps = m.at("n_steps").get<int>();
            if (m.contains("seed")) c.seed = m.at("seed").get<std::uint64_t>();
        }
        if (j.contains("threads")) c.threads = j.at("threads").get<int>();
        if (j.contains("output")) {
            const json& o = j.at("output");
            reject_unknown(o, {"format", "path"}, "output");
            if (o.contains("format")) c.format = format_from_string(o.at("format").get<std::string>());
            if (o.contains("path")) c.out_path = o.at("path").get<std::string>();
        }
        if (j.contains("allow_local_martingale")) c.allow_local_martingale = j.at("allow_local_martingale").get<bool>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config document: ") + e.what());
    }
    return c;
}

RGrid parse_r_grid(const std::string& s) {
    std::stringstream ss(s);
    std::string a, b, n;
    if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, n) || a.empty() || b.empty() ||
        n.empty())
        throw ConfigError("r-grid must be MIN:MAX:N");
    RGrid g;
    try {
        std::size_t pa, pb, pn;
        g.r_min = std::stod(a, &pa);
        g.r_max = std::stod(b, &pb);
        g.n_points = std::stoi(n, &pn);
        if (pa != a.size() || pb != b.size() || pn != n.size()) throw ConfigError("r-grid must be MIN:MAX:N");
    } catch (const std::logic_error&) {
        throw ConfigError("r-grid must be MIN:MAX:N");
    }
    return g;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

} // namespace svolkit
