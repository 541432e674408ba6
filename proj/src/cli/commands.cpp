#include "svolkit/bessel3.hpp"
#include "svolkit/cli.hpp"
#include "svolkit/errors.hpp"
#include "svolkit/numerics.hpp"
#include "svolkit/pricing.hpp"
#include "svolkit/validation.hpp"

#include <json.hpp>

#include <cmath>
#include <sstream>

namespace svolkit {

using json = nlohmann::json;

namespace {

McSettings mc_of(const RunConfig& c) {
    McSettings mc;
    mc.n_paths = c.n_paths;
    mc.n_steps = c.n_steps;
    mc.rng = RngSpec{c.seed, 0};
    mc.threads = c.threads;
    return mc;
}

LNModelParams ln_of(const ModelSpec& m) { return {m.x0, m.y0, m.vol.sigma, m.rho}; }

std::vector<double> r_grid(const RGrid& g) {
    std::vector<double> r(static_cast<std::size_t>(g.n_points));
    for (int i = 0; i < g.n_points; ++i) r[i] = (g.r_min * (g.n_points - 1 - i) + g.r_max * i) / (g.n_points - 1);
    return r;
}

Method resolve_density_method(const RunConfig& c) {
    if (c.method != Method::auto_) return c.method;
    return c.model.vol.kind == VolKind::bessel3 ? Method::mixing_mc : Method::closed_form;
}

Method resolve_price_method(const RunConfig& c) {
    if (c.method != Method::auto_) return c.method;
    if (c.model.vol.kind == VolKind::constant) return Method::closed_form;
    if (c.model.vol.kind == VolKind::lognormal && martingale_predicate(c.model)) return Method::closed_form;
    return Method::mixing_mc;
}

double constant_density(const ModelSpec& m, double t, double r) {
    const double s = m.vol.sigma * std::sqrt(t);
    return norm_pdf((std::log(r / m.x0) + 0.5 * s * s) / s) / (r * s);
}

struct Row {
    std::vector<std::string> cells;
};

std::string csv(const std::vector<std::string>& header, const std::vector<Row>& rows) {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
    out += '\n';
    for (const Row& r : rows) {
        for (std::size_t i = 0; i < r.cells.size(); ++i) out += (i ? "," : "") + r.cells[i];
        out += '\n';
    }
    return out;
}

struct DensityTable {
    std::vector<double> r;
    std::vector<double> density;
    std::vector<double> stderr_;
    bool has_stderr = false;
    Method method = Method::closed_form;
};

DensityTable density_table(const RunConfig& c) {
    c.validate();
    check_horizon(c.model, c.t);
    DensityTable tab;
    tab.r = r_grid(c.grid);
    tab.method = resolve_density_method(c);
    const std::size_t n = tab.r.size();
    tab.density.assign(n, 0.0);
    tab.stderr_.assign(n, 0.0);
    switch (tab.method) {
    case Method::closed_form:
        switch (c.model.vol.kind) {
        case VolKind::constant:
            for (std::size_t i = 0; i < n; ++i) tab.density[i] = constant_density(c.model, c.t, tab.r[i]);
            break;
        case VolKind::lognormal: {
            LognormalSurface::Options o;
            o.threads = c.threads;
            const LognormalSurface s(ln_of(c.model), c.t, o);
            tab.density = s.density(tab.r);
            break;
        }
        case VolKind::bessel3: {
            Bes3QmcSettings q;
            q.rng = RngSpec{c.seed, 0};
            q.threads = c.threads;
            const auto est = bes3_asset_density(c.model, c.t, tab.r, q);
            for (std::size_t i = 0; i < n; ++i) {
                tab.density[i] = est[i].density;
                tab.stderr_[i] = est[i].stderr_;
            }
            tab.has_stderr = true;
            break;
        }
        }
        break;
    case Method::mixing_mc: {
        const auto est = density_mc(c.model, c.t, tab.r, mc_of(c));
        for (std::size_t i = 0; i < n; ++i) {
            tab.density[i] = est[i].density;
            tab.stderr_[i] = est[i].stderr_;
        }
        tab.has_stderr = true;
        break;
    }
    case Method::payoff_mc:
        throw ConfigError("payoff_mc is a pricing method; use closed_form or mixing_mc for densities");
    case Method::auto_:
        break;
    }
    return tab;
}

struct PriceRow {
    double strike;
    PriceQuote quote;
    bool has_stderr;
};

std::vector<PriceRow> price_rows(const RunConfig& c, OptionKind kind) {
    c.validate();
    check_horizon(c.model, c.t);
    if (c.strikes.empty()) throw ConfigError("price needs at least one strike");
    const Method m = resolve_price_method(c);
    if (!c.allow_local_martingale && !martingale_predicate(c.model))
        throw MartingaleViolation("rho > 0 makes the asset a strict local martingale; no arbitrage price is "
                                  "returned (pass --allow-local-martingale to compute E[(X_t - K)^+] anyway)");
    std::vector<PriceRow> rows;
    switch (m) {
    case Method::closed_form:
        if (c.model.vol.kind == VolKind::constant) {
            for (double k : c.strikes)
                rows.push_back({k,
                                {black_scholes_price(c.model.x0, k, c.model.vol.sigma, c.t, kind), 0.0,
                                 PriceMethod::black_scholes, 0},
                                false});
        } else if (c.model.vol.kind == VolKind::lognormal) {
            if (!martingale_predicate(c.model))
                throw MartingaleViolation("the closed-form price covers rho <= 0 only; use --method mixing_mc "
                                          "with --allow-local-martingale");
            LognormalSurface::Options o;
            o.threads = c.threads;
            const LognormalSurface s(ln_of(c.model), c.t, o);
            for (double k : c.strikes)
                rows.push_back({k, {s.price(k, kind), 0.0, PriceMethod::closed_form_lognormal, 0}, false});
        } else {
            throw ConfigError("no closed-form price for bessel3 volatility; use mixing_mc or payoff_mc");
        }
        break;
    case Method::mixing_mc: {
        const auto q = price_mixing_mc(c.model, c.t, c.strikes, kind, mc_of(c), c.allow_local_martingale);
        for (std::size_t i = 0; i < q.size(); ++i) rows.push_back({c.strikes[i], q[i], true});
        break;
    }
    case Method::payoff_mc:
        for (double k : c.strikes)
            rows.push_back({k, payoff_mc_price(c.model, {k, c.t, kind}, mc_of(c), c.allow_local_martingale), true});
        break;
    case Method::auto_:
        break;
    }
    return rows;
}

json null_or(bool has, double v) { return has ? json(v) : json(nullptr); }

} // namespace

std::string cmd_density(const RunConfig& c) {
    const DensityTable tab = density_table(c);
    if (c.format == OutputFormat::json) {
        json rows = json::array();
        for (std::size_t i = 0; i < tab.r.size(); ++i)
            rows.push_back(json{{"r", tab.r[i]}, {"density", tab.density[i]},
                                {"stderr", null_or(tab.has_stderr, tab.stderr_[i])}});
        return json{{"method", to_string(tab.method)}, {"t", c.t}, {"rows", rows}}.dump(2) + "\n";
    }
    std::vector<Row> rows;
    for (std::size_t i = 0; i < tab.r.size(); ++i)
        rows.push_back({{format_double(tab.r[i]), format_double(tab.density[i]),
                         tab.has_stderr ? format_double(tab.stderr_[i]) : std::string()}});
    return csv({"r", "density", "stderr"}, rows);
}

std::string cmd_price(const RunConfig& c) {
    const auto rows = price_rows(c, c.kind);
    if (c.format == OutputFormat::json) {
        json arr = json::array();
        for (const PriceRow& r : rows)
            arr.push_back(json{{"strike", r.strike},
                               {"kind", to_string(c.kind)},
                               {"value", r.quote.value},
                               {"stderr", null_or(r.has_stderr, r.quote.stderr_)},
                               {"method", to_string(r.quote.method)}});
        return json{{"t", c.t}, {"rows", arr}}.dump(2) + "\n";
    }
    std::vector<Row> out;
    for (const PriceRow& r : rows)
        out.push_back({{format_double(r.strike), to_string(c.kind), format_double(r.quote.value),
                        r.has_stderr ? format_double(r.quote.stderr_) : std::string(), to_string(r.quote.method)}});
    return csv({"strike", "kind", "value", "stderr", "method"}, out);
}

std::string cmd_table(const RunConfig& c) {
    // density curve followed by call and put ladders, one long table
    const DensityTable tab = density_table(c);
    std::vector<PriceRow> calls, puts;
    const bool priced = c.allow_local_martingale || martingale_predicate(c.model);
    if (priced && !c.strikes.empty()) {
        calls = price_rows(c, OptionKind::call);
        puts = price_rows(c, OptionKind::put);
    }
    if (c.format == OutputFormat::json) {
        json arr = json::array();
        for (std::size_t i = 0; i < tab.r.size(); ++i)
            arr.push_back(json{{"quantity", "density"}, {"arg", tab.r[i]}, {"value", tab.density[i]},
                               {"stderr", null_or(tab.has_stderr, tab.stderr_[i])}, {"method", to_string(tab.method)}});
        for (const auto* set : {&calls, &puts})
            for (const PriceRow& r : *set)
                arr.push_back(json{{"quantity", set == &calls ? "call" : "put"}, {"arg", r.strike},
                                   {"value", r.quote.value}, {"stderr", null_or(r.has_stderr, r.quote.stderr_)},
                                   {"method", to_string(r.quote.method)}});
        return json{{"t", c.t}, {"rows", arr}}.dump(2) + "\n";
    }
    std::vector<Row> out;
    for (std::size_t i = 0; i < tab.r.size(); ++i)
        out.push_back({{"density", format_double(tab.r[i]), format_double(tab.density[i]),
                        tab.has_stderr ? format_double(tab.stderr_[i]) : std::string(), to_string(tab.method)}});
    for (const auto* set : {&calls, &puts})
        for (const PriceRow& r : *set)
            out.push_back({{set == &calls ? "call" : "put", format_double(r.strike), format_double(r.quote.value),
                            r.has_stderr ? format_double(r.quote.stderr_) : std::string(),
                            to_string(r.quote.method)}});
    return csv({"quantity", "arg", "value", "stderr", "method"}, out);
}

ValidateOutcome cmd_validate(const RunConfig& c, const std::optional<std::vector<std::string>>& checks,
                             bool corrupt_theta) {
    ValidationOptions o;
    o.paths = c.n_paths;
    if (c.seed != 0) o.seed = c.seed;
    o.threads = c.threads;
    if (corrupt_theta)
        o.log_theta = [](double r, double t) { return log_theta_scaled(r, t) + std::log(1.25); };
    ValidationReport rep;
    try {
        rep = run_validation(o, checks);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    ValidateOutcome out;
    out.overall = rep.overall;
    if (c.format == OutputFormat::csv) {
        std::vector<Row> rows;
        for (const CheckResult& r : rep.checks)
            rows.push_back({{r.name, format_double(r.target), format_double(r.measured), format_double(r.tolerance),
                             r.pass ? "true" : "false"}});
        out.text = csv({"name", "target", "measured", "tolerance", "pass"}, rows);
        return out;
    }
    json arr = json::array();
    for (const CheckResult& r : rep.checks)
        arr.push_back(json{{"name", r.name},
                           {"target", r.target},
                           {"measured", r.measured},
                           {"tolerance", r.tolerance},
                           {"pass", r.pass}});
    out.text = json{{"checks", arr}, {"overall", rep.overall}}.dump(2) + "\n";
    return out;
}

} // namespace svolkit
