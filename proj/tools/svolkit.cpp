#include "svolkit/cli.hpp"
#include "svolkit/errors.hpp"
#include "svolkit/pricing.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace svolkit;

namespace {

struct Flags {
    std::string config;
    std::optional<std::string> model, kind, method, format, r_grid, out;
    std::optional<double> x0, y0, sigma, rho, t, horizon;
    std::vector<double> strikes;
    std::optional<long> paths;
    std::optional<int> steps, threads;
    std::optional<std::uint64_t> seed;
    bool allow_local_martingale = false;
    std::optional<std::string> checks;
    bool inject_theta_fault = false;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunConfig build_config(const Flags& f, Task task) {
    RunConfig c;
    if (!f.config.empty()) c = config_from_json(read_file(f.config));
    c.task = task;
    if (f.model) {
        try {
            c.model.vol.kind = vol_kind_from_string(*f.model);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (f.x0) c.model.x0 = *f.x0;
    if (f.y0) c.model.y0 = *f.y0;
    if (f.sigma) c.model.vol.sigma = *f.sigma;
    if (f.rho) c.model.rho = *f.rho;
    if (f.horizon) c.model.horizon = *f.horizon;
    if (f.t) {
        c.t = *f.t;
        if (!f.horizon && c.model.horizon < c.t) c.model.horizon = c.t;
    }
    if (!f.strikes.empty()) c.strikes = f.strikes;
    if (f.kind) {
        if (*f.kind != "call" && *f.kind != "put") throw ConfigError("kind must be call or put");
        c.kind = *f.kind == "call" ? OptionKind::call : OptionKind::put;
    }
    if (f.r_grid) c.grid = parse_r_grid(*f.r_grid);
    if (f.method) c.method = method_from_string(*f.method);
    if (f.paths) c.n_paths = *f.paths;
    if (f.steps) c.n_steps = *f.steps;
    if (f.seed) c.seed = *f.seed;
    if (f.threads) c.threads = *f.threads;
    if (f.out) c.out_path = *f.out;
    if (f.format) c.format = format_from_string(*f.format);
    if (f.allow_local_martingale) c.allow_local_martingale = true;
    c.validate();
    return c;
}

void emit(const RunConfig& c, const std::string& text) {
    if (c.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(c.out_path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + c.out_path + "'");
    out << text;
}

std::optional<std::vector<std::string>> split_checks(const std::optional<std::string>& s) {
    if (!s) return std::nullopt;
    std::vector<std::string> out;
    std::stringstream ss(*s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

int run(const Flags& f, Task task) {
    const RunConfig c = build_config(f, task);
    if (c.allow_local_martingale && !martingale_predicate(c.model) && task != Task::validate)
        std::cerr << "warning: rho > 0; prices are local-martingale expectations, not arbitrage prices\n";
    switch (task) {
    case Task::density: emit(c, cmd_density(c)); return kExitOk;
    case Task::price: emit(c, cmd_price(c)); return kExitOk;
    case Task::table: emit(c, cmd_table(c)); return kExitOk;
    case Task::validate: {
        RunConfig vc = c;
        if (!f.format) vc.format = OutputFormat::json;
        const ValidateOutcome v = cmd_validate(vc, split_checks(f.checks), f.inject_theta_fault);
        emit(vc, v.text);
        return v.overall ? kExitOk : kExitValidation;
    }
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Densities and option prices under stochastic volatility"};
    app.require_subcommand(1);
    Flags f;

    auto add_common = [&](CLI::App* s) {
        s->add_option("--config", f.config, "JSON config file (flags override it)");
        s->add_option("--model", f.model, "constant | lognormal | bessel3");
        s->add_option("--x0", f.x0, "initial asset price");
        s->add_option("--y0", f.y0, "initial volatility");
        s->add_option("--sigma", f.sigma, "volatility level (constant) or vol-of-vol (lognormal)");
        s->add_option("--rho", f.rho, "correlation");
        s->add_option("--t", f.t, "maturity");
        s->add_option("--horizon", f.horizon, "model horizon (defaults to at least t)");
        s->add_option("--strike", f.strikes, "strike(s), repeatable or comma-separated")->delimiter(',');
        s->add_option("--kind", f.kind, "call | put");
        s->add_option("--r-grid", f.r_grid, "MIN:MAX:N");
        s->add_option("--method", f.method, "auto | closed_form | mixing_mc | payoff_mc");
        s->add_option("--paths", f.paths, "Monte Carlo paths");
        s->add_option("--steps", f.steps, "time steps (0: 512 per unit time)");
        s->add_option("--seed", f.seed, "RNG seed");
        s->add_option("--threads", f.threads, "worker threads (0: SVOLKIT_THREADS or all cores)");
        s->add_option("--out", f.out, "output path (default stdout)");
        s->add_option("--format", f.format, "csv | json");
        s->add_flag("--allow-local-martingale", f.allow_local_martingale, "price even when rho > 0");
    };

    CLI::App* density = app.add_subcommand("density", "density of X_t on an r-grid");
    CLI::App* price = app.add_subcommand("price", "European option prices on a strike ladder");
    CLI::App* validate = app.add_subcommand("validate", "run the validation suite");
    CLI::App* table = app.add_subcommand("table", "density curve plus call and put ladders");
    for (CLI::App* s : {density, price, validate, table}) add_common(s);
    validate->add_option("--checks", f.checks, "comma-separated check groups (empty: none)");
    validate->add_flag("--inject-theta-fault", f.inject_theta_fault, "corrupt theta (fault-injection hook)")
        ->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    const Task task = density->parsed()  ? Task::density
                      : price->parsed()  ? Task::price
                      : table->parsed()  ? Task::table
                                         : Task::validate;
    try {
        return run(f, task);
    } catch (const MartingaleViolation& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitMartingale;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
}
