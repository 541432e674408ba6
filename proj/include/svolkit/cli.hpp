#pragma once

#include "svolkit/lognormal.hpp"
#include "svolkit/model.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace svolkit {

enum class Task { density, price, validate, table };
enum class Method { auto_, closed_form, mixing_mc, payoff_mc };
enum class OutputFormat { csv, json };

std::string to_string(Task t);
std::string to_string(Method m);
std::string to_string(OutputFormat f);
Task task_from_string(const std::string& s);
Method method_from_string(const std::string& s);
OutputFormat format_from_string(const std::string& s);

struct RGrid {
    double r_min = 0.5;
    double r_max = 1.5;
    int n_points = 11;
};

struct RunConfig {
    ModelSpec model;
    Task task = Task::density;
    double t = 1.0;
    RGrid grid;
    std::vector<double> strikes = {0.8, 0.9, 1.0, 1.1, 1.2};
    OptionKind kind = OptionKind::call;
    Method method = Method::auto_;
    long n_paths = 200000;
    int n_steps = 0;
    std::uint64_t seed = 0;
    int threads = 0;
    OutputFormat format = OutputFormat::csv;
    std::string out_path; // empty: stdout
    bool allow_local_martingale = false;

    void validate() const; // throws ConfigError
};

// Bad configuration: exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// JSON documents.  A config may be a full RunConfig document or a bare
// model document {"x0","y0","rho","horizon","vol":{"kind","sigma"}}.
std::string model_to_json(const ModelSpec& m);
ModelSpec model_from_json(const std::string& text);
std::string config_to_json(const RunConfig& c);
RunConfig config_from_json(const std::string& text);

// Parses "MIN:MAX:N".
RGrid parse_r_grid(const std::string& s);

// Shortest round-trip decimal form of v.
std::string format_double(double v);

// Command bodies; each returns the full output text (CSV or JSON).
std::string cmd_density(const RunConfig& c);
std::string cmd_price(const RunConfig& c);
std::string cmd_table(const RunConfig& c);

struct ValidateOutcome {
    std::string text;
    bool overall = true;
};
// checks: groups to run (all when empty-optional); corrupt_theta: fault hook
ValidateOutcome cmd_validate(const RunConfig& c, const std::optional<std::vector<std::string>>& checks,
                             bool corrupt_theta);

// Stable exit codes.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitMartingale = 4;
constexpr int kExitValidation = 5;

} // namespace svolkit
