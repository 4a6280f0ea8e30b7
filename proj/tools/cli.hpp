#pragma once

#include <zoalm/problems.hpp>

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace zoalm::cli {

using Json = nlohmann::json;

/// A run configuration: nested JSON with sections problem, method, estimator,
/// apcu, ippm, ialm, baseline and run. Every leaf is addressable as
/// "section.key" for overrides.
class RunConfig {
  public:
    RunConfig();
    /// Parses and validates a config document. Unknown keys are errors.
    static RunConfig from_json(const Json &doc, const std::string &source = "<config>");
    static RunConfig from_file(const std::filesystem::path &path);

    /// "section.key=value"; value is parsed as JSON, falling back to a string.
    void set(const std::string &assignment);
    void set(const std::string &key, const Json &value);

    const Json &get(const std::string &key) const;
    double number(const std::string &key) const;
    std::uint64_t integer(const std::string &key) const;
    std::string text(const std::string &key) const;
    bool flag(const std::string &key) const;

    std::vector<std::uint64_t> seeds() const;
    /// Grid axes: key -> list of values (cartesian product in key order).
    const Json &grid() const { return grid_; }

    /// Throws ConfigError naming the offending key.
    void validate() const;
    Json to_json() const;

  private:
    Json values_; ///< flat "section.key" -> value
    Json grid_ = Json::object();
};

struct RunOutcome {
    std::string run_id;
    std::string problem;
    std::string method;
    std::uint64_t seed = 0;
    std::string status;
    bool certified      = false;
    bool verified       = false; ///< certified and the white-box check agrees
    double pres         = std::numeric_limits<double>::quiet_NaN();
    double dres         = std::numeric_limits<double>::quiet_NaN();
    double objective    = std::numeric_limits<double>::quiet_NaN();
    double objective_error = std::numeric_limits<double>::quiet_NaN();
    double true_stationarity = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t solver_queries       = 0;
    std::uint64_t verification_queries = 0;
    std::uint64_t iterations           = 0;
    double wall_ms = 0;
    std::string error;
    std::vector<TraceRecord> trace;
};

/// Builds the problem, runs the configured method with `seed` and returns
/// the outcome with its trace. Solver errors are captured in `error`.
RunOutcome run_single(const RunConfig &config, std::uint64_t seed, const std::string &run_id);

/// Expands grid x seeds into concrete configs with run ids.
std::vector<std::pair<RunConfig, std::pair<std::uint64_t, std::string>>>
expand_grid(const RunConfig &config);

/// Executes every expanded run with up to `jobs` threads, writes
/// <dir>/<run_id>.csv, <dir>/<run_id>.meta.json and <dir>/summary.csv.
std::vector<RunOutcome> run_bench(const RunConfig &config, const std::filesystem::path &dir,
                                  unsigned jobs);

extern const char *const kSummaryHeader;
void write_summary_csv(std::ostream &os, const std::vector<RunOutcome> &rows);

enum class PlotX { queries, iterations };
enum class PlotY { pres, dres, objective, objective_error, grad_norm };
PlotX plot_x_from_string(const std::string &s);
PlotY plot_y_from_string(const std::string &s);

/// Long-format CSV "method,seed,x,y,outer" from trace files. Metadata is read
/// from the sibling .meta.json when present.
void emit_plot_data(std::ostream &os, const std::vector<std::filesystem::path> &traces, PlotX x,
                    PlotY y);

/// Entry point shared by the executable and the tests. Returns the exit code:
/// 0 success, 1 a certified run failed white-box verification (or, with
/// --strict, any run was not certified), 2 usage or configuration error.
int main_entry(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace zoalm::cli
