#include <doctest.h>

#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace zoalm;
using namespace zoalm::cli;

namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args, std::string *out_text = nullptr) {
    args.insert(args.begin(), "zoalm");
    std::vector<const char *> argv;
    for (const auto &a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
    if (out_text)
        *out_text = out.str();
    return code;
}

fs::path scratch(const std::string &name) {
    auto p = fs::temp_directory_path() / ("zoalm_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

} // namespace

TEST_CASE("config defaults and overrides") {
    RunConfig cfg;
    CHECK(cfg.text("method.name") == "ialm");
    CHECK_THROWS_AS(cfg.validate(), ConfigError); // problem.name missing
    cfg.set("problem.name=uscqp");
    cfg.set("problem.params.n=12");
    cfg.set("ialm.beta0=0.5");
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.number("ialm.beta0") == 0.5);
    CHECK(cfg.get("problem.params")["n"] == 12);
    CHECK_THROWS_AS(cfg.set("ialm.betaO=1"), ConfigError);
    CHECK_THROWS_AS(cfg.set("no_equals_sign"), ConfigError);
    cfg.set("method.name=newton");
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("config documents") {
    const Json doc = Json::parse(R"({
        "problem": {"name": "uscqp", "params": {"n": 8}},
        "method": {"name": "apcu"},
        "run": {"seeds": [1, 2]},
        "grid": {"apcu.epsilon": [1e-2, 1e-3], "estimator.j": [1, 2, 3]}
    })");
    const auto cfg = RunConfig::from_json(doc);
    CHECK(cfg.seeds() == std::vector<std::uint64_t>{1, 2});
    const auto runs = expand_grid(cfg);
    CHECK(runs.size() == 2 * 3 * 2);
    std::set<std::string> ids;
    for (const auto &r : runs)
        ids.insert(r.second.second);
    CHECK(ids.size() == runs.size());

    CHECK_THROWS_AS(RunConfig::from_json(Json::parse(R"({"problem": {"nam": "x"}})")), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json(Json::parse(R"({"method": {"name": "apcu"}})")), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json(Json::parse(R"({"problem": {"name": "uscqp"}, "grid": {"x.y": [1]}})")),
                    ConfigError);
    const auto round = RunConfig::from_json(cfg.to_json());
    CHECK(round.to_json() == cfg.to_json());
}

TEST_CASE("single run outcome") {
    RunConfig cfg;
    cfg.set("problem.name=uscqp");
    cfg.set("problem.params", Json{{"n", 10}, {"L", 5}});
    cfg.set("method.name=apcu");
    cfg.set("apcu.epsilon=1e-4");
    const auto r = run_single(cfg, 3, "t");
    CHECK(r.status == "converged");
    CHECK(r.certified);
    CHECK(r.verified);
    CHECK(r.true_stationarity <= 1e-4);
    CHECK(std::abs(r.objective_error) < 1e-6);
    CHECK(r.solver_queries > 0);
    REQUIRE(!r.trace.empty());
    CHECK(r.trace.back().kind == IterationKind::final);
    CHECK(r.trace.back().solver_queries == r.solver_queries);
}

TEST_CASE("method and problem mismatch is a configuration error") {
    RunConfig cfg;
    cfg.set("problem.name=lcqp");
    cfg.set("problem.params", Json{{"n", 6}, {"m", 2}});
    cfg.set("method.name=apcu");
    CHECK_THROWS_AS(run_single(cfg, 1, "t"), ConfigError);
}

TEST_CASE("bench writes summary, traces and metadata") {
    const auto dir = scratch("bench");
    const auto cfg_path = dir / "cfg.json";
    std::ofstream(cfg_path) << R"({"problem": {"name": "uscqp", "params": {"n": 6, "L": 4}},
                                   "method": {"name": "apcu"}, "apcu": {"epsilon": 1e-3},
                                   "grid": {"estimator.j": [1, 2]}})";
    std::string text;
    const int code = run({"bench", "-c", cfg_path.string(), "--seed", "1-3", "-o", (dir / "out").string(), "-j", "2"},
                         &text);
    CHECK(code == 0);
    std::ifstream summary(dir / "out" / "summary.csv");
    std::string line;
    std::getline(summary, line);
    CHECK(line == kSummaryHeader);
    int rows = 0;
    while (std::getline(summary, line))
        ++rows;
    CHECK(rows == 6);

    std::vector<fs::path> traces;
    for (const auto &e : fs::directory_iterator(dir / "out"))
        if (e.path().extension() == ".csv" && e.path().filename() != "summary.csv")
            traces.push_back(e.path());
    CHECK(traces.size() == 6);
    std::ostringstream plot;
    emit_plot_data(plot, traces, PlotX::queries, PlotY::objective_error);
    CHECK(plot.str().rfind("method,seed,x,y,outer\n", 0) == 0);
    CHECK(plot.str().find("apcu,") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("exit codes") {
    CHECK(run({}) == 2);
    CHECK(run({"frobnicate"}) == 2);
    CHECK(run({"solve", "--set", "method.name=apcu"}) == 2);
    CHECK(run({"bench", "-c", "/nonexistent/config.json"}) == 2);
    CHECK(run({"plotdata", "-y", "slope", "x.csv"}) == 2);
    std::string out;
    CHECK(run({"solve", "--set", "problem.name=uscqp", "problem.params.n=5", "method.name=apcu", "--strict"},
              &out) == 0);
    CHECK(out.rfind(kSummaryHeader, 0) == 0);
    CHECK(run({"solve", "--set", "problem.name=uscqp", "problem.params.n=5", "method.name=apcu",
               "apcu.max_queries=10", "--strict"}) == 1);
}

TEST_CASE("gen writes a loadable instance") {
    const auto dir = scratch("gen");
    const auto file = (dir / "lcqp.json").string();
    CHECK(run({"gen", "lcqp", "--param", "n=6", "m=2", "--seed", "4", "-o", file}) == 0);
    RunConfig cfg;
    cfg.set("problem.instance", file);
    cfg.set("ialm.max_queries=1000");
    CHECK_NOTHROW(cfg.validate());
    const auto r = run_single(cfg, 1, "g");
    CHECK(r.problem == "lcqp");
    CHECK(r.error.empty());
    fs::remove_all(dir);
}
