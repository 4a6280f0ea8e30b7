#include "cli.hpp"

#include <zoalm/baselines.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace zoalm::cli {

namespace fs = std::filesystem;

namespace {

const Json &defaults() {
    static const Json d = {
        {"problem.name", ""},
        {"problem.params", Json::object()},
        {"problem.seed", nullptr},
        {"problem.dataset", ""},
        {"problem.instance", ""},
        {"method.name", "ialm"},
        {"method.subsolver", "ippm"},
        {"estimator.j", 1},
        {"estimator.radius", 1e-6},
        {"estimator.radius_mode", "fixed"},
        {"apcu.epsilon", 1e-3},
        {"apcu.epoch_length", 0},
        {"apcu.implementation", "efficient"},
        {"apcu.max_queries", 0},
        {"ippm.epsilon", 1e-3},
        {"ippm.max_outer", 10000},
        {"ippm.max_queries", 0},
        {"ialm.beta0", 0.01},
        {"ialm.sigma", 3.0},
        {"ialm.eps", 1e-3},
        {"ialm.dual_M", 1.0},
        {"ialm.dual_q", 0.0},
        {"ialm.max_outer", 100},
        {"ialm.max_queries", 0},
        {"ialm.subproblem_max_queries", 0},
        {"ialm.L_hat_base", nullptr},
        {"ialm.L_hat_slope", nullptr},
        {"ialm.penalty_only", false},
        {"baseline.step", 0.0},
        {"baseline.alpha", 1.0},
        {"baseline.beta1", 0.75},
        {"baseline.beta2", 1.0},
        {"baseline.delta", 1e-8},
        {"baseline.tolerance", 1e-3},
        {"baseline.max_queries", 0},
        {"baseline.max_iterations", 0},
        {"baseline.estimator", "coordinate"},
        {"baseline.batch", 1},
        {"baseline.direction", "gaussian"},
        {"run.seeds", Json::array({1})},
        {"run.output", "runs"},
        {"run.keep_epochs", true},
    };
    return d;
}

const std::vector<std::string> kMethods    = {"apcu", "ippm", "ialm", "prox_sgd", "adamm", "ars"};
const std::vector<std::string> kSubsolvers = {"ippm", "prox_sgd", "adamm"};
const std::vector<std::string> kProblems   = {"lcqp", "uscqp", "wcqp", "logistic", "sensor"};

bool one_of(const std::string &v, const std::vector<std::string> &options) {
    return std::find(options.begin(), options.end(), v) != options.end();
}

std::string join(const std::vector<std::string> &v) {
    std::string s;
    for (const auto &x : v)
        s += (s.empty() ? "" : ", ") + x;
    return s;
}

Json parse_scalar(const std::string &text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error &) {
        return text;
    }
}

} // namespace

RunConfig::RunConfig() : values_(defaults()) {}

void RunConfig::set(const std::string &key, const Json &value) {
    if (values_.contains(key)) {
        values_[key] = value;
        return;
    }
    // nested write into an object-valued leaf such as problem.params.n
    const auto dot = key.rfind('.');
    if (dot != std::string::npos) {
        const auto parent = key.substr(0, dot);
        if (values_.contains(parent) && values_[parent].is_object()) {
            values_[parent][key.substr(dot + 1)] = value;
            return;
        }
    }
    throw ConfigError("unknown configuration key '" + key + "'");
}

void RunConfig::set(const std::string &assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override '" + assignment + "' is not of the form key=value");
    set(assignment.substr(0, eq), parse_scalar(assignment.substr(eq + 1)));
}

RunConfig RunConfig::from_json(const Json &doc, const std::string &source) {
    if (!doc.is_object())
        throw ConfigError(source + ": top level must be an object");
    RunConfig cfg;
    for (const auto &[section, body] : doc.items()) {
        if (section == "grid") {
            if (!body.is_object())
                throw ConfigError(source + ": 'grid' must map keys to value lists");
            for (const auto &[key, values] : body.items()) {
                if (!values.is_array() || values.empty())
                    throw ConfigError(source + ": grid axis '" + key + "' must be a non-empty list");
                cfg.set(key, values.front()); // checks the key exists
                cfg.grid_[key] = values;
            }
            continue;
        }
        if (!body.is_object())
            throw ConfigError(source + ": section '" + section + "' must be an object");
        for (const auto &[key, value] : body.items()) {
            const auto full = section + "." + key;
            if (!cfg.values_.contains(full))
                throw ConfigError(source + ": unknown configuration key '" + full + "'");
            cfg.values_[full] = value;
        }
    }
    // restore grid defaults so validation sees the document's own values
    for (const auto &[key, values] : cfg.grid_.items())
        cfg.set(key, values.front());
    cfg.validate();
    return cfg;
}

RunConfig RunConfig::from_file(const fs::path &path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path.string() + "'");
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::parse_error &e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return from_json(doc, path.string());
}

const Json &RunConfig::get(const std::string &key) const {
    if (!values_.contains(key))
        throw ConfigError("unknown configuration key '" + key + "'");
    return values_.at(key);
}

double RunConfig::number(const std::string &key) const {
    const auto &v = get(key);
    if (!v.is_number())
        throw ConfigError("configuration key '" + key + "' must be a number");
    return v.get<double>();
}

std::uint64_t RunConfig::integer(const std::string &key) const {
    const auto &v = get(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
        throw ConfigError("configuration key '" + key + "' must be a nonnegative integer");
    return v.get<std::uint64_t>();
}

std::string RunConfig::text(const std::string &key) const {
    const auto &v = get(key);
    if (!v.is_string())
        throw ConfigError("configuration key '" + key + "' must be a string");
    return v.get<std::string>();
}

bool RunConfig::flag(const std::string &key) const {
    const auto &v = get(key);
    if (!v.is_boolean())
        throw ConfigError("configuration key '" + key + "' must be true or false");
    return v.get<bool>();
}

std::vector<std::uint64_t> RunConfig::seeds() const {
    const auto &v = get("run.seeds");
    std::vector<std::uint64_t> out;
    if (v.is_number_integer()) {
        out.push_back(v.get<std::uint64_t>());
        return out;
    }
    if (!v.is_array() || v.empty())
        throw ConfigError("configuration key 'run.seeds' must be a non-empty list of integers");
    for (const auto &s : v) {
        if (!s.is_number_integer() || s.get<std::int64_t>() < 0)
            throw ConfigError("configuration key 'run.seeds' must hold nonnegative integers");
        out.push_back(s.get<std::uint64_t>());
    }
    return out;
}

void RunConfig::validate() const {
    const auto problem = text("problem.name");
    if (problem.empty() && text("problem.instance").empty())
        throw ConfigError("configuration key 'problem.name' is required (one of " + join(kProblems) + ")");
    if (!problem.empty() && !one_of(problem, kProblems))
        throw ConfigError("configuration key 'problem.name': unknown problem '" + problem + "'");
    if (!get("problem.params").is_object())
        throw ConfigError("configuration key 'problem.params' must be an object");
    for (const auto &[k, v] : get("problem.params").items())
        if (!v.is_number())
            throw ConfigError("configuration key 'problem.params." + k + "' must be a number");
    if (!get("problem.seed").is_null())
        integer("problem.seed");
    if (!one_of(text("method.name"), kMethods))
        throw ConfigError("configuration key 'method.name': unknown method '" + text("method.name") +
                          "' (one of " + join(kMethods) + ")");
    if (!one_of(text("method.subsolver"), kSubsolvers))
        throw ConfigError("configuration key 'method.subsolver': unknown subsolver '" +
                          text("method.subsolver") + "'");
    for (const char *k : {"estimator.radius", "apcu.epsilon", "ippm.epsilon", "ialm.eps", "ialm.beta0",
                          "ialm.dual_M", "baseline.alpha"})
        if (!(number(k) > 0))
            throw ConfigError(std::string("configuration key '") + k + "' must be positive");
    if (!(number("ialm.sigma") > 1))
        throw ConfigError("configuration key 'ialm.sigma' must exceed 1");
    if (number("ialm.dual_q") < 0)
        throw ConfigError("configuration key 'ialm.dual_q' must be nonnegative");
    if (number("baseline.tolerance") < 0 || number("baseline.step") < 0)
        throw ConfigError("configuration keys 'baseline.tolerance' and 'baseline.step' must be nonnegative");
    const auto j = integer("estimator.j");
    if (j < 1 || j > 8)
        throw ConfigError("configuration key 'estimator.j' must lie in [1, 8]");
    const auto mode = text("estimator.radius_mode");
    if (mode != "fixed" && mode != "automatic")
        throw ConfigError("configuration key 'estimator.radius_mode' must be 'fixed' or 'automatic'");
    const auto impl = text("apcu.implementation");
    if (impl != "efficient" && impl != "reference")
        throw ConfigError("configuration key 'apcu.implementation' must be 'efficient' or 'reference'");
    const auto est = text("baseline.estimator");
    if (est != "coordinate" && est != "random")
        throw ConfigError("configuration key 'baseline.estimator' must be 'coordinate' or 'random'");
    const auto dir = text("baseline.direction");
    if (dir != "gaussian" && dir != "unit_sphere")
        throw ConfigError("configuration key 'baseline.direction' must be 'gaussian' or 'unit_sphere'");
    if (integer("baseline.batch") < 1)
        throw ConfigError("configuration key 'baseline.batch' must be at least 1");
    for (const char *k : {"apcu.epoch_length", "apcu.max_queries", "ippm.max_outer", "ippm.max_queries",
                          "ialm.max_outer", "ialm.max_queries", "ialm.subproblem_max_queries",
                          "baseline.max_queries", "baseline.max_iterations"})
        integer(k);
    for (const char *k : {"ialm.L_hat_base", "ialm.L_hat_slope"})
        if (!get(k).is_null())
            number(k);
    flag("ialm.penalty_only");
    flag("run.keep_epochs");
    text("run.output");
    seeds();
}

Json RunConfig::to_json() const {
    Json nested = Json::object();
    for (const auto &[key, value] : values_.items()) {
        const auto dot = key.find('.');
        nested[key.substr(0, dot)][key.substr(dot + 1)] = value;
    }
    if (!grid_.empty())
        nested["grid"] = grid_;
    return nested;
}

// ---------------------------------------------------------------------------

namespace {

std::map<std::string, double> problem_params(const RunConfig &cfg) {
    std::map<std::string, double> out;
    for (const auto &[k, v] : cfg.get("problem.params").items())
        out[k] = v.get<double>();
    return out;
}

ProblemInstance build_problem(const RunConfig &cfg, std::uint64_t seed) {
    const auto path = cfg.text("problem.instance");
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("cannot open instance file '" + path + "'");
        return build_instance(read_instance(in));
    }
    const auto &ps = cfg.get("problem.seed");
    const std::uint64_t problem_seed = ps.is_null() ? seed : ps.get<std::uint64_t>();
    return make_problem(cfg.text("problem.name"), problem_params(cfg), problem_seed,
                        cfg.text("problem.dataset"));
}

StencilSpec stencil_for(const RunConfig &cfg, const ProblemInstance &inst, double epsilon) {
    const int j      = static_cast<int>(cfg.integer("estimator.j"));
    const double L   = std::max(inst.problem.constants.L0, 1e-12);
    double radius    = cfg.number("estimator.radius");
    if (cfg.text("estimator.radius_mode") == "automatic") {
        RadiusRequest req;
        req.epsilon             = epsilon;
        req.mu                  = inst.mu > 0 ? inst.mu : std::max(inst.problem.constants.rho0, 1e-12);
        req.L                   = L;
        req.diameter            = inst.problem.h.diameter();
        req.coordinate_diameters = inst.problem.h.coordinate_diameters();
        if (!std::isfinite(req.diameter)) {
            // unbounded domain: use the distance scale of the start point
            req.diameter             = std::max(1.0, 2.0 * inst.x0.norm());
            req.coordinate_diameters = Vector();
        }
        req.dim                 = inst.dim();
        req.order               = j;
        req.smoothness_constant = L;
        req.mode                = RadiusMode::automatic;
        radius                  = select_radius(req);
    }
    return make_stencil(j, radius, L);
}

BaselineConfig baseline_config(const RunConfig &cfg, const StencilSpec &stencil) {
    BaselineConfig b;
    b.step              = cfg.number("baseline.step");
    b.alpha             = cfg.number("baseline.alpha");
    b.beta1             = cfg.number("baseline.beta1");
    b.beta2             = cfg.number("baseline.beta2");
    b.delta             = cfg.number("baseline.delta");
    b.tolerance         = cfg.number("baseline.tolerance");
    b.max_queries       = cfg.integer("baseline.max_queries");
    b.max_iterations    = cfg.integer("baseline.max_iterations");
    b.estimator.kind    = cfg.text("baseline.estimator") == "random" ? EstimatorKind::random
                                                                     : EstimatorKind::coordinate;
    b.estimator.stencil = stencil;
    b.estimator.radius  = stencil.radius;
    b.estimator.batch   = static_cast<int>(cfg.integer("baseline.batch"));
    b.estimator.direction =
        cfg.text("baseline.direction") == "unit_sphere" ? Direction::unit_sphere : Direction::gaussian;
    return b;
}

ApcuConfig apcu_template(const RunConfig &cfg, const StencilSpec &stencil) {
    ApcuConfig a;
    a.epoch_length   = static_cast<Index>(cfg.integer("apcu.epoch_length"));
    a.max_queries    = cfg.integer("apcu.max_queries");
    a.implementation = cfg.text("apcu.implementation") == "reference" ? ApcuImplementation::reference
                                                                      : ApcuImplementation::efficient;
    a.stencil = stencil;
    return a;
}

void require_unconstrained(const ProblemInstance &inst, const std::string &method) {
    if (inst.problem.num_constraints() != 0)
        throw ConfigError("method '" + method + "' needs an unconstrained problem; '" + inst.name +
                          "' has constraints (use method.name = ialm)");
}

double estimator_slack(const ProblemInstance &inst, const StencilSpec &s, double dual_l1) {
    const auto spec = make_stencil(s.order, s.radius, std::max(inst.problem.constants.L0, 1.0));
    return std::sqrt(static_cast<double>(inst.dim())) * error_bound(spec) * (1.0 + dual_l1);
}

} // namespace

RunOutcome run_single(const RunConfig &cfg, std::uint64_t seed, const std::string &run_id) {
    RunOutcome out;
    out.run_id = run_id;
    out.seed   = seed;
    out.method = cfg.text("method.name");
    if (out.method == "ialm")
        out.method += "+" + cfg.text("method.subsolver");
    SolverTrace trace(run_id);
    trace.keep_epochs = cfg.flag("run.keep_epochs");
    try {
        auto inst   = build_problem(cfg, seed);
        out.problem = inst.name;
        auto &P     = inst.problem;
        SolverHooks hooks;
        hooks.trace     = &trace;
        hooks.objective = [&P](const Vector &x) { return P.g.eval(x) + P.h.value(x); };
        Rng rng         = make_rng(seed, 1);
        const auto method = cfg.text("method.name");
        Vector x;
        double tolerance = 0, slack = 0;

        if (method == "ialm") {
            IalmConfig ic;
            ic.beta0                  = cfg.number("ialm.beta0");
            ic.sigma                  = cfg.number("ialm.sigma");
            ic.dual_M                 = cfg.number("ialm.dual_M");
            ic.dual_q                 = cfg.number("ialm.dual_q");
            ic.epsilon                = cfg.number("ialm.eps");
            ic.max_outer              = cfg.integer("ialm.max_outer");
            ic.max_queries            = cfg.integer("ialm.max_queries");
            ic.subproblem_max_queries = cfg.integer("ialm.subproblem_max_queries");
            ic.penalty_only           = cfg.flag("ialm.penalty_only");
            if (!cfg.get("ialm.L_hat_base").is_null())
                ic.L_hat_base = cfg.number("ialm.L_hat_base");
            if (!cfg.get("ialm.L_hat_slope").is_null())
                ic.L_hat_slope = cfg.number("ialm.L_hat_slope");
            const auto stencil = stencil_for(cfg, inst, ic.epsilon);
            ic.kkt_stencil     = stencil;
            SubproblemSolver sub;
            const auto name = cfg.text("method.subsolver");
            if (name == "ippm") {
                IppmConfig ip;
                ip.max_outer = cfg.integer("ippm.max_outer");
                ip.inner     = apcu_template(cfg, stencil);
                sub          = ippm_subsolver(ip);
            } else {
                auto b   = baseline_config(cfg, stencil);
                b.method = baseline_method_from_string(name);
                sub      = baseline_subsolver(b);
            }
            hooks.objective = {};
            const auto r    = zo_ialm(P, inst.x0, ic, sub, rng, hooks);
            x               = r.x;
            out.status      = to_string(r.status);
            out.certified   = r.certified();
            out.pres        = r.pres;
            out.dres        = r.dres;
            out.iterations  = r.outer_iterations;
            const auto exact = P.g.has_verifier() ? kkt_residuals_exact(P, r.x, r.y_report) : KktResiduals{};
            out.true_stationarity = P.g.has_verifier() ? std::max(exact.pres, exact.dres)
                                                        : std::numeric_limits<double>::quiet_NaN();
            tolerance = ic.epsilon;
            slack     = estimator_slack(inst, stencil, r.y_report.lpNorm<1>());
        } else {
            require_unconstrained(inst, method);
            SolveResult r;
            if (method == "apcu") {
                if (!(inst.mu > 0))
                    throw ConfigError("method 'apcu' needs a strongly convex problem; '" + inst.name +
                                      "' is not (use method.name = ippm)");
                auto a    = apcu_template(cfg, stencil_for(cfg, inst, cfg.number("apcu.epsilon")));
                a.mu      = inst.mu;
                a.L       = P.constants.L0;
                a.epsilon = cfg.number("apcu.epsilon");
                r         = zo_apcu(P.g, P.h, inst.x0, a, rng, hooks);
                tolerance = a.epsilon;
                slack     = estimator_slack(inst, a.stencil, 0);
            } else if (method == "ippm") {
                IppmConfig ip;
                ip.rho         = std::max(P.constants.rho0, inst.mu > 0 ? inst.mu : 1e-12);
                ip.L_phi       = std::max(P.constants.L0, ip.rho);
                ip.epsilon     = cfg.number("ippm.epsilon");
                ip.max_outer   = cfg.integer("ippm.max_outer");
                ip.max_queries = cfg.integer("ippm.max_queries");
                ip.inner       = apcu_template(cfg, stencil_for(cfg, inst, ip.epsilon));
                r              = zo_ippm(P.g, P.h, inst.x0, ip, rng, hooks);
                tolerance      = ip.epsilon;
                slack          = estimator_slack(inst, ip.inner.stencil, 0);
            } else {
                auto b   = baseline_config(cfg, stencil_for(cfg, inst, cfg.number("baseline.tolerance")));
                b.method = baseline_method_from_string(method);
                b.L      = P.constants.L0;
                b.mu     = inst.mu;
                r        = run_baseline(P.g, P.h, inst.x0, b, rng, hooks);
                tolerance = b.tolerance;
                slack     = estimator_slack(inst, b.estimator.stencil, 0);
            }
            x              = r.x;
            out.status     = to_string(r.status);
            out.certified  = r.converged();
            out.dres       = r.stationarity;
            out.iterations = r.iterations;
            if (P.g.has_verifier()) {
                VerificationScope scope(P.ledger());
                out.true_stationarity = P.h.subdiff_distance(x, P.g.true_gradient(x));
            }
        }
        {
            VerificationScope scope(P.ledger());
            out.objective = P.g.eval(x) + P.h.value(x);
        }
        if (std::isfinite(inst.f_star))
            out.objective_error = out.objective - inst.f_star;
        if (out.certified && std::isfinite(out.true_stationarity))
            out.verified = out.true_stationarity <= tolerance + slack;
        out.solver_queries       = P.ledger().solver_queries;
        out.verification_queries = P.ledger().verification_queries;

        TraceRecord fin;
        fin.kind      = IterationKind::final;
        fin.iteration = out.iterations;
        fin.objective = out.objective;
        fin.pres      = out.pres;
        fin.dres      = out.dres;
        trace.record(std::move(fin), P.ledger());
    } catch (const ConfigError &) {
        throw;
    } catch (const std::exception &e) {
        out.status = "error";
        out.error  = e.what();
    }
    out.wall_ms = trace.elapsed_ms();
    out.trace   = trace.records();
    return out;
}

std::vector<std::pair<RunConfig, std::pair<std::uint64_t, std::string>>>
expand_grid(const RunConfig &config) {
    std::vector<RunConfig> variants{config};
    std::vector<std::string> tags{""};
    for (const auto &[key, values] : config.grid().items()) {
        std::vector<RunConfig> next;
        std::vector<std::string> next_tags;
        for (std::size_t v = 0; v < variants.size(); ++v) {
            for (const auto &value : values) {
                RunConfig c = variants[v];
                c.set(key, value);
                c.validate();
                next.push_back(std::move(c));
                std::string label = value.is_string() ? value.get<std::string>() : value.dump();
                for (auto &ch : label)
                    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '.' && ch != '-' && ch != '_')
                        ch = '_';
                next_tags.push_back(tags[v] + "_" + label);
            }
        }
        variants = std::move(next);
        tags     = std::move(next_tags);
    }
    std::vector<std::pair<RunConfig, std::pair<std::uint64_t, std::string>>> runs;
    for (std::size_t v = 0; v < variants.size(); ++v) {
        const auto &c        = variants[v];
        std::string method   = c.text("method.name");
        if (method == "ialm")
            method += "-" + c.text("method.subsolver");
        const std::string problem = c.text("problem.name").empty() ? "instance" : c.text("problem.name");
        for (auto seed : c.seeds())
            runs.push_back({c, {seed, problem + "_" + method + tags[v] + "_s" + std::to_string(seed)}});
    }
    return runs;
}

const char *const kSummaryHeader =
    "run_id,problem,method,seed,status,certified,verified,pres,dres,objective,objective_error,"
    "true_stationarity,solver_queries,verification_queries,iterations,wall_ms,error";

namespace {
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
std::string csv_escape(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char c : s)
        q += c == '"' ? std::string("\"\"") : std::string(1, c == '\n' ? ' ' : c);
    return q + "\"";
}
} // namespace

void write_summary_csv(std::ostream &os, const std::vector<RunOutcome> &rows) {
    os << kSummaryHeader << '\n';
    for (const auto &r : rows)
        os << csv_escape(r.run_id) << ',' << r.problem << ',' << r.method << ',' << r.seed << ','
           << r.status << ',' << (r.certified ? 1 : 0) << ',' << (r.verified ? 1 : 0) << ','
           << fmt(r.pres) << ',' << fmt(r.dres) << ',' << fmt(r.objective) << ','
           << fmt(r.objective_error) << ',' << fmt(r.true_stationarity) << ',' << r.solver_queries
           << ',' << r.verification_queries << ',' << r.iterations << ',' << fmt(r.wall_ms) << ','
           << csv_escape(r.error) << '\n';
}

std::vector<RunOutcome> run_bench(const RunConfig &config, const fs::path &dir, unsigned jobs) {
    const auto runs = expand_grid(config);
    fs::create_directories(dir);
    std::vector<RunOutcome> results(runs.size());
    std::atomic<std::size_t> next{0};
    std::mutex config_error_mutex;
    std::exception_ptr config_error;

    auto worker = [&] {
        for (std::size_t i = next++; i < runs.size(); i = next++) {
            const auto &[cfg, meta] = runs[i];
            try {
                results[i] = run_single(cfg, meta.first, meta.second);
            } catch (...) {
                std::lock_guard<std::mutex> lock(config_error_mutex);
                if (!config_error)
                    config_error = std::current_exception();
                continue;
            }
            const auto &r = results[i];
            std::ofstream trace(dir / (r.run_id + ".csv"), std::ios::binary);
            write_trace_csv(trace, r.trace);
            Json m = {{"run_id", r.run_id},   {"problem", r.problem}, {"method", r.method},
                      {"seed", r.seed},       {"status", r.status},   {"config", cfg.to_json()}};
            if (std::isfinite(r.objective_error))
                m["f_star"] = r.objective - r.objective_error;
            std::ofstream(dir / (r.run_id + ".meta.json"), std::ios::binary) << m.dump(1) << '\n';
        }
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(runs.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < jobs; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto &t : pool)
        t.join();
    if (config_error)
        std::rethrow_exception(config_error);

    std::ofstream summary(dir / "summary.csv", std::ios::binary);
    write_summary_csv(summary, results);
    return results;
}

PlotX plot_x_from_string(const std::string &s) {
    if (s == "queries")
        return PlotX::queries;
    if (s == "iterations")
        return PlotX::iterations;
    throw ConfigError("x axis must be 'queries' or 'iterations', got '" + s + "'");
}

PlotY plot_y_from_string(const std::string &s) {
    if (s == "pres")
        return PlotY::pres;
    if (s == "dres")
        return PlotY::dres;
    if (s == "objective")
        return PlotY::objective;
    if (s == "objective_error")
        return PlotY::objective_error;
    if (s == "grad_norm")
        return PlotY::grad_norm;
    throw ConfigError("y axis must be one of pres, dres, objective, objective_error, grad_norm; got '" +
                      s + "'");
}

void emit_plot_data(std::ostream &os, const std::vector<fs::path> &traces, PlotX xaxis, PlotY yaxis) {
    os << "method,seed,x,y,outer\n";
    for (const auto &path : traces) {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("cannot open trace '" + path.string() + "'");
        std::vector<TraceRecord> rows;
        try {
            rows = read_trace_csv(in);
        } catch (const ConfigError &e) {
            throw ConfigError(path.string() + ": " + e.what());
        }
        std::string method = path.stem().string();
        std::string seed;
        double f_star = std::numeric_limits<double>::quiet_NaN();
        fs::path meta = path;
        meta.replace_extension(".meta.json");
        if (std::ifstream mi(meta); mi) {
            const auto m = Json::parse(mi, nullptr, false);
            if (m.is_object()) {
                method = m.value("method", method);
                if (m.contains("seed"))
                    seed = m["seed"].dump();
                if (m.contains("f_star") && m["f_star"].is_number())
                    f_star = m["f_star"].get<double>();
            }
        }
        if (yaxis == PlotY::objective_error && !std::isfinite(f_star))
            throw ConfigError(path.string() + ": objective_error needs f_star in the run's .meta.json");
        for (const auto &r : rows) {
            if (r.kind == IterationKind::final)
                continue;
            double y = 0;
            switch (yaxis) {
            case PlotY::pres: y = r.pres; break;
            case PlotY::dres:
            case PlotY::grad_norm: y = r.dres; break;
            case PlotY::objective: y = r.objective; break;
            case PlotY::objective_error: y = r.objective - f_star; break;
            }
            if (!std::isfinite(y))
                continue;
            const double x = xaxis == PlotX::queries ? static_cast<double>(r.solver_queries)
                                                     : static_cast<double>(r.iteration);
            os << csv_escape(method) << ',' << seed << ',' << fmt(x) << ',' << fmt(y) << ','
               << (r.kind == IterationKind::outer ? 1 : 0) << '\n';
        }
    }
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::uint64_t> parse_seed_list(const std::string &s) {
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto dash = item.find('-');
        try {
            if (dash != std::string::npos && dash > 0) {
                const auto lo = std::stoull(item.substr(0, dash)), hi = std::stoull(item.substr(dash + 1));
                if (hi < lo)
                    throw ConfigError("");
                for (auto v = lo; v <= hi; ++v)
                    seeds.push_back(v);
            } else {
                seeds.push_back(std::stoull(item));
            }
        } catch (const std::exception &) {
            throw ConfigError("--seed expects a list like 1,2,5-8; got '" + s + "'");
        }
    }
    if (seeds.empty())
        throw ConfigError("--seed expects at least one seed");
    return seeds;
}

RunConfig load_config(const std::string &path, const std::vector<std::string> &overrides,
                      const std::string &seeds) {
    RunConfig cfg = path.empty() ? RunConfig() : RunConfig::from_file(path);
    for (const auto &o : overrides)
        cfg.set(o);
    if (!seeds.empty())
        cfg.set("run.seeds", Json(parse_seed_list(seeds)));
    cfg.validate();
    return cfg;
}

int exit_code(const std::vector<RunOutcome> &rows, bool strict) {
    for (const auto &r : rows) {
        if (r.certified && !r.verified)
            return 1;
        if (strict && !r.certified)
            return 1;
    }
    return 0;
}

} // namespace

int main_entry(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Zeroth-order augmented Lagrangian solvers and benchmark harness", "zoalm"};
    app.require_subcommand(1);

    std::string config_path, output_dir, seeds;
    std::vector<std::string> overrides;
    unsigned jobs = 1;
    bool strict   = false;

    auto *solve = app.add_subcommand("solve", "Run one configuration (first seed) and print its summary row");
    solve->add_option("-c,--config", config_path, "JSON run configuration");
    solve->add_option("--set", overrides, "Override a key, e.g. --set ialm.beta0=0.1")->take_all();
    solve->add_option("--seed", seeds, "Seed (first of the list is used)");
    solve->add_option("-o,--output", output_dir, "Directory for the trace (default: none)");
    solve->add_flag("--strict", strict, "Fail unless the run certifies");

    auto *bench = app.add_subcommand("bench", "Run the grid x seeds of a configuration");
    bench->add_option("-c,--config", config_path, "JSON run configuration")->required();
    bench->add_option("--set", overrides, "Override a key")->take_all();
    bench->add_option("--seed", seeds, "Seed list such as 1,2,5-8");
    bench->add_option("-o,--output", output_dir, "Output directory (default: run.output)");
    bench->add_option("-j,--jobs", jobs, "Parallel runs")->check(CLI::PositiveNumber);
    bench->add_flag("--strict", strict, "Fail unless every run certifies");

    std::vector<std::string> trace_files;
    std::string xaxis = "queries", yaxis = "dres", plot_out;
    auto *plot = app.add_subcommand("plotdata", "Long-format plot data from trace CSV files");
    plot->add_option("traces", trace_files, "Trace CSV files");
    plot->add_option("-x,--x-axis", xaxis, "queries | iterations");
    plot->add_option("-y,--y-axis", yaxis, "pres | dres | objective | objective_error | grad_norm");
    plot->add_option("-o,--output", plot_out, "Output file (default: stdout)");

    std::string gen_problem, gen_out, dataset;
    std::vector<std::string> gen_params;
    std::uint64_t gen_seed = 1;
    auto *gen = app.add_subcommand("gen", "Write a problem instance file");
    gen->add_option("problem", gen_problem, "lcqp | uscqp | wcqp | logistic | sensor")->required();
    gen->add_option("--param", gen_params, "Generator parameter name=value")->take_all();
    gen->add_option("--seed", gen_seed, "Generator seed");
    gen->add_option("--dataset", dataset, "CSV file for logistic");
    gen->add_option("-o,--output", gen_out, "Output file (default: stdout)")->required();

    try {
        std::vector<std::string> args;
        for (int i = argc - 1; i > 0; --i)
            args.emplace_back(argv[i]);
        app.parse(args);
    } catch (const CLI::ParseError &e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    try {
        if (*solve) {
            auto cfg = load_config(config_path, overrides, seeds);
            const auto runs = expand_grid(cfg);
            auto r = run_single(runs.front().first, runs.front().second.first, runs.front().second.second);
            if (!output_dir.empty()) {
                fs::create_directories(output_dir);
                std::ofstream t(fs::path(output_dir) / (r.run_id + ".csv"), std::ios::binary);
                write_trace_csv(t, r.trace);
            }
            write_summary_csv(out, {r});
            if (!r.error.empty())
                err << "run failed: " << r.error << '\n';
            return exit_code({r}, strict);
        }
        if (*bench) {
            auto cfg = load_config(config_path, overrides, seeds);
            const fs::path dir = output_dir.empty() ? fs::path(cfg.text("run.output")) : fs::path(output_dir);
            const auto rows = run_bench(cfg, dir, jobs);
            write_summary_csv(out, rows);
            for (const auto &r : rows)
                if (!r.error.empty())
                    err << r.run_id << ": " << r.error << '\n';
            return exit_code(rows, strict);
        }
        if (*plot) {
            std::vector<fs::path> paths(trace_files.begin(), trace_files.end());
            const auto x = plot_x_from_string(xaxis);
            const auto y = plot_y_from_string(yaxis);
            if (plot_out.empty()) {
                emit_plot_data(out, paths, x, y);
            } else {
                std::ofstream f(plot_out, std::ios::binary);
                emit_plot_data(f, paths, x, y);
            }
            return 0;
        }
        if (*gen) {
            std::map<std::string, double> params;
            for (const auto &p : gen_params) {
                const auto eq = p.find('=');
                if (eq == std::string::npos)
                    throw ConfigError("--param expects name=value, got '" + p + "'");
                try {
                    params[p.substr(0, eq)] = std::stod(p.substr(eq + 1));
                } catch (const std::exception &) {
                    throw ConfigError("--param " + p.substr(0, eq) + " needs a number");
                }
            }
            const auto inst = make_problem(gen_problem, params, gen_seed, dataset);
            std::ofstream f(gen_out, std::ios::binary);
            if (!f)
                throw ConfigError("cannot write '" + gen_out + "'");
            write_instance(f, inst.data);
            return 0;
        }
    } catch (const ConfigError &e) {
        err << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const InputError &e) {
        err << "input error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

} // namespace zoalm::cli
