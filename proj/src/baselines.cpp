#include <zoalm/baselines.hpp>

#include <cmath>

namespace zoalm {

const char *to_string(BaselineMethod m) {
    switch (m) {
    case BaselineMethod::prox_sgd: return "prox_sgd";
    case BaselineMethod::adamm: return "adamm";
    case BaselineMethod::ars: return "ars";
    }
    return "prox_sgd";
}

BaselineMethod baseline_method_from_string(const std::string &s) {
    if (s == "prox_sgd")
        return BaselineMethod::prox_sgd;
    if (s == "adamm")
        return BaselineMethod::adamm;
    if (s == "ars")
        return BaselineMethod::ars;
    throw ConfigError("unknown baseline method '" + s + "'");
}

std::uint64_t GradientSource::cost(Index dim) const {
    if (kind == EstimatorKind::coordinate)
        return static_cast<std::uint64_t>(stencil.points) * static_cast<std::uint64_t>(dim);
    return static_cast<std::uint64_t>(batch) + 1;
}

Vector GradientSource::estimate(const BlackBoxOracle &f, const Vector &x, Rng &rng) const {
    if (kind == EstimatorKind::coordinate)
        return estimate_full_gradient(f, x, stencil);
    return random_multi_point(f, x, radius, batch, direction, rng);
}

namespace {

void check_common(const BlackBoxOracle &f, const Vector &x0, const BaselineConfig &cfg) {
    if (f.dim() != x0.size())
        throw InputError("baseline: oracle and x0 dimensions differ");
    if (!(cfg.L > 0) || !std::isfinite(cfg.L))
        throw InputError("baseline: L must be positive and finite");
    if (cfg.estimator.kind == EstimatorKind::random && cfg.estimator.batch < 1)
        throw InputError("baseline: batch size must be at least 1");
}

/// ||x - prox_{H/L}(x - g/L)|| * L, the usual prox-gradient stationarity proxy.
double gradient_mapping(const SeparableTerm &H, const Vector &x, const Vector &g, double L) {
    return L * (x - H.prox(x - g / L, L)).norm();
}

void record_step(const SolverHooks &hooks, const BlackBoxOracle &f, std::uint64_t it, double stat,
                 const Vector &x) {
    if (!hooks.trace || !hooks.trace->keep_epochs)
        return;
    TraceRecord r;
    r.kind      = IterationKind::step;
    r.iteration = it;
    r.dres      = stat;
    if (hooks.objective) {
        VerificationScope scope(f.ledger());
        r.objective = hooks.objective(x);
    }
    hooks.trace->record(std::move(r), f.ledger());
}

SolveResult done(SolveStatus s, std::uint64_t it, Vector x, double stat, const QueryBudget &budget) {
    SolveResult r;
    r.status         = s;
    r.iterations     = it;
    r.x              = std::move(x);
    r.stationarity   = stat;
    r.solver_queries = budget.used();
    return r;
}

/// Shared loop for the two prox-type baselines: estimate g at x, report the
/// gradient mapping, then let `update` move x.
template <class Update>
SolveResult prox_loop(const BlackBoxOracle &f, const SeparableTerm &H, const Vector &x0,
                      const BaselineConfig &cfg, Rng &rng, const SolverHooks &hooks, Update update) {
    check_common(f, x0, cfg);
    if (H.dim() != x0.size() || !H.in_domain(x0))
        throw InputError("baseline: x0 must lie in dom(H)");
    QueryBudget budget(f.ledger(), cfg.max_queries);
    const auto cost = cfg.estimator.cost(x0.size()) * f.cost_per_eval();
    Vector x        = x0;
    double stat     = std::numeric_limits<double>::infinity();
    for (std::uint64_t k = 0;; ++k) {
        if (cfg.max_iterations != 0 && k >= cfg.max_iterations)
            return done(SolveStatus::iteration_limit, k, x, stat, budget);
        if (budget.would_exceed(cost))
            return done(SolveStatus::budget_exceeded, k, x, stat, budget);
        const Vector g = cfg.estimator.estimate(f, x, rng);
        stat           = gradient_mapping(H, x, g, cfg.L);
        record_step(hooks, f, k, stat, x);
        if (cfg.tolerance > 0 && stat <= cfg.tolerance)
            return done(SolveStatus::converged, k, x, stat, budget);
        update(k, x, g);
        if (!x.allFinite())
            throw NumericError("baseline produced a non-finite iterate");
        if (hooks.observer)
            hooks.observer(k, x);
    }
}

} // namespace

SolveResult zo_prox_sgd(const BlackBoxOracle &f, const SeparableTerm &H, const Vector &x0,
                        const BaselineConfig &cfg, Rng &rng, const SolverHooks &hooks) {
    const double eta = cfg.step > 0 ? cfg.step : 1.0 / (static_cast<double>(x0.size()) * cfg.L);
    return prox_loop(f, H, x0, cfg, rng, hooks, [&](std::uint64_t, Vector &x, const Vector &g) {
        x = H.prox(x - eta * g, 1.0 / eta);
    });
}

SolveResult zo_adamm(const BlackBoxOracle &f, const SeparableTerm &H, const Vector &x0,
                     const BaselineConfig &cfg, Rng &rng, const SolverHooks &hooks) {
    if (!(cfg.alpha > 0) || cfg.beta1 < 0 || cfg.beta1 >= 1 || cfg.beta2 < 0 || cfg.beta2 > 1)
        throw InputError("AdaMM needs alpha > 0, 0 <= beta1 < 1, 0 <= beta2 <= 1");
    Vector m, v, vhat;
    return prox_loop(f, H, x0, cfg, rng, hooks, [&](std::uint64_t k, Vector &x, const Vector &g) {
        const Vector g2 = g.array().square();
        if (k == 0) {
            m    = Vector::Zero(g.size());
            v    = g2;
            vhat = v;
        } else {
            v    = cfg.beta2 * v + (1.0 - cfg.beta2) * g2;
            vhat = vhat.cwiseMax(v);
        }
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
        for (Index i = 0; i < x.size(); ++i) {
            const double w = (std::sqrt(vhat(i)) + cfg.delta) / cfg.alpha;
            x(i)           = H.prox_coordinate(i, x(i) - m(i) / w, w);
        }
    });
}

SolveResult zo_ars(const BlackBoxOracle &f, const Vector &x0, const BaselineConfig &cfg, Rng &rng,
                   const SolverHooks &hooks) {
    check_common(f, x0, cfg);
    if (cfg.mu < 0 || cfg.mu > cfg.L)
        throw InputError("ARS needs 0 <= mu <= L");
    const Index d     = x0.size();
    const double n4   = static_cast<double>(d) + 4.0;
    const double theta = 1.0 / (16.0 * cfg.L * n4 * n4);
    const double h     = 1.0 / (4.0 * cfg.L * n4);
    const double a     = cfg.estimator.kind == EstimatorKind::random ? cfg.estimator.radius
                                                                     : cfg.estimator.stencil.radius;
    const Index every  = cfg.check_every > 0 ? cfg.check_every : d;
    const auto step_cost  = 2 * f.cost_per_eval();
    const auto check_cost = static_cast<std::uint64_t>(cfg.estimator.stencil.points) *
                            static_cast<std::uint64_t>(d) * f.cost_per_eval();

    QueryBudget budget(f.ledger(), cfg.max_queries);
    std::normal_distribution<double> gauss;
    Vector x = x0, v = x0, y(d), u(d);
    double gamma = cfg.L;
    double stat  = std::numeric_limits<double>::infinity();

    for (std::uint64_t k = 0;; ++k) {
        if (cfg.max_iterations != 0 && k >= cfg.max_iterations)
            return done(SolveStatus::iteration_limit, k, x, stat, budget);
        if (budget.would_exceed(step_cost))
            return done(SolveStatus::budget_exceeded, k, x, stat, budget);

        // alpha^2 = theta ((1 - alpha) gamma + alpha mu)
        const double bq    = theta * (gamma - cfg.mu);
        const double alpha = 0.5 * (-bq + std::sqrt(bq * bq + 4.0 * theta * gamma));
        const double gnext = (1.0 - alpha) * gamma + alpha * cfg.mu;
        y                  = (alpha * gamma * v + gnext * x) / (gamma + alpha * cfg.mu);
        for (Index i = 0; i < d; ++i)
            u(i) = gauss(rng);
        const double fy = f.eval(y);
        const double fp = f.eval(y + a * u);
        const Vector g  = ((fp - fy) / a) * u;
        x               = y - h * g;
        v               = ((1.0 - alpha) * gamma * v + alpha * cfg.mu * y - alpha * g) / gnext;
        gamma           = gnext;
        if (!x.allFinite() || !v.allFinite())
            throw NumericError("ARS produced a non-finite iterate");
        if (hooks.observer)
            hooks.observer(k, x);

        if ((k + 1) % static_cast<std::uint64_t>(every) == 0) {
            if (budget.would_exceed(check_cost))
                return done(SolveStatus::budget_exceeded, k + 1, x, stat, budget);
            stat = estimate_full_gradient(f, x, cfg.estimator.stencil).norm();
            if (hooks.trace && hooks.trace->keep_epochs) {
                TraceRecord r;
                r.kind      = IterationKind::epoch;
                r.iteration = k + 1;
                r.dres      = stat;
                if (hooks.objective) {
                    VerificationScope scope(f.ledger());
                    r.objective = hooks.objective(x);
                }
                hooks.trace->record(std::move(r), f.ledger());
            }
            if (cfg.tolerance > 0 && stat <= cfg.tolerance)
                return done(SolveStatus::converged, k + 1, x, stat, budget);
        }
    }
}

namespace {
bool is_zero_term(const SeparableTerm &H) {
    for (Index i = 0; i < H.dim(); ++i) {
        const auto &t = H.coordinate(i);
        if (t.has_box() || t.l1 != 0 || t.l2 != 0)
            return false;
    }
    return true;
}
} // namespace

SolveResult run_baseline(const BlackBoxOracle &f, const SeparableTerm &H, const Vector &x0,
                         const BaselineConfig &cfg, Rng &rng, const SolverHooks &hooks) {
    switch (cfg.method) {
    case BaselineMethod::prox_sgd: return zo_prox_sgd(f, H, x0, cfg, rng, hooks);
    case BaselineMethod::adamm: return zo_adamm(f, H, x0, cfg, rng, hooks);
    case BaselineMethod::ars:
        if (!is_zero_term(H))
            throw UnsupportedOperation("ARS handles smooth unconstrained problems only (H must be zero)");
        return zo_ars(f, x0, cfg, rng, hooks);
    }
    throw InputError("unknown baseline method");
}

SubproblemSolver baseline_subsolver(BaselineConfig base) {
    return [base](const SubproblemRequest &req, Rng &rng, const SolverHooks &hooks) {
        BaselineConfig cfg = base;
        cfg.L              = req.L_hat;
        cfg.mu             = 0.0;
        cfg.tolerance      = req.epsilon;
        cfg.max_queries    = req.max_queries;
        return run_baseline(req.phi, req.h, req.x0, cfg, rng, hooks);
    };
}

} // namespace zoalm
