#include <zoalm/ippm.hpp>

#include <cmath>

namespace zoalm {

bool IppmStep::descent_holds(double rho, double epsilon) const {
    const double delta = epsilon / 4.0;
    const double lhs   = phi_after + rho * step_norm * step_norm;
    const double rhs   = phi_before + delta * delta / (2.0 * rho);
    return lhs <= rhs + 1e-12 * std::max(1.0, std::abs(phi_before));
}

BlackBoxOracle proximal_shift(const BlackBoxOracle &phi, const Vector &center, double rho) {
    BlackBoxOracle::GradientFn verifier;
    if (phi.has_verifier())
        verifier = [phi, center, rho](const Vector &x) {
            return Vector(phi.true_gradient(x) + 2.0 * rho * (x - center));
        };
    return BlackBoxOracle::derived(
        phi.dim(),
        [phi, center, rho](const Vector &x) { return phi.eval(x) + rho * (x - center).squaredNorm(); },
        std::move(verifier), phi.ledger_ptr(), phi.cost_per_eval());
}

IppmResult zo_ippm(const BlackBoxOracle &phi, const SeparableTerm &psi, const Vector &x0,
                   const IppmConfig &cfg, Rng &rng, const SolverHooks &hooks) {
    if (!(cfg.rho > 0) || !(cfg.L_phi >= cfg.rho) || !std::isfinite(cfg.L_phi))
        throw InputError("iPPM needs 0 < rho <= L_phi < inf");
    if (!(cfg.epsilon > 0))
        throw InputError("iPPM: epsilon must be positive");
    if (!psi.in_domain(x0))
        throw InputError("iPPM: x0 is outside dom(psi)");

    QueryBudget budget(phi.ledger(), cfg.max_queries);
    ApcuConfig inner = cfg.inner;
    inner.mu         = cfg.rho;
    inner.L          = cfg.L_phi + 2.0 * cfg.rho;
    inner.epsilon    = cfg.epsilon / 4.0;

    auto big_phi = [&](const Vector &x) {
        VerificationScope scope(phi.ledger());
        return phi.eval(x) + psi.value(x);
    };

    IppmResult res;
    Vector x             = x0;
    double phi_at_center = cfg.check_descent ? big_phi(x) : std::numeric_limits<double>::quiet_NaN();

    SolverHooks inner_hooks;
    inner_hooks.trace     = hooks.trace;
    inner_hooks.objective = hooks.objective;

    for (std::uint64_t t = 0; t < cfg.max_outer; ++t) {
        if (budget.exhausted()) {
            res.status = SolveStatus::budget_exceeded;
            break;
        }
        inner.max_queries = budget.limit_for(cfg.inner.max_queries);
        const auto G      = proximal_shift(phi, x, cfg.rho);
        const auto sub = zo_apcu(G, psi, x, inner, rng, inner_hooks);

        IppmStep step;
        step.center       = x;
        step.step_norm    = (sub.x - x).norm();
        step.inner_status = sub.status;
        step.phi_before   = phi_at_center;
        if (cfg.check_descent) {
            step.phi_after = big_phi(sub.x);
            phi_at_center  = step.phi_after;
        }
        res.steps.push_back(step);
        res.iterations   = t + 1;
        res.stationarity = sub.stationarity;
        x                = sub.x;

        if (hooks.trace) {
            TraceRecord r;
            r.kind      = IterationKind::inner;
            r.iteration = t + 1;
            r.dres      = 2.0 * cfg.rho * step.step_norm;
            if (hooks.objective) {
                VerificationScope scope(phi.ledger());
                r.objective = hooks.objective(x);
            }
            hooks.trace->record(std::move(r), phi.ledger());
        }
        if (hooks.observer)
            hooks.observer(t, x);

        if (!sub.converged()) {
            res.status = sub.status == SolveStatus::budget_exceeded ? SolveStatus::budget_exceeded
                                                                    : SolveStatus::iteration_limit;
            break;
        }
        if (2.0 * cfg.rho * step.step_norm <= cfg.epsilon / 2.0) {
            res.status = SolveStatus::converged;
            break;
        }
        res.status = SolveStatus::iteration_limit;
    }
    res.x              = x;
    res.solver_queries = budget.used();
    return res;
}

} // namespace zoalm
