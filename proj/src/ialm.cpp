#include <zoalm/ialm.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace zoalm {

namespace {
double sum_sq(const std::vector<double> &v) {
    return std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
}
} // namespace

double ProblemConstants::L_bar() const { return std::sqrt(sum_sq(L)); }
double ProblemConstants::B_c_bar() const { return std::sqrt(sum_sq(B)); }
double ProblemConstants::rho_c() const { return std::inner_product(B.begin(), B.end(), rho.begin(), 0.0); }
double ProblemConstants::L_c() const {
    double s = 0;
    for (std::size_t i = 0; i < B.size(); ++i)
        s += B[i] * L[i] + B[i] * B[i];
    return s;
}

void ConstrainedProblem::validate() const {
    if (!g)
        throw InputError("problem has no objective oracle");
    if (h.dim() != g.dim())
        throw InputError("h and g dimensions differ");
    for (const auto &ci : c) {
        if (ci.dim() != g.dim())
            throw InputError("constraint dimension differs from g");
        if (&ci.ledger() != &g.ledger())
            throw InputError("constraints must share the objective's query ledger");
    }
    const auto l = c.size();
    if (constants.rho.size() != l || constants.L.size() != l || constants.B.size() != l)
        throw InputError("per-constraint constants must have one entry per constraint");
}

Vector ConstrainedProblem::constraint_values(const Vector &x) const {
    Vector v(num_constraints());
    for (Index i = 0; i < v.size(); ++i)
        v(i) = c[static_cast<std::size_t>(i)].eval(x);
    return v;
}

double ConstrainedProblem::objective(const Vector &x) const { return g.eval(x) + h.value(x); }

BlackBoxOracle al_smooth_part(const ConstrainedProblem &p, const Vector &y, double beta) {
    if (!(beta > 0))
        throw InputError("penalty parameter must be positive");
    if (y.size() != p.num_constraints())
        throw InputError("multiplier length differs from the number of constraints");
    auto value = [p, y, beta](const Vector &x) {
        const Vector cv = p.constraint_values(x);
        return p.g.eval(x) + y.dot(cv) + 0.5 * beta * cv.squaredNorm();
    };
    BlackBoxOracle::GradientFn verifier;
    bool exact = p.g.has_verifier();
    for (const auto &ci : p.c)
        exact = exact && ci.has_verifier();
    if (exact)
        verifier = [p, y, beta](const Vector &x) {
            VerificationScope scope(p.ledger());
            Vector grad     = p.g.true_gradient(x);
            const Vector cv = p.constraint_values(x);
            for (Index i = 0; i < cv.size(); ++i)
                grad += (y(i) + beta * cv(i)) * p.c[static_cast<std::size_t>(i)].true_gradient(x);
            return grad;
        };
    return BlackBoxOracle::derived(p.dim(), std::move(value), std::move(verifier), p.g.ledger_ptr(),
                                   1 + static_cast<std::uint64_t>(p.num_constraints()));
}

SubproblemConstants subproblem_constants(const ProblemConstants &k, const Vector &y, double beta) {
    const double shared = k.L_bar() * y.norm();
    return {k.rho0 + shared + beta * k.rho_c(), k.L0 + shared + beta * k.L_c()};
}

Vector dual_step(const Vector &y, const Vector &c_val, std::uint64_t k, double M, double q) {
    const double nc = c_val.norm();
    if (nc <= 1e-14)
        return y;
    const double w = M * std::pow(static_cast<double>(k + 1), q) / nc;
    return y + w * c_val;
}

namespace {

double stationarity(const SeparableTerm &h, const Vector &x, const Vector &grad) {
    return h.subdiff_distance(h.in_domain(x) ? x : h.prox(x, 1.0), grad);
}

} // namespace

KktResiduals kkt_residuals(const ConstrainedProblem &p, const Vector &x, const Vector &y,
                           const StencilSpec &stencil) {
    VerificationScope scope(p.ledger());
    KktResiduals r;
    r.pres      = p.constraint_values(x).norm();
    Vector grad = estimate_full_gradient(p.g, x, stencil);
    for (Index i = 0; i < y.size(); ++i)
        grad += y(i) * estimate_full_gradient(p.c[static_cast<std::size_t>(i)], x, stencil);
    r.dres = stationarity(p.h, x, grad);
    return r;
}

KktResiduals kkt_residuals_exact(const ConstrainedProblem &p, const Vector &x, const Vector &y) {
    VerificationScope scope(p.ledger());
    KktResiduals r;
    r.pres      = p.constraint_values(x).norm();
    Vector grad = p.g.true_gradient(x);
    for (Index i = 0; i < y.size(); ++i)
        grad += y(i) * p.c[static_cast<std::size_t>(i)].true_gradient(x);
    r.dres = stationarity(p.h, x, grad);
    return r;
}

SubproblemSolver ippm_subsolver(IppmConfig base) {
    return [base](const SubproblemRequest &req, Rng &rng, const SolverHooks &hooks) -> SolveResult {
        IppmConfig cfg  = base;
        // A convex subproblem (rho_hat = 0) still needs a positive proximal
        // weight; L_hat / 100 bounds the inner condition number.
        cfg.rho         = req.rho_hat > 0 ? req.rho_hat : 1e-2 * req.L_hat;
        cfg.L_phi       = req.L_hat;
        cfg.epsilon     = req.epsilon;
        cfg.max_queries = req.max_queries;
        return zo_ippm(req.phi, req.h, req.x0, cfg, rng, hooks);
    };
}

double penalty_at(const IalmConfig &cfg, std::uint64_t k) {
    return cfg.beta0 * std::pow(cfg.sigma, static_cast<double>(k));
}

IalmResult zo_ialm(const ConstrainedProblem &problem, const Vector &x0, const IalmConfig &cfg,
                   const SubproblemSolver &subsolver, Rng &rng, const SolverHooks &hooks) {
    problem.validate();
    if (!(cfg.beta0 > 0) || !(cfg.sigma > 1))
        throw InputError("iALM needs beta0 > 0 and sigma > 1");
    if (!(cfg.dual_M > 0) || !(cfg.dual_q >= 0))
        throw InputError("iALM needs dual_M > 0 and dual_q >= 0");
    if (!(cfg.epsilon > 0))
        throw InputError("iALM: epsilon must be positive");
    if (x0.size() != problem.dim() || !problem.h.in_domain(x0))
        throw InputError("iALM: x0 must lie in dom(h)");

    const bool override_L = std::isfinite(cfg.L_hat_base) && std::isfinite(cfg.L_hat_slope);
    QueryBudget budget(problem.ledger(), cfg.max_queries);

    IalmResult res;
    res.x        = x0;
    res.y        = Vector::Zero(problem.num_constraints());
    res.y_report = res.y;

    SolverHooks sub_hooks;
    sub_hooks.trace     = hooks.trace;
    sub_hooks.objective = hooks.objective;

    const auto l = static_cast<std::uint64_t>(problem.num_constraints());
    for (std::uint64_t k = 0; k < cfg.max_outer; ++k) {
        // room for at least one AL query plus the l queries of c(x^{k+1})
        if (budget.would_exceed(2 * l + 1)) {
            res.status = SolveStatus::budget_exceeded;
            break;
        }
        const double beta = penalty_at(cfg, k);
        auto consts       = subproblem_constants(problem.constants, res.y, beta);
        if (override_L)
            consts.L_hat = cfg.L_hat_base + cfg.L_hat_slope * beta;
        // an L-smooth function is L-weakly convex
        consts.rho_hat = std::min(consts.rho_hat, consts.L_hat);

        const auto phi = al_smooth_part(problem, res.y, beta);
        std::uint64_t sub_cap = cfg.subproblem_max_queries;
        if (budget.cap() != 0) {
            const auto room = budget.remaining() - l;
            sub_cap         = sub_cap == 0 ? room : std::min(sub_cap, room);
        }
        const SubproblemRequest req{phi,          problem.h,   res.x,
                                    consts.rho_hat, consts.L_hat, cfg.epsilon, sub_cap};
        const auto sub = subsolver(req, rng, sub_hooks);
        res.al_evaluations += phi.count();
        res.x = sub.x;

        const Vector c_val = problem.constraint_values(res.x);
        const Vector y_rep = res.y + beta * c_val;
        const auto kkt     = kkt_residuals(problem, res.x, y_rep, cfg.kkt_stencil);
        res.pres           = kkt.pres;
        res.dres           = kkt.dres;
        res.y_report       = y_rep;
        res.outer_iterations = k + 1;

        const bool done = kkt.pres <= cfg.epsilon && kkt.dres <= cfg.epsilon;
        if (!done && !cfg.penalty_only)
            res.y = dual_step(res.y, c_val, k, cfg.dual_M, cfg.dual_q);

        IalmOuterRecord rec;
        rec.k                 = k;
        rec.beta              = beta;
        rec.rho_hat           = consts.rho_hat;
        rec.L_hat             = consts.L_hat;
        rec.pres              = kkt.pres;
        rec.dres              = kkt.dres;
        rec.dual_norm         = res.y.norm();
        rec.solver_queries    = budget.used();
        rec.subproblem_status = sub.status;
        {
            VerificationScope scope(problem.ledger());
            rec.objective = hooks.objective ? hooks.objective(res.x) : problem.objective(res.x);
        }
        res.history.push_back(rec);

        if (hooks.trace) {
            TraceRecord r;
            r.kind      = IterationKind::outer;
            r.iteration = k + 1;
            r.objective = rec.objective;
            r.pres      = rec.pres;
            r.dres      = rec.dres;
            r.beta      = beta;
            r.dual_norm = rec.dual_norm;
            hooks.trace->record(std::move(r), problem.ledger());
        }
        if (hooks.observer)
            hooks.observer(k, res.x);

        if (done) {
            res.status = SolveStatus::converged;
            break;
        }
        res.status = SolveStatus::iteration_limit;
    }
    res.solver_queries = budget.used();
    return res;
}

} // namespace zoalm
