#include <zoalm/apcu.hpp>

#include <cmath>

namespace zoalm {

const char *to_string(SolveStatus s) {
    switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::budget_exceeded: return "budget_exceeded";
    case SolveStatus::iteration_limit: return "iteration_limit";
    }
    return "iteration_limit";
}

double ApcuConfig::alpha(Index dim) const {
    if (!(mu > 0) || !(L >= mu) || !std::isfinite(L))
        throw InputError("APCU needs 0 < mu <= L < inf");
    if (dim <= 0)
        throw InputError("APCU needs a positive dimension");
    return std::sqrt(mu / L) / static_cast<double>(dim);
}

Vector postprocess_prox_step(const BlackBoxOracle &G, const Vector &x, double L,
                             const SeparableTerm &H, const StencilSpec &stencil) {
    const Vector g = estimate_full_gradient(G, x, stencil);
    return H.prox(x - g / L, L);
}

namespace {

/// Shared epoch-check and bookkeeping for both iterate representations.
class EpochMonitor {
  public:
    EpochMonitor(const BlackBoxOracle &G, const SeparableTerm &H, const ApcuConfig &cfg,
                 const SolverHooks &hooks)
        : G_(G), H_(H), cfg_(cfg), hooks_(hooks) {}

    /// Returns true when x_hat(x) passes the stop test.
    bool check(const Vector &x, std::uint64_t iteration) {
        Vector xhat       = postprocess_prox_step(G_, x, cfg_.L, H_, cfg_.stencil);
        const Vector ghat = estimate_full_gradient(G_, xhat, cfg_.stencil);
        const double stat = H_.subdiff_distance(xhat, ghat);
        if (hooks_.trace && hooks_.trace->keep_epochs) {
            TraceRecord r;
            r.kind      = IterationKind::epoch;
            r.iteration = iteration;
            r.dres      = stat;
            if (hooks_.objective) {
                VerificationScope scope(G_.ledger());
                r.objective = hooks_.objective(xhat);
            }
            hooks_.trace->record(std::move(r), G_.ledger());
        }
        if (stat < best_stat_) {
            best_stat_ = stat;
            best_      = std::move(xhat);
        }
        return stat <= 0.75 * cfg_.epsilon;
    }

    bool has_best() const { return best_.size() > 0; }
    const Vector &best() const { return best_; }
    double best_stationarity() const { return best_stat_; }

  private:
    const BlackBoxOracle &G_;
    const SeparableTerm &H_;
    const ApcuConfig &cfg_;
    const SolverHooks &hooks_;
    Vector best_;
    double best_stat_ = std::numeric_limits<double>::infinity();
};

SolveResult finish(SolveStatus status, std::uint64_t iterations, const EpochMonitor &monitor,
                   const Vector &x, const SeparableTerm &H, double L, const QueryBudget &budget) {
    SolveResult res;
    res.status       = status;
    res.iterations   = iterations;
    res.x            = monitor.has_best() ? monitor.best() : H.prox(x, L);
    res.stationarity = monitor.best_stationarity();
    res.solver_queries = budget.used();
    return res;
}

} // namespace

SolveResult zo_apcu(const BlackBoxOracle &G, const SeparableTerm &H, const Vector &x0,
                    const ApcuConfig &cfg, Rng &rng, const SolverHooks &hooks) {
    const Index d = x0.size();
    if (G.dim() != d || H.dim() != d)
        throw InputError("APCU: dimension mismatch between G, H and x0");
    if (!H.in_domain(x0))
        throw InputError("APCU: x0 is outside dom(H)");
    if (!(cfg.epsilon > 0))
        throw InputError("APCU: epsilon must be positive");

    const double alpha  = cfg.alpha(d);
    const double dd     = static_cast<double>(d);
    const double weight = dd * cfg.L * alpha; // prox weight of the z-step
    const Index epoch   = cfg.epoch_length > 0 ? cfg.epoch_length : d;
    const auto p        = static_cast<std::uint64_t>(cfg.stencil.points);
    const std::uint64_t step_cost  = p * G.cost_per_eval();
    const std::uint64_t check_cost = 2 * p * static_cast<std::uint64_t>(d) * G.cost_per_eval();

    QueryBudget budget(G.ledger(), cfg.max_queries);
    EpochMonitor monitor(G, H, cfg, hooks);
    std::uniform_int_distribution<Index> pick(0, d - 1);

    auto iteration_capped = [&](std::uint64_t k) {
        return cfg.max_iterations != 0 && k >= cfg.max_iterations;
    };

    if (cfg.implementation == ApcuImplementation::reference) {
        Vector x = x0, z = x0, y(d), zhat(d);
        for (std::uint64_t k = 0;; ++k) {
            if (iteration_capped(k))
                return finish(SolveStatus::iteration_limit, k, monitor, x, H, cfg.L, budget);
            if (budget.would_exceed(step_cost))
                return finish(SolveStatus::budget_exceeded, k, monitor, x, H, cfg.L, budget);

            y              = (x + alpha * z) / (1.0 + alpha);
            const Index i  = pick(rng);
            const double g = estimate_coordinate_gradient(G, y, i, cfg.stencil);
            zhat           = (1.0 - alpha) * z + alpha * y;
            Vector znext   = zhat;
            znext(i)       = H.prox_coordinate(i, zhat(i) - g / weight, weight);
            x              = y + dd * alpha * (znext - z) + dd * alpha * alpha * (z - y);
            z              = std::move(znext);
            if (!x.allFinite())
                throw NumericError("APCU: non-finite iterate");
            if (hooks.observer)
                hooks.observer(k, x);

            if ((k + 1) % static_cast<std::uint64_t>(epoch) == 0) {
                if (budget.would_exceed(check_cost))
                    return finish(SolveStatus::budget_exceeded, k + 1, monitor, x, H, cfg.L, budget);
                if (monitor.check(x, k + 1))
                    return finish(SolveStatus::converged, k + 1, monitor, x, H, cfg.L, budget);
            }
        }
    }

    const double rho = (1.0 - alpha) / (1.0 + alpha);
    const double u_gain = (1.0 - dd * alpha) / 2.0;
    const double v_gain = (1.0 + dd * alpha) / 2.0;
    Vector u = Vector::Zero(d), v = x0, y(d);
    double scale = 1.0; // rho^k relative to the last fold of u
    auto current_x = [&] { return Vector(scale * u + v); };

    for (std::uint64_t k = 0;; ++k) {
        if (iteration_capped(k))
            return finish(SolveStatus::iteration_limit, k, monitor, current_x(), H, cfg.L, budget);
        if (budget.would_exceed(step_cost))
            return finish(SolveStatus::budget_exceeded, k, monitor, current_x(), H, cfg.L, budget);

        const double s_next = scale * rho; // rho^{k+1}
        y                   = s_next * u + v;
        const Index i       = pick(rng);
        const double g      = estimate_coordinate_gradient(G, y, i, cfg.stencil);
        const double zhat_i = -s_next * u(i) + v(i);
        const double h      = H.prox_coordinate(i, zhat_i - g / weight, weight) - zhat_i;
        if (u_gain != 0.0) // d*alpha = 1 makes the u-part vanish (and rho may be 0)
            u(i) -= u_gain / s_next * h;
        v(i) += v_gain * h;
        scale = s_next;
        if (!std::isfinite(u(i)) || !std::isfinite(v(i)))
            throw NumericError("APCU: non-finite iterate");
        if (hooks.observer)
            hooks.observer(k, current_x());

        if ((k + 1) % static_cast<std::uint64_t>(epoch) == 0) {
            u *= scale;
            scale = 1.0;
            const Vector x = v + u;
            if (budget.would_exceed(check_cost))
                return finish(SolveStatus::budget_exceeded, k + 1, monitor, x, H, cfg.L, budget);
            if (monitor.check(x, k + 1))
                return finish(SolveStatus::converged, k + 1, monitor, x, H, cfg.L, budget);
        }
    }
}

} // namespace zoalm
