#pragma once

#include <zoalm/ialm.hpp>

namespace zoalm {

enum class BaselineMethod { prox_sgd, adamm, ars };
enum class EstimatorKind { coordinate, random };

const char *to_string(BaselineMethod m);
BaselineMethod baseline_method_from_string(const std::string &s);

/// Gradient source of a baseline: the coordinate stencil (p*d queries) or a
/// random multi-point estimate (b + 1 queries).
struct GradientSource {
    EstimatorKind kind  = EstimatorKind::coordinate;
    StencilSpec stencil = make_stencil(1, 1e-6);
    double radius       = 1e-6; ///< random mode
    int batch           = 1;    ///< random mode
    Direction direction = Direction::gaussian;

    std::uint64_t cost(Index dim) const;
    Vector estimate(const BlackBoxOracle &f, const Vector &x, Rng &rng) const;
};

/// Hyperparameters of the comparison solvers.
///
/// ZO-ProxSGD:  x <- prox_{eta H}(x - eta g), eta = step or 1/(d L).
/// ZO-AdaMM:    m <- b1 m + (1-b1) g,  v <- b2 v + (1-b2) g^2 (v_0 = g_0^2),
///              vh <- max(vh, v),  x <- argmin <m, x'> + sum_i w_i/2 (x'_i - x_i)^2 + H(x')
///              with w_i = (sqrt(vh_i) + delta) / alpha.
/// ZO-ARS:      accelerated random search with theta = 1/(16 L (d+4)^2),
///              h = 1/(4 L (d+4)), gamma_0 = L and Gaussian 2-point estimates.
struct BaselineConfig {
    BaselineMethod method = BaselineMethod::prox_sgd;
    double L    = 1.0;
    double mu   = 0.0; ///< ARS strong convexity (0 allowed)
    double step = 0.0; ///< ProxSGD; 0 selects 1/(d L)
    double alpha = 1.0;
    double beta1 = 0.75;
    double beta2 = 1.0;
    double delta = 1e-8;
    /// Stop when the estimated stationarity is at most this (0 disables).
    double tolerance = 1e-3;
    std::uint64_t max_queries    = 0;
    std::uint64_t max_iterations = 0;
    /// ARS: iterations between full stencil gradient checks (0 = d).
    Index check_every = 0;
    GradientSource estimator;
};

SolveResult zo_prox_sgd(const BlackBoxOracle &f, const SeparableTerm &H, const Vector &x0,
                        const BaselineConfig &config, Rng &rng, const SolverHooks &hooks = {});
SolveResult zo_adamm(const BlackBoxOracle &f, const SeparableTerm &H, const Vector &x0,
                     const BaselineConfig &config, Rng &rng, const SolverHooks &hooks = {});
/// Unconstrained smooth problems only.
SolveResult zo_ars(const BlackBoxOracle &f, const Vector &x0, const BaselineConfig &config, Rng &rng,
                   const SolverHooks &hooks = {});

/// Dispatches on config.method. ARS throws UnsupportedOperation unless H is zero.
SolveResult run_baseline(const BlackBoxOracle &f, const SeparableTerm &H, const Vector &x0,
                         const BaselineConfig &config, Rng &rng, const SolverHooks &hooks = {});

/// Subproblem solver for zo_ialm backed by a baseline. The request's L_hat
/// becomes config.L, its epsilon the tolerance and its query limit the cap.
SubproblemSolver baseline_subsolver(BaselineConfig base);

} // namespace zoalm
