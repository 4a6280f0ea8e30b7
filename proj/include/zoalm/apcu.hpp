#pragma once

#include <zoalm/estimator.hpp>
#include <zoalm/prox.hpp>
#include <zoalm/solver.hpp>

namespace zoalm {

enum class ApcuImplementation { reference, efficient };

/// Parameters of the zeroth-order accelerated proximal coordinate update.
struct ApcuConfig {
    double mu      = 1.0;  ///< strong convexity of G
    double L       = 1.0;  ///< smoothness of G
    double epsilon = 1e-3; ///< stationarity target
    /// Iterations between stationarity checks; 0 means d.
    Index epoch_length = 0;
    std::uint64_t max_queries    = 0; ///< 0 = unlimited
    std::uint64_t max_iterations = 0; ///< 0 = unlimited
    ApcuImplementation implementation = ApcuImplementation::efficient;
    StencilSpec stencil = make_stencil(1, 1e-6);

    /// alpha = sqrt(mu/L) / d. Throws InputError when mu > L or mu <= 0.
    double alpha(Index dim) const;
};

/// Minimizes F = G + H for black-box, mu-strongly convex, L-smooth G and
/// white-box separable H, drawing one random coordinate per iteration from
/// `rng`. Every `epoch_length` iterations it takes a full-gradient prox step
/// x_hat and returns x_hat once the estimated dist(0, grad G(x_hat) + dH(x_hat))
/// is at most 3 eps / 4.
///
/// The reference form keeps x, y, z explicitly. The efficient form keeps
/// u, v with x = s u + v, y = s rho u + v, z = -s u + v, where s is rho^k
/// relative to the last epoch boundary (u is rescaled there to keep s near 1).
///
/// On budget exhaustion the best x_hat seen so far is returned (or the prox
/// of the current iterate when no check has run).
SolveResult zo_apcu(const BlackBoxOracle &G, const SeparableTerm &H, const Vector &x0,
                    const ApcuConfig &config, Rng &rng, const SolverHooks &hooks = {});

/// argmin_x <g, x - x0> + (L/2)||x - x0||^2 + H(x) with g the stencil estimate
/// of grad G(x0). Costs p*d queries.
Vector postprocess_prox_step(const BlackBoxOracle &G, const Vector &x, double L,
                             const SeparableTerm &H, const StencilSpec &stencil);

} // namespace zoalm
