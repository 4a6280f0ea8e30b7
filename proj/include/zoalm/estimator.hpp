#pragma once

#include <zoalm/oracle.hpp>

#include <random>
#include <vector>

namespace zoalm {

using Rng = std::mt19937_64;

/// Seeded generator for sub-stream `stream` of a run seeded with `seed`.
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

/// Symmetric p-point coordinate difference stencil.
///
/// For smoothness order j the stencil uses p = max(2(j-1), 2) points at
/// x +/- q*a*e_i, q = 1..m with m = p/2. The weights C_q solve the odd-power
/// Vandermonde system
///
///     sum_q q^(2r-1) C_q = 1/(2a)  (r = 1),   = 0  (r = 2..m)
///
/// which cancels the Taylor terms of order 3, 5, ..., 2m-1.
struct StencilSpec {
    int order                   = 1;   ///< smoothness order j
    int points                  = 2;   ///< p
    double radius               = 1e-6; ///< a
    double smoothness_constant  = 0.0; ///< M_j
    std::vector<double> coefficients;  ///< C_1..C_m

    int half_width() const { return points / 2; }
};

/// Builds the stencil for order j and radius a. Throws InputError for j < 1
/// or a <= 0 and NumericError if the coefficient solve is unusable.
StencilSpec make_stencil(int order, double radius, double smoothness_constant = 0.0);

/// Max |residual| / (1/(2a)) of the coefficient system; used by tests.
double stencil_residual(const StencilSpec &spec);

/// Stencil estimate of the i-th partial derivative. Costs exactly p queries.
double estimate_coordinate_gradient(const BlackBoxOracle &f, const Vector &x, Index i,
                                    const StencilSpec &spec);

/// All d partials; costs p*d queries.
Vector estimate_full_gradient(const BlackBoxOracle &f, const Vector &x, const StencilSpec &spec);

/// Per-coordinate truncation bound of the stencil,
/// 2 * sum_q |C_q| M_j (q a)^(j+1) / (j+1)!.
double error_bound(const StencilSpec &spec);

struct ErrorBudget {
    Vector per_coordinate; ///< E_i
    double aggregate = 0;  ///< E = ||(E_i)||
};

ErrorBudget error_budget(const StencilSpec &spec, Index dim);

enum class RadiusMode { fixed, automatic };

/// Inputs of the radius search. `coordinate_diameters` may be empty, in which
/// case every D_i is taken equal to `diameter`.
struct RadiusRequest {
    double epsilon  = 0;
    double mu       = 0;
    double L        = 0;
    double diameter = 0;
    Vector coordinate_diameters;
    Index dim                  = 0;
    int order                  = 1;
    double smoothness_constant = 0;
    RadiusMode mode            = RadiusMode::fixed;
    double fixed_radius        = 1e-6;
};

/// Largest a in {1, 1/2, 1/4, ...} meeting both accuracy conditions of the
/// accelerated coordinate solver:
///
///     2L sqrt(2 E D / mu) + E <= eps/4,   E D + sum_i E_i D_i <= eps_bar/2,
///
/// with eps_bar = mu eps^2 / (512 L^2). In fixed mode returns `fixed_radius`.
/// Throws InfeasibleTolerance when the grid reaches the floor.
double select_radius(const RadiusRequest &request);

enum class Direction { gaussian, unit_sphere };

/// (phi(d)/a) (f(x + a u) - f(x)) u with phi = 1 (gaussian) or d (sphere).
Vector random_two_point(const BlackBoxOracle &f, const Vector &x, double radius, Direction dir,
                        Rng &rng);

/// Mini-batch version with b directions and a single f(x); costs b + 1 queries.
Vector random_multi_point(const BlackBoxOracle &f, const Vector &x, double radius, int batch,
                          Direction dir, Rng &rng);

} // namespace zoalm
