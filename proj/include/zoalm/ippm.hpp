#pragma once

#include <zoalm/apcu.hpp>

#include <vector>

namespace zoalm {

/// Parameters of the inexact proximal point wrapper.
struct IppmConfig {
    double rho     = 1.0;  ///< weak convexity of phi
    double L_phi   = 1.0;  ///< smoothness of phi
    double epsilon = 1e-3; ///< stationarity target for phi + psi
    std::uint64_t max_outer   = 10000;
    std::uint64_t max_queries = 0; ///< 0 = unlimited
    /// Evaluate Phi = phi + psi at every proximal center (verification queries)
    /// and record the approximate-descent inequality.
    bool check_descent = false;
    /// Template for the strongly convex inner solves. mu, L, epsilon and
    /// max_queries are overwritten per call.
    ApcuConfig inner;
};

/// Per outer step record; Phi values are NaN unless check_descent is set.
struct IppmStep {
    Vector center;
    double phi_before = std::numeric_limits<double>::quiet_NaN();
    double phi_after  = std::numeric_limits<double>::quiet_NaN();
    double step_norm  = 0;
    SolveStatus inner_status = SolveStatus::converged;

    /// Phi(x+) + rho ||x+ - x||^2 <= Phi(x) + (eps/4)^2 / (2 rho), with a
    /// relative roundoff allowance.
    bool descent_holds(double rho, double epsilon) const;
};

struct IppmResult : SolveResult {
    std::vector<IppmStep> steps;
};

/// G_t(x) = phi(x) + rho ||x - center||^2. One phi query per G_t query; the
/// verifier, when phi has one, adds the analytic shift gradient.
BlackBoxOracle proximal_shift(const BlackBoxOracle &phi, const Vector &center, double rho);

/// Finds an eps-stationary point of phi + psi for rho-weakly convex,
/// L_phi-smooth black-box phi. Each outer step warm-starts zo_apcu on G_t + psi
/// (mu = rho, L = L_phi + 2 rho, tolerance eps/4) from the current center and
/// stops once 2 rho ||x^{t+1} - x^t|| <= eps/2.
IppmResult zo_ippm(const BlackBoxOracle &phi, const SeparableTerm &psi, const Vector &x0,
                   const IppmConfig &config, Rng &rng, const SolverHooks &hooks = {});

} // namespace zoalm
