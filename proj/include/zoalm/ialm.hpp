#pragma once

#include <zoalm/ippm.hpp>

#include <functional>
#include <vector>

namespace zoalm {

/// Analytic curvature data of g and the constraints c_i.
struct ProblemConstants {
    double rho0 = 0; ///< weak convexity of g
    double L0   = 0; ///< smoothness of g
    double B0   = 0;
    std::vector<double> rho; ///< per constraint
    std::vector<double> L;
    std::vector<double> B;   ///< bound on ||grad c_i|| over dom(h)

    /// sqrt(sum L_i^2)
    double L_bar() const;
    /// sqrt(sum B_i^2)
    double B_c_bar() const;
    /// sum B_i rho_i
    double rho_c() const;
    /// sum B_i L_i + B_i^2
    double L_c() const;
};

/// min g(x) + h(x) s.t. c_i(x) = 0, with g and c_i black boxes sharing one ledger.
struct ConstrainedProblem {
    BlackBoxOracle g;
    SeparableTerm h;
    std::vector<BlackBoxOracle> c;
    ProblemConstants constants;

    Index dim() const { return g.dim(); }
    Index num_constraints() const { return static_cast<Index>(c.size()); }
    QueryLedger &ledger() const { return g.ledger(); }

    /// Throws InputError when dimensions, ledgers or constant lists disagree.
    void validate() const;
    /// c(x); costs l queries.
    Vector constraint_values(const Vector &x) const;
    /// g(x) + h(x); costs one query.
    double objective(const Vector &x) const;
};

/// phi(x) = g(x) + y'c(x) + (beta/2)||c(x)||^2 as a derived oracle costing 1 + l
/// queries per evaluation.
BlackBoxOracle al_smooth_part(const ConstrainedProblem &problem, const Vector &y, double beta);

struct SubproblemConstants {
    double rho_hat = 0;
    double L_hat   = 0;
};

/// rho_hat = rho0 + L_bar ||y|| + beta rho_c,  L_hat = L0 + L_bar ||y|| + beta L_c.
SubproblemConstants subproblem_constants(const ProblemConstants &k, const Vector &y, double beta);

/// y + M (k+1)^q c / ||c||, or y when ||c|| <= 1e-14.
Vector dual_step(const Vector &y, const Vector &c_val, std::uint64_t k, double M, double q);

struct KktResiduals {
    double pres = 0;
    double dres = 0;
};

/// Estimated residuals: pres = ||c(x)||, dres = dist(0, grad g + J_c' y + dh(x))
/// with stencil gradients. All queries are charged as verification.
KktResiduals kkt_residuals(const ConstrainedProblem &problem, const Vector &x, const Vector &y,
                           const StencilSpec &stencil);

/// Same residuals from the hidden exact gradients (verification only).
KktResiduals kkt_residuals_exact(const ConstrainedProblem &problem, const Vector &x, const Vector &y);

/// What the outer loop hands to a subproblem solver: minimize phi + h from x0
/// for a rho_hat-weakly convex, L_hat-smooth phi to tolerance epsilon, spending
/// at most max_queries (0 = unlimited).
struct SubproblemRequest {
    const BlackBoxOracle &phi;
    const SeparableTerm &h;
    const Vector &x0;
    double rho_hat;
    double L_hat;
    double epsilon;
    std::uint64_t max_queries;
};

using SubproblemSolver =
    std::function<SolveResult(const SubproblemRequest &, Rng &, const SolverHooks &)>;

/// Default subproblem solver: zo_ippm with `base` as template (rho, L_phi,
/// epsilon and max_queries come from the request).
SubproblemSolver ippm_subsolver(IppmConfig base = {});

struct IalmConfig {
    double beta0   = 0.01;
    double sigma   = 3.0;
    double dual_M  = 1.0;
    double dual_q  = 0.0;
    double epsilon = 1e-3;
    std::uint64_t max_outer   = 100;
    std::uint64_t max_queries = 0; ///< whole-run cap; 0 = unlimited
    /// Per-subproblem cap (0 = none). Needed for baseline subsolvers that
    /// lack a reliable stopping rule.
    std::uint64_t subproblem_max_queries = 0;
    /// When both are finite, L_hat_k = base + slope * beta_k replaces the
    /// analytic value.
    double L_hat_base  = std::numeric_limits<double>::quiet_NaN();
    double L_hat_slope = std::numeric_limits<double>::quiet_NaN();
    /// Quadratic penalty only: y stays 0.
    bool penalty_only = false;
    /// Stencil used for the KKT estimate.
    StencilSpec kkt_stencil = make_stencil(1, 1e-6);
};

struct IalmOuterRecord {
    std::uint64_t k = 0;
    double beta     = 0;
    double rho_hat  = 0;
    double L_hat    = 0;
    double pres     = 0;
    double dres     = 0;
    double objective = 0;
    double dual_norm = 0; ///< ||y^{k+1}|| after the dual step
    std::uint64_t solver_queries = 0;
    SolveStatus subproblem_status = SolveStatus::converged;
};

struct IalmResult {
    Vector x;
    Vector y;        ///< last multiplier iterate
    Vector y_report; ///< y^k + beta_k c(x^{k+1}), the KKT witness
    SolveStatus status = SolveStatus::iteration_limit;
    std::uint64_t outer_iterations = 0;
    double pres = std::numeric_limits<double>::infinity();
    double dres = std::numeric_limits<double>::infinity();
    std::uint64_t solver_queries = 0;
    /// Augmented Lagrangian evaluations spent by subproblem solvers.
    std::uint64_t al_evaluations = 0;
    std::vector<IalmOuterRecord> history;

    bool certified() const { return status == SolveStatus::converged; }
};

/// Beta_k = beta0 sigma^k.
double penalty_at(const IalmConfig &cfg, std::uint64_t k);

/// Inexact augmented Lagrangian loop. Outer step k solves the AL subproblem
/// from x^k with the subproblem solver, evaluates c(x^{k+1}) (l solver
/// queries), certifies with kkt_residuals on the verification budget and
/// then takes the normalized dual step.
IalmResult zo_ialm(const ConstrainedProblem &problem, const Vector &x0, const IalmConfig &config,
                   const SubproblemSolver &subsolver, Rng &rng, const SolverHooks &hooks = {});

} // namespace zoalm
