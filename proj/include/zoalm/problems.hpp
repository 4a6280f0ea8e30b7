#pragma once

#include <zoalm/ialm.hpp>

#include <iosfwd>
#include <map>
#include <optional>
#include <string>

namespace zoalm {

/// Raw, serializable description of an instance. Everything needed to rebuild
/// the oracles lives here, so export/import round-trips bit-exactly.
struct InstanceData {
    std::string kind; ///< lcqp | uscqp | wcqp | logistic | sensor
    std::uint64_t seed = 0;
    std::map<std::string, double> scalars;
    std::map<std::string, Matrix> matrices; ///< vectors stored as n x 1

    double scalar(const std::string &key) const;
    const Matrix &matrix(const std::string &key) const;
};

/// A problem with oracles, analytic constants, a start point and, when known,
/// the optimum. Unconstrained composite problems have an empty constraint list.
struct ProblemInstance {
    std::string name;
    InstanceData data;
    ConstrainedProblem problem;
    Vector x0;
    double mu = 0; ///< strong convexity of g (0 when not strongly convex)
    std::optional<Vector> x_star;
    double f_star = std::numeric_limits<double>::quiet_NaN();

    const BlackBoxOracle &objective() const { return problem.g; }
    Index dim() const { return problem.dim(); }
};

/// Nonconvex linearly constrained QP: 1/2 x'Qx + c'x s.t. Ax = b, x in [-5, 5]^n.
/// Spectrum of Q is uniform on [-rho, L] with both ends attained.
ProblemInstance gen_lcqp(Index n, Index m, double rho, std::uint64_t seed, double L = 10.0);

/// Strongly convex QP 1/2 x'Qx + c'x with spectrum uniform on [mu, L].
ProblemInstance gen_uscqp(Index n, double mu, std::uint64_t seed, double L = 14.0);

/// Weakly convex QP over a box: spectrum uniform on [-rho, L], h = box.
ProblemInstance gen_wcqp(Index n, double rho, std::uint64_t seed, double L = 10.0,
                         double box = 1.0);

/// Regularized logistic regression over (w, b); labels +/-1 in column 0.
/// Samples N rows without replacement using `seed`.
ProblemInstance load_logistic(const std::string &csv_path, double lambda, Index N,
                              std::uint64_t seed, bool has_header = false);
/// Parses the same CSV layout from a stream. `source` names it in errors.
ProblemInstance load_logistic(std::istream &csv, double lambda, Index N, std::uint64_t seed,
                              bool has_header = false, const std::string &source = "<stream>");
/// Synthetic fallback: Gaussian features times `scale`, labels from a planted
/// hyperplane with a fraction `flip` of labels inverted.
ProblemInstance gen_logistic(Index N, Index features, double lambda, std::uint64_t seed,
                             double scale = 9.0, double flip = 0.05);

/// Sensor selection: tr((I + H'(ww' o R^-1)H)^-1) + lambda 1'w with
/// c_i(w) = w_i^2 - w_i and h = box [0, 1]^d.
ProblemInstance gen_sensor(Index d, double lambda, std::uint64_t seed);

/// Rebuilds oracles and constants from raw data. The returned instance owns a
/// fresh ledger.
ProblemInstance build_instance(const InstanceData &data);

/// Generates by name from string parameters (n, m, rho, mu, L, lambda, N, ...).
ProblemInstance make_problem(const std::string &kind, const std::map<std::string, double> &params,
                             std::uint64_t seed, const std::string &dataset_path = {});

void write_instance(std::ostream &os, const InstanceData &data);
InstanceData read_instance(std::istream &is);

} // namespace zoalm
