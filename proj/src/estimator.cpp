#include <zoalm/estimator.hpp>

#include <Eigen/LU>

#include <cmath>
#include <string>

namespace zoalm {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return Rng(seq);
}

namespace {

Matrix odd_power_vandermonde(int m) {
    Matrix V(m, m);
    for (int r = 0; r < m; ++r)
        for (int q = 1; q <= m; ++q)
            V(r, q - 1) = std::pow(static_cast<double>(q), 2 * r + 1);
    return V;
}

double factorial(int n) {
    double f = 1;
    for (int k = 2; k <= n; ++k)
        f *= k;
    return f;
}

constexpr double kRadiusFloor = 1e-15;

} // namespace

StencilSpec make_stencil(int order, double radius, double smoothness_constant) {
    if (order < 1)
        throw InputError("stencil order j must be >= 1");
    if (!(radius > 0) || !std::isfinite(radius))
        throw InputError("stencil radius must be positive and finite");
    if (!(smoothness_constant >= 0))
        throw InputError("smoothness constant must be nonnegative");

    StencilSpec spec;
    spec.order               = order;
    spec.points              = std::max(2 * (order - 1), 2);
    spec.radius              = radius;
    spec.smoothness_constant = smoothness_constant;

    const int m = spec.points / 2;
    Vector rhs  = Vector::Zero(m);
    rhs(0)      = 1.0 / (2.0 * radius);
    const Matrix V = odd_power_vandermonde(m);
    Eigen::FullPivLU<Matrix> lu(V);
    if (!lu.isInvertible())
        throw NumericError("stencil coefficient system is singular");
    const Vector C = lu.solve(rhs);
    if (!C.allFinite())
        throw NumericError("stencil coefficients are not finite");
    spec.coefficients.assign(C.data(), C.data() + m);
    return spec;
}

double stencil_residual(const StencilSpec &spec) {
    const int m = spec.half_width();
    const Matrix V = odd_power_vandermonde(m);
    const Vector C = Eigen::Map<const Vector>(spec.coefficients.data(), m);
    Vector rhs     = Vector::Zero(m);
    rhs(0)         = 1.0 / (2.0 * spec.radius);
    return (V * C - rhs).cwiseAbs().maxCoeff() / rhs(0);
}

double estimate_coordinate_gradient(const BlackBoxOracle &f, const Vector &x, Index i,
                                    const StencilSpec &spec) {
    if (i < 0 || i >= x.size())
        throw InputError("coordinate index " + std::to_string(i) + " out of range");
    Vector probe   = x;
    const double xi = x(i);
    double acc      = 0;
    for (int q = spec.half_width(); q >= 1; --q) {
        const double step = q * spec.radius;
        probe(i)          = xi + step;
        const double fp   = f.eval(probe);
        probe(i)          = xi - step;
        const double fm   = f.eval(probe);
        acc += spec.coefficients[q - 1] * (fp - fm);
    }
    return acc;
}

Vector estimate_full_gradient(const BlackBoxOracle &f, const Vector &x, const StencilSpec &spec) {
    const Index d = x.size();
    Vector g(d);
    Vector probe = x;
    for (Index i = 0; i < d; ++i) {
        const double xi = x(i);
        double acc      = 0;
        for (int q = spec.half_width(); q >= 1; --q) {
            const double step = q * spec.radius;
            probe(i)          = xi + step;
            const double fp   = f.eval(probe);
            probe(i)          = xi - step;
            const double fm   = f.eval(probe);
            acc += spec.coefficients[q - 1] * (fp - fm);
        }
        probe(i) = xi;
        g(i)     = acc;
    }
    return g;
}

double error_bound(const StencilSpec &spec) {
    if (!std::isfinite(spec.smoothness_constant))
        throw InputError("error bound needs a finite smoothness constant");
    const int j      = spec.order;
    const double den = factorial(j + 1);
    double sum       = 0;
    for (int q = 1; q <= spec.half_width(); ++q)
        sum += std::abs(spec.coefficients[q - 1]) * std::pow(q * spec.radius, j + 1);
    // One Taylor remainder per sampled side: the +q and -q points both count.
    return 2.0 * spec.smoothness_constant * sum / den;
}

ErrorBudget error_budget(const StencilSpec &spec, Index dim) {
    ErrorBudget b;
    b.per_coordinate = Vector::Constant(dim, error_bound(spec));
    b.aggregate      = b.per_coordinate.norm();
    return b;
}

double select_radius(const RadiusRequest &req) {
    if (req.mode == RadiusMode::fixed) {
        if (!(req.fixed_radius > 0))
            throw InputError("fixed radius must be positive");
        return req.fixed_radius;
    }
    if (!(req.epsilon > 0) || !(req.mu > 0) || !(req.L > 0) || !(req.diameter > 0))
        throw InputError("radius selection needs positive epsilon, mu, L and D");
    if (req.dim <= 0)
        throw InputError("radius selection needs the dimension");
    Vector Di = req.coordinate_diameters.size() == req.dim
                    ? req.coordinate_diameters
                    : Vector::Constant(req.dim, req.diameter);
    const double eps_bar = req.mu * req.epsilon * req.epsilon / (512.0 * req.L * req.L);

    for (double a = 1.0; a >= kRadiusFloor; a *= 0.5) {
        const auto spec   = make_stencil(req.order, a, req.smoothness_constant);
        const auto budget = error_budget(spec, req.dim);
        const double E    = budget.aggregate;
        const bool first  = 2.0 * req.L * std::sqrt(2.0 * E * req.diameter / req.mu) + E <= req.epsilon / 4.0;
        const bool second = E * req.diameter + budget.per_coordinate.dot(Di) <= eps_bar / 2.0;
        if (first && second)
            return a;
    }
    throw InfeasibleTolerance("no sampling radius above " + std::to_string(kRadiusFloor) +
                              " meets the accuracy conditions; use a higher smoothness order j");
}

namespace {

Vector draw_direction(Index d, Direction dir, Rng &rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector u(d);
    for (Index k = 0; k < d; ++k)
        u(k) = normal(rng);
    if (dir == Direction::unit_sphere) {
        const double n = u.norm();
        if (n == 0)
            throw NumericError("degenerate random direction");
        u /= n;
    }
    return u;
}

double dimension_factor(Index d, Direction dir) {
    return dir == Direction::gaussian ? 1.0 : static_cast<double>(d);
}

} // namespace

Vector random_two_point(const BlackBoxOracle &f, const Vector &x, double radius, Direction dir,
                        Rng &rng) {
    return random_multi_point(f, x, radius, 1, dir, rng);
}

Vector random_multi_point(const BlackBoxOracle &f, const Vector &x, double radius, int batch,
                          Direction dir, Rng &rng) {
    if (batch < 1)
        throw InputError("batch size must be >= 1");
    if (!(radius > 0))
        throw InputError("radius must be positive");
    const Index d   = x.size();
    const double f0 = f.eval(x);
    Vector g        = Vector::Zero(d);
    for (int b = 0; b < batch; ++b) {
        const Vector u = draw_direction(d, dir, rng);
        g += (f.eval(x + radius * u) - f0) * u;
    }
    return (dimension_factor(d, dir) / (radius * batch)) * g;
}

} // namespace zoalm
