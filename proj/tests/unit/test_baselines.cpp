#include <doctest.h>
#include <zoalm/baselines.hpp>

using namespace zoalm;

namespace {

BlackBoxOracle diag_quadratic(const Vector &spec, const Vector &c) {
    return BlackBoxOracle::primitive(
        spec.size(),
        [spec, c](const Vector &x) { return 0.5 * x.dot(spec.cwiseProduct(x)) + c.dot(x); },
        [spec, c](const Vector &x) { return Vector(spec.cwiseProduct(x) + c); });
}

} // namespace

TEST_CASE("baseline names round trip") {
    for (auto m : {BaselineMethod::prox_sgd, BaselineMethod::adamm, BaselineMethod::ars})
        CHECK(baseline_method_from_string(to_string(m)) == m);
    CHECK_THROWS_AS(baseline_method_from_string("sgd"), ConfigError);
}

TEST_CASE("gradient source costs match ledger deltas") {
    const auto f = diag_quadratic(Vector::LinSpaced(5, 1, 3), Vector::Ones(5));
    Rng rng      = make_rng(4);
    GradientSource coord;
    coord.stencil = make_stencil(3, 1e-3);
    auto before   = f.ledger().solver_queries;
    coord.estimate(f, Vector::Zero(5), rng);
    CHECK(f.ledger().solver_queries - before == coord.cost(5));
    CHECK(coord.cost(5) == 20);

    GradientSource random;
    random.kind  = EstimatorKind::random;
    random.batch = 7;
    before       = f.ledger().solver_queries;
    random.estimate(f, Vector::Zero(5), rng);
    CHECK(f.ledger().solver_queries - before == random.cost(5));
    CHECK(random.cost(5) == 8);
}

TEST_CASE("ProxSGD converges on a box constrained quadratic") {
    Vector spec(3), c(3);
    spec << 1, 2, 4;
    c << -3, 1, 0.5;
    const auto f = diag_quadratic(spec, c);
    const auto H = SeparableTerm::box(3, -1, 1);
    BaselineConfig cfg;
    cfg.L         = 4;
    cfg.step      = 0.25;
    cfg.tolerance = 1e-6;
    Rng rng       = make_rng(1);
    const auto r  = zo_prox_sgd(f, H, Vector::Zero(3), cfg, rng);
    REQUIRE(r.converged());
    CHECK(r.x(0) == doctest::Approx(1.0));
    CHECK(r.x(1) == doctest::Approx(-0.5).epsilon(1e-4));
    CHECK(r.x(2) == doctest::Approx(-0.125).epsilon(1e-4));
    CHECK(H.subdiff_distance(r.x, f.true_gradient(r.x)) < 1e-5);
}

TEST_CASE("AdaMM decreases a smooth objective") {
    const Vector spec = Vector::LinSpaced(4, 0.5, 2.0);
    const auto f      = diag_quadratic(spec, Vector::Constant(4, -1));
    BaselineConfig cfg;
    cfg.method         = BaselineMethod::adamm;
    cfg.alpha          = 0.1;
    cfg.tolerance      = 0;
    cfg.max_iterations = 2000;
    Rng rng            = make_rng(2);
    const auto r       = zo_adamm(f, SeparableTerm::zero(4), Vector::Zero(4), cfg, rng);
    CHECK(r.status == SolveStatus::iteration_limit);
    CHECK(f.true_gradient(r.x).norm() < 0.1);
}

TEST_CASE("ARS on a strongly convex quadratic") {
    const Vector spec = Vector::LinSpaced(5, 1.0, 4.0);
    const auto f      = diag_quadratic(spec, Vector::Ones(5));
    BaselineConfig cfg;
    cfg.method    = BaselineMethod::ars;
    cfg.L         = 4;
    cfg.mu        = 1;
    cfg.tolerance = 1e-3;
    cfg.estimator.stencil = make_stencil(1, 1e-6);
    Rng rng      = make_rng(3);
    const auto r = zo_ars(f, Vector::Zero(5), cfg, rng);
    REQUIRE(r.converged());
    CHECK(f.true_gradient(r.x).norm() < 2e-3);
    CHECK(r.solver_queries == f.ledger().solver_queries);
}

TEST_CASE("ARS refuses a nonsmooth term") {
    const auto f = diag_quadratic(Vector::Ones(2), Vector::Zero(2));
    BaselineConfig cfg;
    cfg.method = BaselineMethod::ars;
    Rng rng    = make_rng(1);
    CHECK_THROWS_AS(run_baseline(f, SeparableTerm::absolute(2, 1), Vector::Zero(2), cfg, rng),
                    UnsupportedOperation);
}

TEST_CASE("baseline budget cap") {
    const auto f = diag_quadratic(Vector::Ones(10), Vector::Ones(10));
    BaselineConfig cfg;
    cfg.tolerance   = 0;
    cfg.max_queries = 1000;
    Rng rng         = make_rng(5);
    const auto r    = zo_prox_sgd(f, SeparableTerm::zero(10), Vector::Zero(10), cfg, rng);
    CHECK(r.status == SolveStatus::budget_exceeded);
    CHECK(f.ledger().solver_queries <= 1000);
}
