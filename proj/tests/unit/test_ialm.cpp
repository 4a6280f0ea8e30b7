#include <doctest.h>
#include <zoalm/ialm.hpp>

#include <cmath>

using namespace zoalm;

namespace {

// min 1/2||x||^2 s.t. x_0 + x_1 - 1 = 0 over [-2, 2]^2; solution (1/2, 1/2), y = -1/2.
ConstrainedProblem simple_problem() {
    ConstrainedProblem p;
    p.g = BlackBoxOracle::primitive(
        2, [](const Vector &x) { return 0.5 * x.squaredNorm(); }, [](const Vector &x) { return x; });
    p.c.push_back(BlackBoxOracle::primitive(
        2, [](const Vector &x) { return x(0) + x(1) - 1.0; },
        [](const Vector &) { return Vector(Vector::Ones(2)); }, p.g.ledger_ptr()));
    p.h                = SeparableTerm::box(2, -2, 2);
    p.constants.rho0   = 0;
    p.constants.L0     = 1;
    p.constants.rho    = {0};
    p.constants.L      = {0};
    p.constants.B      = {std::sqrt(2.0)};
    return p;
}

} // namespace

TEST_CASE("augmented Lagrangian value and cost") {
    ConstrainedProblem p;
    p.g = BlackBoxOracle::primitive(1, [](const Vector &) { return 0.0; });
    p.c.push_back(BlackBoxOracle::primitive(1, [](const Vector &x) { return x(0); }, {}, p.g.ledger_ptr()));
    p.h           = SeparableTerm::zero(1);
    p.constants.rho = p.constants.L = p.constants.B = {0};
    const auto phi = al_smooth_part(p, Vector::Constant(1, 2.0), 4.0);
    CHECK(phi.cost_per_eval() == 2);
    const auto before = p.ledger().solver_queries;
    // 0 + 2*1 + 4/2 * 1
    CHECK(phi.eval(Vector::Ones(1)) == doctest::Approx(4.0));
    CHECK(p.ledger().solver_queries == before + 2);
}

TEST_CASE("subproblem constants") {
    ProblemConstants k;
    k.rho0 = 1;
    k.L0   = 5;
    k.rho  = {0.5};
    k.L    = {2};
    k.B    = {1};
    Vector y(1);
    y << 3;
    const auto s = subproblem_constants(k, y, 10);
    CHECK(s.rho_hat == doctest::Approx(12.0));
    CHECK(s.L_hat == doctest::Approx(5 + 6 + 10 * 3));
    const auto zero = subproblem_constants(k, Vector::Zero(1), 1e-300);
    CHECK(zero.rho_hat == doctest::Approx(k.rho0));
    CHECK(zero.L_hat == doctest::Approx(k.L0));

    ProblemConstants affine = k;
    affine.rho = {0};
    CHECK(subproblem_constants(affine, y, 1).rho_hat == subproblem_constants(affine, y, 1e6).rho_hat);
}

TEST_CASE("dual step is normalized") {
    Vector c(2);
    c << 3, 0;
    const Vector y = dual_step(Vector::Zero(2), c, 0, 1.0, 0.0);
    CHECK(y(0) == doctest::Approx(1.0));
    CHECK(y(1) == 0.0);
    // M (k+1)^q scaling
    CHECK(dual_step(Vector::Zero(2), c, 3, 2.0, 1.0)(0) == doctest::Approx(8.0));
    CHECK(dual_step(y, Vector::Zero(2), 0, 1.0, 0.0) == y);
}

TEST_CASE("penalty schedule") {
    IalmConfig cfg;
    cfg.beta0 = 0.01;
    cfg.sigma = 3;
    CHECK(penalty_at(cfg, 0) == doctest::Approx(0.01));
    CHECK(penalty_at(cfg, 4) == doctest::Approx(0.81));
}

TEST_CASE("problem validation") {
    auto p = simple_problem();
    CHECK_NOTHROW(p.validate());
    auto other_ledger = p;
    other_ledger.c[0] = BlackBoxOracle::primitive(2, [](const Vector &x) { return x.sum(); });
    CHECK_THROWS_AS(other_ledger.validate(), InputError);
    auto bad_constants = p;
    bad_constants.constants.B.clear();
    CHECK_THROWS_AS(bad_constants.validate(), InputError);
}

TEST_CASE("iALM certifies a small equality constrained QP") {
    auto p = simple_problem();
    IalmConfig cfg;
    cfg.epsilon     = 1e-4;
    cfg.kkt_stencil = make_stencil(1, 1e-6);
    IppmConfig ip;
    ip.inner.stencil = cfg.kkt_stencil;
    Rng rng          = make_rng(11);
    const auto r     = zo_ialm(p, Vector::Zero(2), cfg, ippm_subsolver(ip), rng);
    REQUIRE(r.certified());
    CHECK(r.pres <= cfg.epsilon);
    CHECK(r.dres <= cfg.epsilon);
    const auto exact = kkt_residuals_exact(p, r.x, r.y_report);
    CHECK(exact.pres <= cfg.epsilon);
    CHECK(exact.dres <= 2 * cfg.epsilon);
    CHECK(r.x(0) == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(r.y_report(0) == doctest::Approx(-0.5).epsilon(1e-2));

    // ||y^k|| <= sum_{t<k} M (t+1)^q
    for (const auto &h : r.history)
        CHECK(h.dual_norm <= cfg.dual_M * static_cast<double>(h.k + 1) + 1e-12);
    CHECK(r.solver_queries == p.ledger().solver_queries);
}

TEST_CASE("penalty-only mode keeps the multiplier at zero") {
    auto p = simple_problem();
    IalmConfig cfg;
    cfg.epsilon      = 1e-3;
    cfg.penalty_only = true;
    cfg.max_outer    = 4;
    Rng rng          = make_rng(2);
    const auto r     = zo_ialm(p, Vector::Zero(2), cfg, ippm_subsolver(), rng);
    CHECK(r.y.norm() == 0.0);
    for (const auto &h : r.history)
        CHECK(h.dual_norm == 0.0);
}

TEST_CASE("iALM input validation") {
    auto p = simple_problem();
    Rng rng = make_rng(1);
    IalmConfig cfg;
    cfg.sigma = 1.0;
    CHECK_THROWS_AS(zo_ialm(p, Vector::Zero(2), cfg, ippm_subsolver(), rng), InputError);
    cfg       = {};
    cfg.beta0 = 0;
    CHECK_THROWS_AS(zo_ialm(p, Vector::Zero(2), cfg, ippm_subsolver(), rng), InputError);
    cfg = {};
    CHECK_THROWS_AS(zo_ialm(p, Vector::Constant(2, 5), cfg, ippm_subsolver(), rng), InputError);
}

TEST_CASE("iALM never passes its query cap") {
    for (std::uint64_t cap : {50u, 333u, 2000u, 12345u}) {
        auto p = simple_problem();
        IalmConfig cfg;
        cfg.epsilon     = 1e-8;
        cfg.max_queries = cap;
        Rng rng         = make_rng(cap);
        const auto r    = zo_ialm(p, Vector::Zero(2), cfg, ippm_subsolver(), rng);
        CHECK(r.solver_queries <= cap);
        CHECK(p.ledger().solver_queries <= cap);
    }
}
