#include <doctest.h>
#include <zoalm/problems.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

using namespace zoalm;

namespace {

// Central differences against the hidden gradient, within the stencil bound.
double verifier_gap(const BlackBoxOracle &f, const Vector &x) {
    const Vector est = estimate_full_gradient(f, x, make_stencil(2, 1e-5));
    return (est - f.true_gradient(x)).lpNorm<Eigen::Infinity>();
}

} // namespace

TEST_CASE("LCQP construction") {
    const auto inst = gen_lcqp(30, 5, 1.0, 7);
    const auto &d   = inst.data;
    const Matrix &Q = d.matrix("Q");
    const Eigen::SelfAdjointEigenSolver<Matrix> es(Q);
    CHECK(es.eigenvalues().minCoeff() == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(es.eigenvalues().maxCoeff() == doctest::Approx(10.0).epsilon(1e-10));
    const Vector xf = d.matrix("x_feas");
    CHECK((d.matrix("A") * xf - d.matrix("b")).norm() < 1e-12);
    CHECK(xf.cwiseAbs().maxCoeff() < 5.0);
    CHECK(inst.problem.num_constraints() == 5);
    CHECK(inst.problem.constraint_values(xf).norm() < 1e-12);
    CHECK(inst.problem.constants.rho_c() == 0.0);
    CHECK(inst.problem.constants.rho0 == 1.0);
    CHECK(inst.problem.constants.L0 == doctest::Approx(10.0));
    CHECK(verifier_gap(inst.problem.g, inst.x0) < 1e-8);
}

TEST_CASE("generators are deterministic per seed") {
    const auto a = gen_lcqp(10, 3, 1.0, 5), b = gen_lcqp(10, 3, 1.0, 5), c = gen_lcqp(10, 3, 1.0, 6);
    CHECK(a.data.matrix("Q") == b.data.matrix("Q"));
    CHECK(a.data.matrix("A") == b.data.matrix("A"));
    CHECK(a.data.matrix("Q") != c.data.matrix("Q"));
    CHECK(gen_sensor(5, 0.5, 2).data.matrix("H") == gen_sensor(5, 0.5, 2).data.matrix("H"));
}

TEST_CASE("USCQP optimum") {
    const auto inst = gen_uscqp(40, 1.0, 3);
    REQUIRE(inst.x_star.has_value());
    const Vector &xs = *inst.x_star;
    CHECK((inst.data.matrix("Q") * xs + Vector(inst.data.matrix("c"))).norm() <= 1e-10);
    CHECK(inst.problem.g.true_gradient(xs).norm() <= 1e-10);
    VerificationScope scope(inst.problem.ledger());
    CHECK(inst.problem.g.eval(xs) == doctest::Approx(inst.f_star).epsilon(1e-12));
    CHECK(inst.mu == 1.0);
}

TEST_CASE("logistic loss at the origin") {
    const auto inst = gen_logistic(50, 8, 1.0, 4);
    CHECK(inst.dim() == 9);
    CHECK(inst.problem.g.eval(Vector::Zero(9)) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    Rng rng = make_rng(9);
    std::normal_distribution<double> gauss;
    Vector x(9);
    for (Index i = 0; i < 9; ++i)
        x(i) = 0.1 * gauss(rng);
    CHECK(verifier_gap(inst.problem.g, x) < 1e-6);
}

TEST_CASE("logistic CSV loading") {
    std::istringstream good("1,0.5,2\n-1,1,-1\n1,0,0\n");
    const auto inst = load_logistic(good, 1.0, 3, 1);
    CHECK(inst.dim() == 3);
    CHECK(inst.problem.g.eval(Vector::Zero(3)) == doctest::Approx(std::log(2.0)));

    std::istringstream bad_number("1,0.5,2\n-1,abc,-1\n");
    try {
        load_logistic(bad_number, 1.0, 2, 1);
        FAIL("expected a parse error");
    } catch (const ConfigError &e) {
        CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }
    std::istringstream bad_label("1,0.5,2\n0,1,-1\n");
    CHECK_THROWS_AS(load_logistic(bad_label, 1.0, 2, 1), InputError);
    std::istringstream too_few("1,0.5,2\n");
    CHECK_THROWS(load_logistic(too_few, 1.0, 5, 1));
}

TEST_CASE("sensor selection instance") {
    const auto inst = gen_sensor(12, 0.5, 3);
    const auto &P   = inst.problem;
    CHECK(P.g.eval(Vector::Zero(12)) == doctest::Approx(12.0).epsilon(1e-14));
    Vector w(12);
    w << 1, 0, 1, 1, 0, 0, 1, 0, 1, 0, 0, 1;
    CHECK(P.constraint_values(w).norm() == 0.0);
    CHECK(P.h.in_domain(w));
    CHECK(!P.h.in_domain(Vector::Constant(12, 1.5)));
    CHECK(verifier_gap(P.g, Vector::Constant(12, 0.3)) < 1e-8);
    for (const auto &c : P.c)
        CHECK(verifier_gap(c, Vector::Constant(12, 0.3)) < 1e-8);
}

TEST_CASE("instance files round trip") {
    for (const auto &inst : {gen_lcqp(8, 2, 1.0, 1), gen_sensor(6, 0.5, 1), gen_logistic(20, 4, 1.0, 1)}) {
        std::stringstream ss;
        write_instance(ss, inst.data);
        const auto back = build_instance(read_instance(ss));
        CHECK(back.name == inst.name);
        CHECK(back.x0 == inst.x0);
        const Vector x = inst.x0 + Vector::Constant(inst.dim(), 0.01);
        CHECK(back.problem.g.eval(x) == inst.problem.g.eval(x));
        CHECK(back.problem.constants.L0 == inst.problem.constants.L0);
    }
    std::istringstream junk("{\"kind\": 3}");
    CHECK_THROWS_AS(read_instance(junk), ConfigError);
}

TEST_CASE("make_problem dispatch") {
    const auto a = make_problem("uscqp", {{"n", 10}, {"mu", 2}}, 1);
    CHECK(a.dim() == 10);
    CHECK(a.mu == 2.0);
    CHECK_THROWS_AS(make_problem("knapsack", {}, 1), ConfigError);
    CHECK_THROWS_AS(gen_sensor(1, 0.5, 1), InputError);
}
