#include <doctest.h>
#include <zoalm/oracle.hpp>

using namespace zoalm;

namespace {
BlackBoxOracle squared_norm() {
    return BlackBoxOracle::primitive(
        2, [](const Vector &x) { return x.squaredNorm(); },
        [](const Vector &x) { return Vector(2.0 * x); });
}
} // namespace

TEST_CASE("eval counts one query per call") {
    auto f = squared_norm();
    CHECK(f.eval(Vector::Zero(2)) == 0.0);
    CHECK(f.count() == 1);
    CHECK(f.eval((Vector(2) << 1, 2).finished()) == 5.0);
    CHECK(f.count() == 2);
    CHECK(f.ledger().solver_queries == 2);
    CHECK(f.ledger().verification_queries == 0);
}

TEST_CASE("eval rejects bad input and bad output") {
    auto f = squared_norm();
    CHECK_THROWS_AS(f.eval(Vector::Zero(3)), InputError);
    Vector nan_point(2);
    nan_point << 1, std::nan("");
    CHECK_THROWS_AS(f.eval(nan_point), InputError);
    auto g = BlackBoxOracle::primitive(1, [](const Vector &) { return std::nan(""); });
    CHECK_THROWS_AS(g.eval(Vector::Zero(1)), NumericError);
}

TEST_CASE("eval is deterministic") {
    auto f = squared_norm();
    Vector x(2);
    x << 0.3, -1.7;
    CHECK(f.eval(x) == f.eval(x));
}

TEST_CASE("true_gradient uses the verification bucket") {
    auto f = squared_norm();
    Vector g = f.true_gradient((Vector(2) << 1, 2).finished());
    CHECK(g(0) == 2.0);
    CHECK(g(1) == 4.0);
    CHECK(f.ledger().solver_queries == 0);
    CHECK(f.ledger().verification_queries == 1);

    auto c = BlackBoxOracle::primitive(3, [](const Vector &) { return 7.0; },
                                       [](const Vector &) { return Vector(Vector::Zero(3)); });
    CHECK(c.true_gradient(Vector::Ones(3)).norm() == 0.0);

    auto blind = BlackBoxOracle::primitive(2, [](const Vector &x) { return x.sum(); });
    CHECK_THROWS_AS(blind.true_gradient(Vector::Zero(2)), UnsupportedOperation);
}

TEST_CASE("verification scope reroutes charges") {
    auto f = squared_norm();
    {
        VerificationScope scope(f.ledger());
        f.eval(Vector::Zero(2));
        f.eval(Vector::Zero(2));
    }
    f.eval(Vector::Zero(2));
    CHECK(f.ledger().verification_queries == 2);
    CHECK(f.ledger().solver_queries == 1);
    CHECK(f.ledger().total() == 3);
}

TEST_CASE("derived oracle charges nothing itself") {
    auto base    = squared_norm();
    auto derived = BlackBoxOracle::derived(
        2, [base](const Vector &x) { return base.eval(x) + base.eval(x); }, {}, base.ledger_ptr(), 2);
    derived.eval(Vector::Ones(2));
    CHECK(derived.count() == 1);
    CHECK(derived.cost_per_eval() == 2);
    CHECK(base.ledger().solver_queries == 2);
}
