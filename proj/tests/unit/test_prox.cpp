#include <doctest.h>
#include <zoalm/prox.hpp>

#include <random>

using namespace zoalm;

namespace {

double brute_prox(const CoordinateTerm &t, double v, double w) {
    double lo = std::isfinite(t.lower) ? t.lower : v - 50.0;
    double hi = std::isfinite(t.upper) ? t.upper : v + 50.0;
    auto obj = [&](double s) { return 0.5 * w * (s - v) * (s - v) + t.l1 * std::abs(s) + 0.5 * t.l2 * s * s; };
    // coarse grid then golden refinement on a unimodal objective
    double best = lo, bestv = obj(lo);
    const int n = 20000;
    for (int k = 0; k <= n; ++k) {
        const double s = lo + (hi - lo) * k / n;
        if (obj(s) < bestv) {
            bestv = obj(s);
            best = s;
        }
    }
    double a = std::max(lo, best - (hi - lo) / n), b = std::min(hi, best + (hi - lo) / n);
    for (int it = 0; it < 200; ++it) {
        const double m1 = a + (b - a) / 3, m2 = b - (b - a) / 3;
        if (obj(m1) < obj(m2))
            b = m2;
        else
            a = m1;
    }
    return 0.5 * (a + b);
}

} // namespace

TEST_CASE("closed-form coordinate prox") {
    CHECK(SeparableTerm::zero(1).prox_coordinate(0, 3.0, 5.0) == 3.0);
    CHECK(SeparableTerm::box(1, -5, 5).prox_coordinate(0, 7.0, 1.0) == 5.0);
    CHECK(SeparableTerm::box(1, -5, 5).prox_coordinate(0, -7.0, 1.0) == -5.0);
    CHECK(SeparableTerm::absolute(1, 1.0).prox_coordinate(0, 0.4, 1.0) == 0.0);
    CHECK(SeparableTerm::absolute(1, 1.0).prox_coordinate(0, 1.5, 2.0) == doctest::Approx(1.0));
    CHECK(SeparableTerm::quadratic(1, 3.0).prox_coordinate(0, 2.0, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("full prox") {
    Vector v(3);
    v << 1.0, -9.0, 0.2;
    CHECK(SeparableTerm::zero(3).prox(v, 2.0) == v);
    Vector inside(3);
    inside << 1.0, -2.0, 0.2;
    CHECK(SeparableTerm::box(3, -5, 5).prox(inside, 2.0) == inside);

    std::vector<CoordinateTerm> mixed(3);
    mixed[0] = {-1.0, 1.0, 0.0, 0.0};
    mixed[1].l1 = 0.5;
    mixed[2].l2 = 2.0;
    SeparableTerm H(mixed);
    const Vector p = H.prox(v, 1.5);
    for (Index i = 0; i < 3; ++i)
        CHECK(p(i) == doctest::Approx(brute_prox(mixed[static_cast<size_t>(i)], v(i), 1.5)).epsilon(1e-6));
}

TEST_CASE("construction validation") {
    CHECK_THROWS_AS(SeparableTerm::box(2, 1.0, -1.0), InputError);
    CHECK_THROWS_AS(SeparableTerm::absolute(2, -1.0), InputError);
    CHECK_THROWS_AS(SeparableTerm::quadratic(2, -0.5), InputError);
    CHECK_THROWS_AS(SeparableTerm::box(2, 0, 1) + SeparableTerm::box(2, 2, 3), InputError);
}

TEST_CASE("sums intersect boxes and add weights") {
    auto H = SeparableTerm::box(2, -1, 3) + SeparableTerm::box(2, 0, 5) + SeparableTerm::absolute(2, 0.3);
    CHECK(H.coordinate(0).lower == 0.0);
    CHECK(H.coordinate(0).upper == 3.0);
    CHECK(H.coordinate(1).l1 == 0.3);
    Vector x(2);
    x << 1.0, 2.0;
    CHECK(H.value(x) == doctest::Approx(0.9));
    x(0) = -0.5;
    CHECK(std::isinf(H.value(x)));
    CHECK_FALSE(H.in_domain(x));
}

TEST_CASE("subdifferential distance") {
    Vector g(2);
    g << 3.0, 4.0;
    CHECK(SeparableTerm::zero(2).subdiff_distance(Vector::Zero(2), g) == doctest::Approx(5.0));
    CHECK(SeparableTerm::box(2, -1, 1).subdiff_distance(Vector::Zero(2), Vector::Zero(2)) == 0.0);
    Vector at_upper(1), gi(1);
    at_upper << 5.0;
    gi << -2.0;
    CHECK(SeparableTerm::box(1, -5, 5).subdiff_distance(at_upper, gi) == 0.0);
    gi << 2.0;
    CHECK(SeparableTerm::box(1, -5, 5).subdiff_distance(at_upper, gi) == doctest::Approx(2.0));
    Vector zero1 = Vector::Zero(1);
    gi << 0.7;
    CHECK(SeparableTerm::absolute(1, 1.0).subdiff_distance(zero1, gi) == 0.0);
    gi << 1.5;
    CHECK(SeparableTerm::absolute(1, 1.0).subdiff_distance(zero1, gi) == doctest::Approx(0.5));
    Vector outside(1);
    outside << 6.0;
    CHECK_THROWS_AS(SeparableTerm::box(1, -5, 5).subdiff_distance(outside, gi), InputError);
}

TEST_CASE("prox optimality and nonexpansiveness") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    std::vector<CoordinateTerm> terms(6);
    terms[0] = {-1.0, 2.0, 0.0, 0.0};
    terms[1].l1 = 0.7;
    terms[2].l2 = 1.3;
    terms[3] = {-0.5, 0.5, 0.4, 0.0};
    terms[4] = {0.0, 3.0, 0.2, 0.8};
    SeparableTerm H(terms);
    for (int k = 0; k < 200; ++k) {
        Vector v1(6), v2(6);
        for (Index i = 0; i < 6; ++i) {
            v1(i) = u(rng);
            v2(i) = u(rng);
        }
        const double w = 0.1 + std::abs(u(rng));
        const Vector p1 = H.prox(v1, w), p2 = H.prox(v2, w);
        CHECK(H.in_domain(p1));
        CHECK(H.subdiff_distance(p1, Vector(w * (p1 - v1))) <= 1e-10);
        CHECK((p1 - p2).norm() <= (v1 - v2).norm() + 1e-12);
    }
}

TEST_CASE("diameters") {
    CHECK(SeparableTerm::box(4, -5, 5).diameter() == doctest::Approx(20.0));
    CHECK(SeparableTerm::box(4, -5, 5).coordinate_diameters()(2) == 10.0);
    CHECK(std::isinf(SeparableTerm::zero(3).diameter()));
}
