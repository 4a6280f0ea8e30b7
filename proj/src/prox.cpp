#include <zoalm/prox.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace zoalm {

namespace {

constexpr double kDomainTolerance = 1e-12;
constexpr double kInf             = std::numeric_limits<double>::infinity();

void validate(const CoordinateTerm &t, std::size_t i) {
    if (t.lower > t.upper)
        throw InputError("empty box at coordinate " + std::to_string(i));
    if (!(t.l1 >= 0) || !(t.l2 >= 0))
        throw InputError("negative weight at coordinate " + std::to_string(i));
}

} // namespace

SeparableTerm::SeparableTerm(std::vector<CoordinateTerm> terms) : terms_(std::move(terms)) {
    for (std::size_t i = 0; i < terms_.size(); ++i)
        validate(terms_[i], i);
}

SeparableTerm SeparableTerm::zero(Index dim) {
    return SeparableTerm(std::vector<CoordinateTerm>(static_cast<std::size_t>(dim)));
}

SeparableTerm SeparableTerm::box(Index dim, double lower, double upper) {
    CoordinateTerm t;
    t.lower = lower;
    t.upper = upper;
    return SeparableTerm(std::vector<CoordinateTerm>(static_cast<std::size_t>(dim), t));
}

SeparableTerm SeparableTerm::absolute(Index dim, double weight) {
    CoordinateTerm t;
    t.l1 = weight;
    return SeparableTerm(std::vector<CoordinateTerm>(static_cast<std::size_t>(dim), t));
}

SeparableTerm SeparableTerm::quadratic(Index dim, double weight) {
    CoordinateTerm t;
    t.l2 = weight;
    return SeparableTerm(std::vector<CoordinateTerm>(static_cast<std::size_t>(dim), t));
}

SeparableTerm SeparableTerm::operator+(const SeparableTerm &other) const {
    if (dim() != other.dim())
        throw InputError("cannot add separable terms of different dimension");
    std::vector<CoordinateTerm> sum(terms_.size());
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        sum[i].lower = std::max(terms_[i].lower, other.terms_[i].lower);
        sum[i].upper = std::min(terms_[i].upper, other.terms_[i].upper);
        sum[i].l1    = terms_[i].l1 + other.terms_[i].l1;
        sum[i].l2    = terms_[i].l2 + other.terms_[i].l2;
    }
    return SeparableTerm(std::move(sum));
}

bool SeparableTerm::in_domain(const Vector &x) const {
    if (x.size() != dim())
        return false;
    for (Index i = 0; i < dim(); ++i) {
        const auto &t = coordinate(i);
        if (x(i) < t.lower - kDomainTolerance || x(i) > t.upper + kDomainTolerance)
            return false;
    }
    return true;
}

double SeparableTerm::value(const Vector &x) const {
    if (x.size() != dim())
        throw InputError("dimension mismatch in separable term value");
    if (!in_domain(x))
        return kInf;
    double v = 0;
    for (Index i = 0; i < dim(); ++i) {
        const auto &t = coordinate(i);
        v += t.l1 * std::abs(x(i)) + 0.5 * t.l2 * x(i) * x(i);
    }
    return v;
}

double SeparableTerm::prox_coordinate(Index i, double v, double w) const {
    if (!(w > 0))
        throw InputError("prox weight must be positive");
    const auto &t = coordinate(i);
    validate(t, static_cast<std::size_t>(i));
    // Minimize (w + l2)/2 t^2 - w v t + l1 |t|, then clip: a 1-D convex
    // function restricted to an interval is minimized at the clipped point.
    const double s    = w * v;
    const double mag  = std::max(std::abs(s) - t.l1, 0.0);
    const double free = mag == 0.0 ? 0.0 : std::copysign(mag, s) / (w + t.l2);
    return std::clamp(free, t.lower, t.upper);
}

Vector SeparableTerm::prox(const Vector &v, double w) const {
    if (v.size() != dim())
        throw InputError("dimension mismatch in prox");
    Vector out(v.size());
    for (Index i = 0; i < dim(); ++i)
        out(i) = prox_coordinate(i, v(i), w);
    return out;
}

double SeparableTerm::subdiff_distance(const Vector &x, const Vector &g) const {
    if (x.size() != dim() || g.size() != dim())
        throw InputError("dimension mismatch in subdiff_distance");
    if (!in_domain(x))
        throw InputError("subdifferential distance requested outside dom(H)");
    double sq = 0;
    for (Index i = 0; i < dim(); ++i) {
        const auto &t   = coordinate(i);
        const double xi = std::clamp(x(i), t.lower, t.upper);
        double lo       = t.l2 * xi;
        double hi       = lo;
        if (t.l1 > 0) {
            if (xi > 0) {
                lo += t.l1;
                hi += t.l1;
            } else if (xi < 0) {
                lo -= t.l1;
                hi -= t.l1;
            } else {
                lo -= t.l1;
                hi += t.l1;
            }
        }
        if (xi >= t.upper)
            hi = kInf;
        if (xi <= t.lower)
            lo = -kInf;
        const double target = -g(i);
        double gap          = 0;
        if (target < lo)
            gap = lo - target;
        else if (target > hi)
            gap = target - hi;
        sq += gap * gap;
    }
    return std::sqrt(sq);
}

Vector SeparableTerm::coordinate_diameters() const {
    Vector D(dim());
    for (Index i = 0; i < dim(); ++i)
        D(i) = coordinate(i).upper - coordinate(i).lower;
    return D;
}

double SeparableTerm::diameter() const { return coordinate_diameters().norm(); }

} // namespace zoalm
