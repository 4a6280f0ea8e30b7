#pragma once

#include <zoalm/oracle.hpp>

#include <cmath>
#include <limits>
#include <vector>

namespace zoalm {

/// One coordinate of a separable convex term:
///
///     H_i(t) = I_[lower, upper](t) + l1 |t| + (l2 / 2) t^2
///
/// Any of the three pieces may be absent (infinite bounds, zero weights).
struct CoordinateTerm {
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
    double l1    = 0.0;
    double l2    = 0.0;

    bool has_box() const { return std::isfinite(lower) || std::isfinite(upper); }
};

/// The white-box nonsmooth part H(x) = sum_i H_i(x_i).
class SeparableTerm {
  public:
    SeparableTerm() = default;
    explicit SeparableTerm(std::vector<CoordinateTerm> terms);

    static SeparableTerm zero(Index dim);
    static SeparableTerm box(Index dim, double lower, double upper);
    static SeparableTerm absolute(Index dim, double weight);
    static SeparableTerm quadratic(Index dim, double weight);

    /// Coordinate-wise sum. Boxes intersect, weights add.
    SeparableTerm operator+(const SeparableTerm &other) const;

    Index dim() const { return static_cast<Index>(terms_.size()); }
    const CoordinateTerm &coordinate(Index i) const { return terms_[static_cast<std::size_t>(i)]; }

    /// +inf outside the domain.
    double value(const Vector &x) const;
    bool in_domain(const Vector &x) const;

    /// argmin_t (w/2)(t - v)^2 + H_i(t).
    double prox_coordinate(Index i, double v, double w) const;
    Vector prox(const Vector &v, double w) const;

    /// dist(0, g + dH(x)). Throws InputError when x is outside dom(H).
    double subdiff_distance(const Vector &x, const Vector &g) const;

    /// Diameter of dom(H) (infinite without a full box).
    double diameter() const;
    Vector coordinate_diameters() const;

  private:
    std::vector<CoordinateTerm> terms_;
};

} // namespace zoalm
