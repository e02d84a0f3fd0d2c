#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace circfss {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Wraps a finite real to its representative in [-pi, pi).
inline double wrap_radians(double x) {
    if (!std::isfinite(x)) {
        throw std::invalid_argument("wrap_radians: non-finite input");
    }
    double y = std::remainder(x, kTwoPi);  // in [-pi, pi]
    if (y >= kPi) y -= kTwoPi;
    return y;
}

/// A point on the circle S^1 = [-pi, pi) with -pi and pi identified.
/// All constructors wrap, so the invariant -pi <= radians() < pi always holds.
class Angle {
  public:
    Angle() = default;
    explicit Angle(double radians) : value_(wrap_radians(radians)) {}

    static Angle from_degrees(double deg) { return Angle(deg * kPi / 180.0); }

    double radians() const { return value_; }
    double degrees() const { return value_ * 180.0 / kPi; }

    /// The point at maximal distance pi.
    Angle antipode() const { return Angle(value_ + kPi); }

    friend bool operator==(const Angle& a, const Angle& b) {
        return a.value_ == b.value_;
    }
    friend bool operator<(const Angle& a, const Angle& b) {
        return a.value_ < b.value_;
    }

  private:
    double value_ = 0.0;
};

inline Angle wrap_angle(double x) { return Angle(x); }

/// Arc length distance min{|a-b|, 2pi-|a-b|}, in [0, pi].
inline double circle_dist(const Angle& a, const Angle& b) {
    double d = std::fabs(a.radians() - b.radians());
    return std::min(d, kTwoPi - d);
}

/// A point on the m-torus, m >= 1, with the canonical product metric.
struct TorusPoint {
    std::vector<Angle> coords;

    TorusPoint() = default;
    explicit TorusPoint(std::vector<Angle> c) : coords(std::move(c)) {}

    std::size_t dim() const { return coords.size(); }
    const Angle& operator[](std::size_t i) const { return coords[i]; }
    Angle& operator[](std::size_t i) { return coords[i]; }
};

inline double torus_dist(const TorusPoint& p, const TorusPoint& q) {
    if (p.dim() != q.dim()) {
        throw std::invalid_argument("torus_dist: dimension mismatch");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < p.dim(); ++i) {
        double d = circle_dist(p[i], q[i]);
        s += d * d;
    }
    return std::sqrt(s);
}

/// Signed geodesic coordinate of p in the chart centered at base.
struct ChartCoord {
    double value;     // in (-pi, pi], |value| = circle_dist(base, p)
    bool antipodal;   // true when p is the antipode of base (value = +pi)
};

/// Log map: returns v with wrap(base + v) = p and |v| = d(base, p).
/// At the exact antipode returns +pi with the antipodal flag set.
inline ChartCoord log_chart(const Angle& base, const Angle& p) {
    double v = std::remainder(p.radians() - base.radians(), kTwoPi);
    if (v <= -kPi) v = kPi;
    bool antipodal = false;
    if (v == kPi || v == -kPi) {
        v = kPi;
        antipodal = true;
    }
    return {v, antipodal};
}

/// Convenience accessor for the signed arc from base to p.
inline double signed_arc(const Angle& base, const Angle& p) {
    return log_chart(base, p).value;
}

/// Exp map: inverse of log_chart for |v| < pi.
inline Angle exp_chart(const Angle& base, double v) {
    return Angle(base.radians() + v);
}

}  // namespace circfss
