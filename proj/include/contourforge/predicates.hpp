#pragma once
// Exact orientation and in-circle predicates.
//
// Each predicate first evaluates the determinant in plain floating point and
// accepts the sign when it clears a static forward error bound. Otherwise the
// determinant is re-evaluated exactly with floating-point expansions
// (nonoverlapping sums of doubles), so the returned sign is always correct for
// the double inputs given. Half-integer lattice coordinates are routinely
// collinear and cocircular, which is exactly where the exact stage matters.

#include <cmath>
#include <limits>
#include <vector>

namespace contourforge::predicates {

namespace detail {

using Expansion = std::vector<double>;

inline constexpr double kEpsilon = std::numeric_limits<double>::epsilon() / 2;  // 2^-53
inline constexpr double kOrientBound = (3.0 + 16.0 * kEpsilon) * kEpsilon;
inline constexpr double kInCircleBound = (10.0 + 96.0 * kEpsilon) * kEpsilon;

inline void two_sum(double a, double b, double& x, double& y) {
  x = a + b;
  const double bv = x - a;
  const double av = x - bv;
  y = (a - av) + (b - bv);
}

inline void two_diff(double a, double b, double& x, double& y) {
  x = a - b;
  const double bv = a - x;
  const double av = x + bv;
  y = (a - av) + (bv - b);
}

inline void two_product(double a, double b, double& x, double& y) {
  x = a * b;
  y = std::fma(a, b, -x);
}

inline Expansion diff(double a, double b) {
  double x, y;
  two_diff(a, b, x, y);
  Expansion e;
  if (y != 0.0) e.push_back(y);
  if (x != 0.0) e.push_back(x);
  return e;
}

// Adds b to e; components stay ordered by increasing magnitude.
inline Expansion grow(const Expansion& e, double b) {
  Expansion h;
  h.reserve(e.size() + 1);
  double q = b;
  for (double c : e) {
    double sum, err;
    two_sum(q, c, sum, err);
    if (err != 0.0) h.push_back(err);
    q = sum;
  }
  if (q != 0.0 || h.empty()) h.push_back(q);
  return h;
}

inline Expansion sum(Expansion e, const Expansion& f) {
  for (double c : f) e = grow(e, c);
  return e;
}

inline Expansion negate(Expansion e) {
  for (double& c : e) c = -c;
  return e;
}

inline Expansion scale(const Expansion& e, double b) {
  Expansion h;
  if (e.empty() || b == 0.0) return h;
  h.reserve(2 * e.size());
  double q, err;
  two_product(e[0], b, q, err);
  if (err != 0.0) h.push_back(err);
  for (std::size_t i = 1; i < e.size(); ++i) {
    double p1, p0;
    two_product(e[i], b, p1, p0);
    double s, t;
    two_sum(q, p0, s, t);
    if (t != 0.0) h.push_back(t);
    two_sum(p1, s, q, t);
    if (t != 0.0) h.push_back(t);
  }
  if (q != 0.0) h.push_back(q);
  return h;
}

inline Expansion product(const Expansion& e, const Expansion& f) {
  Expansion acc;
  for (double c : f) acc = sum(std::move(acc), scale(e, c));
  return acc;
}

inline int sign(const Expansion& e) {
  for (auto it = e.rbegin(); it != e.rend(); ++it) {
    if (*it > 0.0) return 1;
    if (*it < 0.0) return -1;
  }
  return 0;
}

inline int orient_exact(double ax, double ay, double bx, double by, double cx, double cy) {
  const Expansion acx = diff(ax, cx), acy = diff(ay, cy);
  const Expansion bcx = diff(bx, cx), bcy = diff(by, cy);
  return sign(sum(product(acx, bcy), negate(product(acy, bcx))));
}

inline int incircle_exact(double ax, double ay, double bx, double by, double cx, double cy,
                          double dx, double dy) {
  const Expansion adx = diff(ax, dx), ady = diff(ay, dy);
  const Expansion bdx = diff(bx, dx), bdy = diff(by, dy);
  const Expansion cdx = diff(cx, dx), cdy = diff(cy, dy);

  const Expansion alift = sum(product(adx, adx), product(ady, ady));
  const Expansion blift = sum(product(bdx, bdx), product(bdy, bdy));
  const Expansion clift = sum(product(cdx, cdx), product(cdy, cdy));

  const Expansion bc = sum(product(bdx, cdy), negate(product(cdx, bdy)));
  const Expansion ca = sum(product(cdx, ady), negate(product(adx, cdy)));
  const Expansion ab = sum(product(adx, bdy), negate(product(bdx, ady)));

  return sign(sum(sum(product(alift, bc), product(blift, ca)), product(clift, ab)));
}

}  // namespace detail

/// Sign of the signed area of triangle abc: +1 counterclockwise, -1 clockwise, 0 collinear.
inline int orient2d(double ax, double ay, double bx, double by, double cx, double cy) {
  const double left = (ax - cx) * (by - cy);
  const double right = (ay - cy) * (bx - cx);
  const double det = left - right;
  const double bound = detail::kOrientBound * (std::abs(left) + std::abs(right));
  if (det > bound) return 1;
  if (-det > bound) return -1;
  return detail::orient_exact(ax, ay, bx, by, cx, cy);
}

/// +1 if d lies strictly inside the circumcircle of the counterclockwise triangle abc,
/// -1 if strictly outside, 0 if cocircular. Sign flips for a clockwise abc.
inline int incircle(double ax, double ay, double bx, double by, double cx, double cy, double dx,
                    double dy) {
  const double adx = ax - dx, ady = ay - dy;
  const double bdx = bx - dx, bdy = by - dy;
  const double cdx = cx - dx, cdy = cy - dy;

  const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  const double cdxady = cdx * ady, adxcdy = adx * cdy;
  const double adxbdy = adx * bdy, bdxady = bdx * ady;
  const double alift = adx * adx + ady * ady;
  const double blift = bdx * bdx + bdy * bdy;
  const double clift = cdx * cdx + cdy * cdy;

  const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) +
                     clift * (adxbdy - bdxady);
  const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
                           (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                           (std::abs(adxbdy) + std::abs(bdxady)) * clift;
  const double bound = detail::kInCircleBound * permanent;
  if (det > bound) return 1;
  if (-det > bound) return -1;
  return detail::incircle_exact(ax, ay, bx, by, cx, cy, dx, dy);
}

}  // namespace contourforge::predicates
