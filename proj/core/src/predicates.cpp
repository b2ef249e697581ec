#include "parabox/geometry.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <limits>

// Sign-exact predicates in the style of adaptive-precision geometry kernels:
// evaluate in double with a forward error bound on the result; when the
// computed value falls inside the error band, re-evaluate with exact rational
// arithmetic.  Doubles convert to rationals losslessly, so the fallback sign
// is the sign of the true real value (barring over/underflow in the inputs,
// which page coordinates never approach).

namespace parabox {
namespace {

using rational = boost::multiprecision::cpp_rational;

// machine epsilon halved, the unit used by the classic filter constants
constexpr double kEps = std::numeric_limits<double>::epsilon() / 2.0;
constexpr double kOrientBound = (3.0 + 16.0 * kEps) * kEps;
constexpr double kIncircleBound = (10.0 + 96.0 * kEps) * kEps;

int rational_sign(const rational& v) {
  if (v == 0) return 0;
  return v > 0 ? 1 : -1;
}

int orient2d_exact(const Point& a, const Point& b, const Point& c) {
  rational acx = rational(a.x) - rational(c.x);
  rational acy = rational(a.y) - rational(c.y);
  rational bcx = rational(b.x) - rational(c.x);
  rational bcy = rational(b.y) - rational(c.y);
  return rational_sign(acx * bcy - acy * bcx);
}

int incircle_exact(const Point& a, const Point& b, const Point& c, const Point& d) {
  rational adx = rational(a.x) - rational(d.x);
  rational ady = rational(a.y) - rational(d.y);
  rational bdx = rational(b.x) - rational(d.x);
  rational bdy = rational(b.y) - rational(d.y);
  rational cdx = rational(c.x) - rational(d.x);
  rational cdy = rational(c.y) - rational(d.y);
  rational det = (adx * adx + ady * ady) * (bdx * cdy - bdy * cdx) +
                 (bdx * bdx + bdy * bdy) * (cdx * ady - adx * cdy) +
                 (cdx * cdx + cdy * cdy) * (adx * bdy - ady * bdx);
  return rational_sign(det);
}

int diameter_dot_exact(const Point& a, const Point& b, const Point& c) {
  rational acx = rational(a.x) - rational(c.x);
  rational acy = rational(a.y) - rational(c.y);
  rational bcx = rational(b.x) - rational(c.x);
  rational bcy = rational(b.y) - rational(c.y);
  return rational_sign(acx * bcx + acy * bcy);
}

}  // namespace

int orient2d_sign(const Point& a, const Point& b, const Point& c) {
  double detleft = (a.x - c.x) * (b.y - c.y);
  double detright = (a.y - c.y) * (b.x - c.x);
  double det = detleft - detright;

  // The rounded differences and products keep the sign of their true values,
  // so opposite (or zero) term signs decide without an error bound.
  double detsum;
  if (detleft > 0.0) {
    if (detright <= 0.0) return det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
    detsum = detleft + detright;
  } else if (detleft < 0.0) {
    if (detright >= 0.0) return det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
    detsum = -detleft - detright;
  } else {
    return detright > 0.0 ? -1 : (detright < 0.0 ? 1 : 0);
  }
  double errbound = kOrientBound * detsum;
  if (det > errbound) return 1;
  if (-det > errbound) return -1;
  return orient2d_exact(a, b, c);
}

int incircle_sign(const Point& a, const Point& b, const Point& c, const Point& d) {
  int orient = orient2d_sign(a, b, c);
  if (orient == 0) return 0;  // degenerate triangle, no circumcircle

  double adx = a.x - d.x, ady = a.y - d.y;
  double bdx = b.x - d.x, bdy = b.y - d.y;
  double cdx = c.x - d.x, cdy = c.y - d.y;

  double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  double cdxady = cdx * ady, adxcdy = adx * cdy;
  double adxbdy = adx * bdy, bdxady = bdx * ady;
  double alift = adx * adx + ady * ady;
  double blift = bdx * bdx + bdy * bdy;
  double clift = cdx * cdx + cdy * cdy;

  double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) +
               clift * (adxbdy - bdxady);
  double permanent = (std::fabs(bdxcdy) + std::fabs(cdxbdy)) * alift +
                     (std::fabs(cdxady) + std::fabs(adxcdy)) * blift +
                     (std::fabs(adxbdy) + std::fabs(bdxady)) * clift;
  double errbound = kIncircleBound * permanent;
  if (det > errbound) return orient;
  if (-det > errbound) return -orient;
  return orient * incircle_exact(a, b, c, d);
}

int diameter_dot_sign(const Point& a, const Point& b, const Point& c) {
  double t1 = (a.x - c.x) * (b.x - c.x);
  double t2 = (a.y - c.y) * (b.y - c.y);
  double det = t1 + t2;

  // same-sign terms decide immediately (rounded products are sign-correct)
  if (t1 >= 0.0 && t2 >= 0.0) return (t1 == 0.0 && t2 == 0.0) ? 0 : 1;
  if (t1 <= 0.0 && t2 <= 0.0) return -1;

  double errbound = kOrientBound * (std::fabs(t1) + std::fabs(t2));
  if (det > errbound) return 1;
  if (-det > errbound) return -1;
  return diameter_dot_exact(a, b, c);
}

}  // namespace parabox
