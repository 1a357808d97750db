#include "shabc/curves.hpp"

#include <functional>
#include <set>
#include <vector>

namespace shabc {

namespace {

// Dense integer polynomials, coef[i] * X^i, no leading zeros.
using ZPoly = std::vector<mpz_class>;
using QPoly = std::vector<mpq_class>;

void zp_trim(ZPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

void qp_trim(QPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

ZPoly zp_derivative(const ZPoly& p) {
  ZPoly d;
  for (size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * mpz_class(i));
  zp_trim(d);
  return d;
}

mpz_class zp_eval(const ZPoly& p, const mpz_class& x) {
  mpz_class acc = 0;
  for (size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
  return acc;
}

ZPoly zp_mul(const ZPoly& a, const ZPoly& b) {
  if (a.empty() || b.empty()) return {};
  ZPoly w(a.size() + b.size() - 1, mpz_class(0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) w[i + j] += a[i] * b[j];
  zp_trim(w);
  return w;
}

ZPoly zp_sub(const ZPoly& a, const ZPoly& b) {
  ZPoly w(std::max(a.size(), b.size()), mpz_class(0));
  for (size_t i = 0; i < a.size(); ++i) w[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) w[i] -= b[i];
  zp_trim(w);
  return w;
}

// Divide by the content so coefficients stay small; signs are unchanged.
void zp_primitive(ZPoly& p) {
  mpz_class g = 0;
  for (const auto& c : p) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
  if (g > 1)
    for (auto& c : p) c /= g;
}

QPoly qp_from(const ZPoly& z) {
  QPoly q;
  q.reserve(z.size());
  for (const auto& c : z) q.emplace_back(c);
  return q;
}

// Remainder of a by b over Q (deg b >= 1, b != 0).
QPoly qp_rem(QPoly a, const QPoly& b) {
  qp_trim(a);
  while (a.size() >= b.size()) {
    mpq_class f = a.back() / b.back();
    size_t shift = a.size() - b.size();
    for (size_t i = 0; i < b.size(); ++i) a[shift + i] -= f * b[i];
    a.pop_back();
    qp_trim(a);
  }
  return a;
}

// Exact quotient a / b over Q; throws if the division leaves a remainder.
QPoly qp_div_exact(QPoly a, const QPoly& b) {
  qp_trim(a);
  QPoly q(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, mpq_class(0));
  while (a.size() >= b.size()) {
    mpq_class f = a.back() / b.back();
    size_t shift = a.size() - b.size();
    q[shift] = f;
    for (size_t i = 0; i < b.size(); ++i) a[shift + i] -= f * b[i];
    a.pop_back();
    qp_trim(a);
  }
  if (!a.empty()) throw InternalError("polynomial division not exact");
  qp_trim(q);
  return q;
}

QPoly qp_gcd(QPoly a, QPoly b) {
  qp_trim(a);
  qp_trim(b);
  while (!b.empty()) {
    QPoly r = qp_rem(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

// Scale a rational polynomial to a primitive integer one (positive factor,
// so signs at every point are preserved).
ZPoly zp_from(const QPoly& q) {
  mpz_class l = 1;
  for (const auto& c : q)
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den().get_mpz_t());
  ZPoly z;
  z.reserve(q.size());
  for (const auto& c : q) {
    mpq_class s = c * l;
    z.push_back(s.get_num());
  }
  zp_trim(z);
  zp_primitive(z);
  return z;
}

// Sturm chain of the squarefree part; counts distinct real roots exactly.
struct SturmChain {
  std::vector<ZPoly> chain;

  explicit SturmChain(const ZPoly& p) {
    QPoly a = qp_from(p), da = qp_from(zp_derivative(p));
    QPoly g = qp_gcd(a, da);
    ZPoly s0 = zp_from(qp_div_exact(a, g));
    chain.push_back(s0);
    ZPoly s1 = zp_derivative(s0);
    zp_primitive(s1);
    while (!s1.empty() && chain.back().size() > 1) {
      chain.push_back(s1);
      QPoly r = qp_rem(qp_from(chain[chain.size() - 2]), qp_from(s1));
      for (auto& c : r) c = -c;
      s1 = zp_from(r);
    }
  }

  // Sign changes through the chain at x, zeros skipped.
  int variations(const mpz_class& x) const {
    int v = 0, last = 0;
    for (const auto& s : chain) {
      int sg = sgn(zp_eval(s, x));
      if (sg == 0) continue;
      if (last != 0 && sg != last) ++v;
      last = sg;
    }
    return v;
  }
};

// All integer roots of a nonzero integer polynomial, ascending.
std::vector<mpz_class> integer_roots(ZPoly p) {
  zp_trim(p);
  if (p.empty()) throw InternalError("integer_roots: zero polynomial");
  std::set<mpz_class> roots;
  size_t low = 0;
  while (low < p.size() && p[low] == 0) ++low;
  if (low > 0) {
    roots.insert(0);
    p.erase(p.begin(), p.begin() + low);
  }
  if (p.size() > 1) {
    zp_primitive(p);
    mpz_class lead = abs(p.back()), bound = 0;
    for (size_t i = 0; i + 1 < p.size(); ++i) {
      mpz_class q;
      mpz_cdiv_q(q.get_mpz_t(), mpz_class(abs(p[i])).get_mpz_t(),
                 lead.get_mpz_t());
      if (q > bound) bound = q;
    }
    bound += 2;
    SturmChain st(p);
    // Bisection keeping p nonzero at both endpoints; integer roots are only
    // ever discovered by direct evaluation at a probed midpoint.
    std::function<void(const mpz_class&, const mpz_class&)> descend =
        [&](const mpz_class& lo, const mpz_class& hi) {
          if (hi - lo <= 1) return;  // open unit interval: no integers inside
          if (st.variations(lo) == st.variations(hi)) return;
          mpz_class mid = (lo + hi) / 2;
          if (zp_eval(p, mid) != 0) {
            descend(lo, mid);
            descend(mid, hi);
            return;
          }
          roots.insert(mid);
          mpz_class left = mid - 1, right = mid + 1;
          while (left > lo && zp_eval(p, left) == 0) roots.insert(left--);
          while (right < hi && zp_eval(p, right) == 0) roots.insert(right++);
          descend(lo, left);
          descend(right, hi);
        };
    descend(-bound, bound);
  }
  return {roots.begin(), roots.end()};
}

bool is_square(const mpz_class& n, mpz_class* root = nullptr) {
  if (n < 0 || mpz_perfect_square_p(n.get_mpz_t()) == 0) return false;
  if (root) mpz_sqrt(root->get_mpz_t(), n.get_mpz_t());
  return true;
}

// Is (0, 0) on y^2 = x (x^2 + A x + B) twice a rational point?  Classical
// descent criterion: B a square d^2 and A + 2d or A - 2d a square.
bool origin_halvable(const mpz_class& A, const mpz_class& B) {
  mpz_class d;
  if (!is_square(B, &d)) return false;
  return is_square(A + 2 * d) || is_square(A - 2 * d);
}

// Given that (0, 0) is twice a rational point, is one of the order-4 points
// above it twice a rational point as well?  The preimages of x-coordinate
// xq = +-d satisfy (X^2 - B)^2 = 4 xq X (X^2 + A X + B); a rational preimage
// must be an integer root with X (X^2 + A X + B) a positive square.
bool quarter_halvable(const mpz_class& A, const mpz_class& B) {
  mpz_class d;
  if (!is_square(B, &d)) return false;
  for (int sg : {1, -1}) {
    mpz_class xq = sg * d;
    if (!is_square(A + 2 * xq)) continue;  // no rational point at this x
    ZPoly g{B * B, -4 * xq * B, -2 * B - 4 * xq * A, -4 * xq, mpz_class(1)};
    for (const auto& r : integer_roots(g)) {
      mpz_class fr = r * (r * r + A * r + B);
      if (fr > 0 && is_square(fr)) return true;
    }
  }
  return false;
}

// x^3 + A x^2 + B x as a polynomial.
ZPoly rhs_cubic(const mpz_class& A, const mpz_class& B) {
  return ZPoly{mpz_class(0), B, A, mpz_class(1)};
}

// Do any of the integer roots of `division` give a rational point (positive
// square right-hand side)?
bool has_point_among_roots(const ZPoly& division, const mpz_class& A,
                           const mpz_class& B) {
  for (const auto& r : integer_roots(division)) {
    mpz_class fr = r * (r * r + A * r + B);
    if (fr > 0 && is_square(fr)) return true;
  }
  return false;
}

}  // namespace

unsigned long torsion_order(const mpz_class& A, const mpz_class& B) {
  if (B == 0 || A * A == 4 * B)
    throw ValidationError("torsion_order: singular curve");

  // 2-torsion: x = 0 plus the roots of x^2 + A x + B when its discriminant
  // is a square (the parity of the square root matches A, so the roots are
  // integers).
  std::vector<mpz_class> two_roots{mpz_class(0)};
  {
    mpz_class sq;
    if (is_square(A * A - 4 * B, &sq)) {
      two_roots.push_back((-A + sq) / 2);
      two_roots.push_back((-A - sq) / 2);
    }
  }

  unsigned long two = 2;
  if (two_roots.size() == 1) {
    if (origin_halvable(A, B)) {
      two = 4;
      // A point of order 8 over a cyclic 4-part; order 16 cannot occur.
      if (quarter_halvable(A, B)) two = 8;
    }
  } else {
    two = 4;
    int halvable = 0;
    mpz_class ah, bh;
    for (const auto& e : two_roots) {
      // Translate e to the origin: x^2 + A x + B picks up (3e + A, 3e^2 +
      // 2Ae + B).
      mpz_class ae = 3 * e + A, be = (3 * e + 2 * A) * e + B;
      if (origin_halvable(ae, be)) {
        ++halvable;
        ah = ae;
        bh = be;
      }
    }
    // Exactly one 2-torsion point can be twice a rational point: the
    // halvable ones form a subgroup, and a full halvable 2-torsion would
    // embed two independent 4-cycles in the rational points.
    if (halvable > 1) throw InternalError("torsion_order: 4-torsion overflow");
    if (halvable == 1) {
      two = 8;
      if (quarter_halvable(ah, bh)) two = 16;
    }
  }

  // 3-torsion from the degree-4 division polynomial.
  unsigned long three = 1;
  {
    ZPoly psi3{-B * B, mpz_class(0), 6 * B, 4 * A, mpz_class(3)};
    if (has_point_among_roots(psi3, A, B)) three = 3;
  }

  // 5-torsion from the degree-12 division polynomial, assembled as
  // psi5 = (psi4 / psi2) * psi2^4 - psi3^3 with psi2^2 = 4 x (x^2 + A x + B).
  unsigned long five = 1;
  {
    ZPoly f = rhs_cubic(A, B);
    ZPoly psi3{-B * B, mpz_class(0), 6 * B, 4 * A, mpz_class(3)};
    ZPoly ratio4{-2 * B * B * B, -4 * A * B * B, -10 * B * B, mpz_class(0),
                 10 * B,         4 * A,          mpz_class(2)};
    ZPoly psi5 =
        zp_sub(zp_mul(ratio4, zp_mul(zp_mul(f, f), ZPoly{mpz_class(16)})),
               zp_mul(psi3, zp_mul(psi3, psi3)));
    if (has_point_among_roots(psi5, A, B)) five = 5;
  }

  unsigned long order = two * three * five;
  switch (order) {
    case 2:
    case 4:
    case 6:
    case 8:
    case 10:
    case 12:
    case 16:
      return order;
    default:
      throw InternalError("torsion_order: impossible group order " +
                          std::to_string(order));
  }
}

}  // namespace shabc
