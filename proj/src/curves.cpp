#include "shabc/curves.hpp"

#include <algorithm>
#include <sstream>

namespace shabc {

mpz_class Curve::b2() const { return a1 * a1 + 4 * a2; }
mpz_class Curve::b4() const { return 2 * a4 + a1 * a3; }
mpz_class Curve::b6() const { return a3 * a3 + 4 * a6; }
mpz_class Curve::b8() const {
  return a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
}
mpz_class Curve::c4() const {
  mpz_class B2 = b2();
  return B2 * B2 - 24 * b4();
}
mpz_class Curve::c6() const {
  mpz_class B2 = b2();
  return -B2 * B2 * B2 + 36 * B2 * b4() - 216 * b6();
}
mpz_class Curve::disc() const {
  mpz_class B2 = b2(), B4 = b4(), B6 = b6(), B8 = b8();
  return -B2 * B2 * B8 - 8 * B4 * B4 * B4 - 27 * B6 * B6 + 9 * B2 * B4 * B6;
}

Curve Curve::transformed(const mpz_class& r, const mpz_class& s,
                         const mpz_class& t) const {
  Curve e;
  e.a1 = a1 + 2 * s;
  e.a2 = a2 - s * a1 + 3 * r - s * s;
  e.a3 = a3 + r * a1 + 2 * t;
  e.a4 = a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t;
  e.a6 = a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1;
  return e;
}

namespace {

mpz_class divexact_checked(const mpz_class& x, const mpz_class& d) {
  mpz_class q, r;
  mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), x.get_mpz_t(), d.get_mpz_t());
  if (r != 0) throw InternalError("expected exact division");
  return q;
}

mpz_class pow_p(const mpz_class& p, unsigned e) {
  mpz_class r;
  mpz_pow_ui(r.get_mpz_t(), p.get_mpz_t(), e);
  return r;
}

// p-adic valuation; `infinite` flags x == 0.
unsigned val_p(const mpz_class& x, const mpz_class& p, bool* infinite = nullptr) {
  if (infinite) *infinite = false;
  if (x == 0) {
    if (infinite) {
      *infinite = true;
      return 0;
    }
    throw InternalError("valuation of zero");
  }
  mpz_class rest;
  return static_cast<unsigned>(
      mpz_remove(rest.get_mpz_t(), x.get_mpz_t(), p.get_mpz_t()));
}

bool div_pk(const mpz_class& x, const mpz_class& p, unsigned k) {
  if (x == 0) return true;
  bool inf;
  return val_p(x, p, &inf) >= k || inf;
}

mpz_class mod_p(const mpz_class& x, const mpz_class& p) {
  mpz_class r;
  mpz_fdiv_r(r.get_mpz_t(), x.get_mpz_t(), p.get_mpz_t());
  return r;
}

mpz_class invmod(const mpz_class& x, const mpz_class& m) {
  mpz_class r;
  if (mpz_invert(r.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t()) == 0)
    throw InternalError("not invertible");
  return r;
}

// Is A y^2 + B y + C = 0 solvable in F_p?  (Used only with A not = 0 mod p.)
bool quad_has_root(const mpz_class& A, const mpz_class& B, const mpz_class& C,
                   const mpz_class& p) {
  if (p == 2) {
    return mod_p(C, p) == 0 || mod_p(A + B + C, p) == 0;
  }
  mpz_class disc = mod_p(B * B - 4 * A * C, p);
  if (disc == 0) return true;
  return mpz_legendre(disc.get_mpz_t(), p.get_mpz_t()) == 1;
}

// Number of roots in F_p of the monic separable cubic T^3 + B T^2 + C T + D.
unsigned cubic_root_count(const mpz_class& B, const mpz_class& C,
                          const mpz_class& D, const mpz_class& p) {
  if (p < 64) {
    unsigned n = 0;
    for (mpz_class t = 0; t < p; ++t)
      if (mod_p(((t + B) * t + C) * t + D, p) == 0) ++n;
    return n;
  }
  // Separable cubics have 1 root if the discriminant is a nonresidue, else 0
  // or 3; the 0/3 split is decided by whether T^p = T mod (cubic).
  mpz_class disc =
      mod_p(18 * B * C * D - 4 * B * B * B * D + B * B * C * C - 4 * C * C * C -
                27 * D * D,
            p);
  if (disc == 0) throw InternalError("cubic_root_count: not separable");
  if (mpz_legendre(disc.get_mpz_t(), p.get_mpz_t()) == -1) return 1;
  // Polynomial arithmetic mod (T^3 + B T^2 + C T + D, p) on degree-<3 coeffs.
  using Poly = std::array<mpz_class, 3>;  // c0 + c1 T + c2 T^2
  auto reduce_cubic = [&](std::array<mpz_class, 5>& w) {
    // Fold degrees 4 and 3 using T^3 = -(B T^2 + C T + D).
    for (int d = 4; d >= 3; --d) {
      mpz_class coef = mod_p(w[d], p);
      if (coef == 0) continue;
      w[d] = 0;
      w[d - 1] = mod_p(w[d - 1] - coef * B, p);
      w[d - 2] = mod_p(w[d - 2] - coef * C, p);
      w[d - 3] = mod_p(w[d - 3] - coef * D, p);
    }
  };
  auto mul = [&](const Poly& x, const Poly& y) {
    std::array<mpz_class, 5> w{};
    for (int i = 0; i < 3; ++i) {
      if (x[i] == 0) continue;
      for (int j = 0; j < 3; ++j) w[i + j] += x[i] * y[j];
    }
    for (auto& c : w) c = mod_p(c, p);
    reduce_cubic(w);
    return Poly{w[0], w[1], w[2]};
  };
  Poly base{0, 1, 0};  // T
  Poly acc{1, 0, 0};   // 1
  mpz_class e = p;
  while (e > 0) {
    if (mpz_odd_p(e.get_mpz_t())) acc = mul(acc, base);
    base = mul(base, base);
    e >>= 1;
  }
  bool frob_fixes = (acc[0] == 0 && acc[1] == 1 && acc[2] == 0);
  return frob_fixes ? 3 : 0;
}

struct CubicShape {
  enum Kind { Separable, Double, Triple } kind;
  mpz_class root;  // the repeated root for Double/Triple
};

// Multiplicity structure of T^3 + B T^2 + C T + D over F_p-bar.
CubicShape cubic_shape(const mpz_class& B, const mpz_class& C,
                       const mpz_class& D, const mpz_class& p) {
  auto P = [&](const mpz_class& t) {
    return mod_p(((t + B) * t + C) * t + D, p);
  };
  auto Pd = [&](const mpz_class& t) {
    return mod_p(3 * t * t + 2 * B * t + C, p);
  };
  if (p <= 3) {
    // Triple root iff (T - r)^3 matches coefficientwise.
    for (mpz_class r = 0; r < p; ++r) {
      if (mod_p(B + 3 * r, p) == 0 && mod_p(C - 3 * r * r, p) == 0 &&
          mod_p(D + r * r * r, p) == 0)
        return {CubicShape::Triple, r};
    }
    for (mpz_class r = 0; r < p; ++r)
      if (P(r) == 0 && Pd(r) == 0) return {CubicShape::Double, r};
    return {CubicShape::Separable, 0};
  }
  mpz_class disc =
      mod_p(18 * B * C * D - 4 * B * B * B * D + B * B * C * C - 4 * C * C * C -
                27 * D * D,
            p);
  if (disc != 0) return {CubicShape::Separable, 0};
  mpz_class bb3c = mod_p(B * B - 3 * C, p);
  if (bb3c == 0) {
    mpz_class r = mod_p(-B * invmod(mpz_class(3), p), p);
    if (P(r) != 0 || Pd(r) != 0)
      throw InternalError("cubic_shape: bad triple root");
    return {CubicShape::Triple, r};
  }
  mpz_class r = mod_p((9 * D - B * C) * invmod(2 * bb3c, p), p);
  if (P(r) != 0 || Pd(r) != 0)
    throw InternalError("cubic_shape: bad double root");
  return {CubicShape::Double, r};
}

// Moves the singular point of the reduction to (0, 0): afterwards
// p | a3, a4, a6.
Curve translate_singular(const Curve& e, const mpz_class& p) {
  auto ok = [&](const Curve& f) {
    return div_pk(f.a3, p, 1) && div_pk(f.a4, p, 1) && div_pk(f.a6, p, 1);
  };
  if (ok(e)) return e;
  if (p <= 3) {
    for (mpz_class r = 0; r < p; ++r)
      for (mpz_class t = 0; t < p; ++t) {
        Curve f = e.transformed(r, 0, t);
        if (ok(f)) return f;
      }
    throw InternalError("translate_singular: no singular point found");
  }
  // Complete the square: the singular x is the repeated root of
  // x^3 + (b2/4) x^2 + (b4/2) x + b6/4.
  mpz_class B2 = e.b2(), B4 = e.b4(), B6 = e.b6(), C4 = e.c4();
  mpz_class x0;
  if (mod_p(C4, p) == 0) {
    x0 = mod_p(-B2 * invmod(mpz_class(12), p), p);
  } else {
    x0 = mod_p((18 * B6 - B2 * B4) * invmod(C4, p), p);
  }
  mpz_class y0 = mod_p(-(e.a1 * x0 + e.a3) * invmod(mpz_class(2), p), p);
  Curve f = e.transformed(x0, 0, y0);
  if (!ok(f)) throw InternalError("translate_singular: translation failed");
  return f;
}

// Reaches p | a1, a2; p^2 | a3, a4; p^3 | a6 (valid past types II/III/IV).
Curve normalize_deep(const Curve& e, const mpz_class& p) {
  auto ok = [&](const Curve& f) {
    return div_pk(f.a1, p, 1) && div_pk(f.a2, p, 1) && div_pk(f.a3, p, 2) &&
           div_pk(f.a4, p, 2) && div_pk(f.a6, p, 3);
  };
  if (p == 2) {
    for (mpz_class s = 0; s < 2; ++s)
      for (mpz_class t = 0; t < 4; ++t) {
        Curve f = e.transformed(0, s, t);
        if (ok(f)) return f;
      }
    throw InternalError("normalize_deep: no normalization found at 2");
  }
  mpz_class inv2p = invmod(mpz_class(2), p);
  mpz_class s = mod_p(-e.a1 * inv2p, p);
  Curve f = e.transformed(0, s, 0);
  mpz_class p2 = p * p;
  mpz_class t = mod_p(-f.a3 * invmod(mpz_class(2), p2), p2);
  f = f.transformed(0, 0, t);
  if (!ok(f)) throw InternalError("normalize_deep: normalization failed");
  return f;
}

std::string kodaira_in(unsigned n, bool star) {
  return "I" + std::to_string(n) + (star ? "*" : "");
}

}  // namespace

Curve Curve::scaled_down(const mpz_class& p) const {
  Curve e;
  e.a1 = divexact_checked(a1, p);
  e.a2 = divexact_checked(a2, pow_p(p, 2));
  e.a3 = divexact_checked(a3, pow_p(p, 3));
  e.a4 = divexact_checked(a4, pow_p(p, 4));
  e.a6 = divexact_checked(a6, pow_p(p, 6));
  return e;
}

std::string Curve::str() const {
  std::ostringstream os;
  os << "[" << a1.get_str() << "," << a2.get_str() << "," << a3.get_str()
     << "," << a4.get_str() << "," << a6.get_str() << "]";
  return os.str();
}

unsigned count_points_f2(const Curve& e) {
  unsigned n = 1;  // infinity
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      mpz_class lhs = y * (y + e.a1 * x + e.a3);
      mpz_class rhs = ((x + e.a2) * x + e.a4) * mpz_class(x) + e.a6;
      if (mod_p(lhs - rhs, mpz_class(2)) == 0) ++n;
    }
  return n;
}

LocalData tate_local(const Curve& curve, const mpz_class& p) {
  if (p < 2 || !is_prime(p)) throw ValidationError("tate_local: p not prime");
  LocalData out;
  out.p = p;
  Curve e = curve;
  {
    mpz_class d = e.disc();
    if (d == 0) throw ValidationError("tate_local: singular curve");
    out.vdisc_initial = val_p(d, p);
  }

  for (unsigned pass = 0;; ++pass) {
    if (pass > out.vdisc_initial / 12 + 2)
      throw InternalError("tate_local: rescaling loop ran away");
    mpz_class d = e.disc();
    unsigned n = val_p(d, p);
    out.vdisc_min = n;
    out.minimal = e;
    out.rescalings = pass;

    if (n == 0) {
      out.f = 0;
      out.c = 1;
      out.kind = ReductionKind::Good;
      out.kodaira = "I0";
      return out;
    }

    e = translate_singular(e, p);
    out.minimal = e;

    if (!div_pk(e.b2(), p, 1)) {
      // Multiplicative: I_n with n = v(disc).
      bool split = quad_has_root(mpz_class(1), e.a1, -e.a2, p);
      out.f = 1;
      out.kind = split ? ReductionKind::SplitMult : ReductionKind::NonsplitMult;
      out.kodaira = kodaira_in(n, false);
      out.c = split ? n : (n % 2 == 0 ? 2 : 1);
      return out;
    }

    out.kind = ReductionKind::Additive;

    if (!div_pk(e.a6, p, 2)) {  // type II
      out.f = static_cast<int>(n);
      out.c = 1;
      out.kodaira = "II";
      return out;
    }
    if (!div_pk(e.b8(), p, 3)) {  // type III
      out.f = static_cast<int>(n) - 1;
      out.c = 2;
      out.kodaira = "III";
      return out;
    }
    if (!div_pk(e.b6(), p, 3)) {  // type IV
      mpz_class a3p = divexact_checked(e.a3, p);
      mpz_class a6p2 = divexact_checked(e.a6, p * p);
      out.f = static_cast<int>(n) - 2;
      out.c = quad_has_root(mpz_class(1), a3p, -a6p2, p) ? 3 : 1;
      out.kodaira = "IV";
      return out;
    }

    e = normalize_deep(e, p);
    out.minimal = e;

    // Cubic T^3 + B T^2 + C T + D from (a2/p, a4/p^2, a6/p^3).
    mpz_class B = divexact_checked(e.a2, p);
    mpz_class C = divexact_checked(e.a4, p * p);
    mpz_class D = divexact_checked(e.a6, p * p * p);
    CubicShape shape = cubic_shape(B, C, D, p);

    if (shape.kind == CubicShape::Separable) {  // I0*
      unsigned roots = cubic_root_count(mod_p(B, p), mod_p(C, p), mod_p(D, p), p);
      out.f = static_cast<int>(n) - 4;
      out.c = 1 + roots;
      out.kodaira = "I0*";
      return out;
    }

    if (shape.kind == CubicShape::Double) {
      // I_k* chain.  Put the double root at the origin first.
      e = e.transformed(p * shape.root, 0, 0);
      out.minimal = e;
      if (!div_pk(e.a2, p, 1) || div_pk(e.a2, p, 2) || !div_pk(e.a3, p, 2) ||
          !div_pk(e.a4, p, 3) || !div_pk(e.a6, p, 4))
        throw InternalError("tate_local: bad I_n* entry state");
      mpz_class a21 = divexact_checked(e.a2, p);
      for (unsigned k = 1;; ++k) {
        if (k > n) throw InternalError("tate_local: I_n* chain ran away");
        if (k % 2 == 1) {
          unsigned i3 = (k + 3) / 2;
          mpz_class A3 = divexact_checked(e.a3, pow_p(p, i3));
          mpz_class A6 = divexact_checked(e.a6, pow_p(p, k + 3));
          if (mod_p(A3 * A3 + 4 * A6, p) != 0) {
            out.f = static_cast<int>(n) - 4 - static_cast<int>(k);
            out.c = quad_has_root(mpz_class(1), A3, -A6, p) ? 4 : 2;
            out.kodaira = kodaira_in(k, true);
            return out;
          }
          mpz_class tau = p == 2 ? mod_p(A6, p)
                                 : mod_p(-A3 * invmod(mpz_class(2), p), p);
          e = e.transformed(0, 0, pow_p(p, i3) * tau);
        } else {
          unsigned i4 = (k + 4) / 2;
          mpz_class A4 = divexact_checked(e.a4, pow_p(p, i4));
          mpz_class A6 = divexact_checked(e.a6, pow_p(p, k + 3));
          if (mod_p(A4 * A4 - 4 * a21 * A6, p) != 0) {
            out.f = static_cast<int>(n) - 4 - static_cast<int>(k);
            out.c = quad_has_root(a21, A4, A6, p) ? 4 : 2;
            out.kodaira = kodaira_in(k, true);
            return out;
          }
          mpz_class xi = p == 2
                             ? mod_p(A6, p)
                             : mod_p(-A4 * invmod(2 * a21, p), p);
          e = e.transformed(pow_p(p, i4 - 1) * xi, 0, 0);
        }
        out.minimal = e;
      }
    }

    // Triple root: shift it to the origin.
    e = e.transformed(p * shape.root, 0, 0);
    out.minimal = e;
    if (!div_pk(e.a2, p, 2) || !div_pk(e.a3, p, 2) || !div_pk(e.a4, p, 3) ||
        !div_pk(e.a6, p, 4))
      throw InternalError("tate_local: bad triple-root state");

    {
      mpz_class A3 = divexact_checked(e.a3, p * p);
      mpz_class A6 = divexact_checked(e.a6, pow_p(p, 4));
      if (mod_p(A3 * A3 + 4 * A6, p) != 0) {  // type IV*
        out.f = static_cast<int>(n) - 6;
        out.c = quad_has_root(mpz_class(1), A3, -A6, p) ? 3 : 1;
        out.kodaira = "IV*";
        return out;
      }
      mpz_class tau =
          p == 2 ? mod_p(A6, p) : mod_p(-A3 * invmod(mpz_class(2), p), p);
      e = e.transformed(0, 0, p * p * tau);
      out.minimal = e;
    }
    if (!div_pk(e.a3, p, 3) || !div_pk(e.a6, p, 5))
      throw InternalError("tate_local: bad IV* exit state");

    if (!div_pk(e.a4, p, 4)) {  // type III*
      out.f = static_cast<int>(n) - 7;
      out.c = 2;
      out.kodaira = "III*";
      return out;
    }
    if (!div_pk(e.a6, p, 6)) {  // type II*
      out.f = static_cast<int>(n) - 8;
      out.c = 1;
      out.kodaira = "II*";
      return out;
    }

    // Not minimal at p: rescale and restart.
    e = e.scaled_down(p);
  }
}

namespace {

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex16(uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[i] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

int mult_ap(const LocalData& ld) {
  switch (ld.kind) {
    case ReductionKind::SplitMult:
      return 1;
    case ReductionKind::NonsplitMult:
      return -1;
    case ReductionKind::Additive:
      return 0;
    case ReductionKind::Good:
      break;
  }
  throw InternalError("mult_ap: good prime in bad-prime table");
}

}  // namespace

IsogenyClass build_class(const AbcTriple& triple, const FactoredInteger& q) {
  if (!q.square_free())
    throw ValidationError("class: twist q must be square-free");
  IsogenyClass cls;
  cls.triple = triple;
  cls.q = q;

  const mpz_class av = triple.a.value(), bv = triple.b.value(),
                  cv = triple.c.value(), qv = q.value();
  auto mk = [&](const mpz_class& a2, const mpz_class& a4) {
    Curve e;
    e.a1 = 0;
    e.a3 = 0;
    e.a6 = 0;
    e.a2 = a2;
    e.a4 = a4;
    return e;
  };
  cls.curves[0] = mk(-2 * qv * (bv + cv), qv * qv * av * av);
  cls.curves[1] = mk(2 * qv * (av + cv), qv * qv * bv * bv);
  cls.curves[2] = mk(-2 * qv * (av - bv), qv * qv * cv * cv);
  cls.curves[3] = mk(qv * (bv + cv), qv * qv * bv * cv);
  cls.count_curve = cls.curves[3];

  // Bad candidates: 2, the primes of q, and the primes of rad(abc).
  std::vector<mpz_class> bad;
  bad.push_back(2);
  for (const auto& pp : q.factors()) bad.push_back(pp.p);
  for (const auto& pp : triple.rad.factors()) bad.push_back(pp.p);
  std::sort(bad.begin(), bad.end());
  bad.erase(std::unique(bad.begin(), bad.end()), bad.end());

  std::vector<PrimePower> nfac;
  for (const auto& p : bad) {
    std::array<LocalData, 4> ld;
    for (int k = 0; k < 4; ++k) ld[k] = tate_local(cls.curves[k], p);
    for (int k = 1; k < 4; ++k)
      if (ld[k].f != ld[0].f)
        throw InternalError("class: conductor exponent differs across curves at p=" +
                            p.get_str());
    if (ld[0].f > 0) {
      nfac.push_back(PrimePower{p, static_cast<unsigned>(ld[0].f)});
      if (ld[0].f == 1) {
        int a = mult_ap(ld[0]);
        for (int k = 1; k < 4; ++k)
          if (mult_ap(ld[k]) != a)
            throw InternalError("class: split type differs across curves at p=" +
                                p.get_str());
        cls.bad_ap[p] = a;
      } else {
        cls.bad_ap[p] = 0;
      }
    }
    cls.local[p] = std::move(ld);
  }
  cls.conductor = FactoredInteger(1, std::move(nfac));

  // Cross-check against N = 2^(s-1) q^2 r / gcd(q, r).
  {
    FactoredInteger base =
        q.abs().pow(2) * triple.rad;
    base = base.divide_exact(FactoredInteger::gcd(q, triple.rad));
    unsigned v2n = cls.conductor.valuation(2);
    unsigned v2b = base.valuation(2);
    int s = static_cast<int>(v2n) + 1 - static_cast<int>(v2b);
    if (s < 0 || s > 5)
      throw InternalError("class: 2-adic conductor outside expected range (s=" +
                          std::to_string(s) + ")");
    // Odd parts must agree exactly.
    mpz_class odd_n = cls.conductor.value(), odd_b = base.value();
    while (mpz_even_p(odd_n.get_mpz_t())) odd_n /= 2;
    while (mpz_even_p(odd_b.get_mpz_t())) odd_b /= 2;
    if (odd_n != odd_b)
      throw InternalError("class: odd part of conductor mismatch");
    cls.s = s;
  }

  // Real period of model k relative to pi / (sqrt(|q| c) agm(1, alpha));
  // fixed small integers determined by which roots of the quartet's cubics
  // are real, which depends only on the sign of q.
  static const int w_pos[4] = {1, 2, 1, 2};
  static const int w_neg[4] = {2, 1, 1, 2};
  const int* w = q.sign() > 0 ? w_pos : w_neg;
  for (int k = 0; k < 4; ++k) {
    mpz_class c = 1, u = 1;
    for (const auto& [p, ld] : cls.local) {
      c *= ld[k].c;
      for (unsigned i = 0; i < ld[k].rescalings; ++i) u *= p;
    }
    cls.tamagawa[k] = c;
    cls.scale[k] = u;
    cls.torsion[k] = torsion_order(cls.curves[k].a2, cls.curves[k].a4);
    mpz_class tor2 = mpz_class(cls.torsion[k]) * cls.torsion[k];
    mpz_class num = u * w[k] * c;
    if (mod_p(num, tor2) != 0)
      throw InternalError("class: C_" + std::to_string(k + 1) +
                          " is not an integer");
    cls.cvals[k] = num / tor2;
  }
  {
    auto mn = std::min_element(cls.cvals.begin(), cls.cvals.end());
    auto mx = std::max_element(cls.cvals.begin(), cls.cvals.end());
    cls.k_star = static_cast<int>(mn - cls.cvals.begin()) + 1;
    for (int k = 0; k < 4; ++k) {
      mpz_class ratio = cls.cvals[k];
      while (ratio > *mn && mod_p(ratio, mpz_class(4)) == 0) ratio /= 4;
      if (ratio != *mn)
        throw InternalError("class: C_" + std::to_string(k + 1) +
                            " / C_min is not a power of 4");
    }
    mpz_class ratio = *mx / *mn;
    int t = 0;
    while (ratio > 1) {
      ratio /= 4;
      ++t;
    }
    cls.t = t;
  }

  cls.good_at_2 = (cls.conductor.valuation(2) == 0);
  if (cls.good_at_2) {
    const LocalData& l2 = cls.local.at(2)[3];
    cls.a2_good = 3 - static_cast<int>(count_points_f2(l2.minimal));
  }

  for (const auto& pp : cls.conductor.factors())
    if (pp.e >= 2) cls.sq_primes.push_back(pp.p);

  cls.hash = hex16(fnv1a64("a=" + triple.a.str() + ";b=" + triple.b.str() +
                           ";c=" + triple.c.str() + ";q=" + q.str()));
  return cls;
}

BigReal class_alpha(const IsogenyClass& cls, unsigned digits) {
  BigReal num(cls.q.sign() > 0 ? cls.triple.b.value() : cls.triple.a.value(),
              digits);
  BigReal den(cls.triple.c.value(), digits);
  return (num / den).sqrt();
}

BigReal period_factor(const IsogenyClass& cls, int k, unsigned digits) {
  if (k < 1 || k > 4) throw ValidationError("period_factor: k out of range");
  BigReal qc(cls.q.abs_value() * cls.triple.c.value(), digits);
  BigReal one(1L, digits);
  BigReal m = agm(one, class_alpha(cls, digits));
  BigReal pi = BigReal::pi(digits);
  BigReal ck(cls.cvals[k - 1], digits);
  return qc.sqrt() * m / (pi * ck);
}

BigReal g_over_l(const IsogenyClass& cls, unsigned digits) {
  BigReal n(cls.n_value(), digits);
  return period_factor(cls, cls.k_star, digits) / n.sqrt();
}

}  // namespace shabc
