#ifndef SHABC_CURVES_HPP
#define SHABC_CURVES_HPP

#include "shabc/bigreal.hpp"
#include "shabc/triples.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace shabc {

// Integral Weierstrass model y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6.
struct Curve {
  mpz_class a1, a2, a3, a4, a6;

  mpz_class b2() const;
  mpz_class b4() const;
  mpz_class b6() const;
  mpz_class b8() const;
  mpz_class c4() const;
  mpz_class c6() const;
  mpz_class disc() const;

  // (x, y) -> (x + r, y + s x + t), u = 1.
  Curve transformed(const mpz_class& r, const mpz_class& s,
                    const mpz_class& t) const;
  // u = p rescale: requires p^i | a_i for i = 1,2,3,4,6.
  Curve scaled_down(const mpz_class& p) const;

  std::string str() const;
};

enum class ReductionKind { Good, SplitMult, NonsplitMult, Additive };

struct LocalData {
  mpz_class p;
  int f = 0;                // conductor exponent
  unsigned long c = 1;      // Tamagawa number
  ReductionKind kind = ReductionKind::Good;
  std::string kodaira;      // "I0", "I5", "II*", "I3*", ...
  unsigned vdisc_initial = 0;
  unsigned vdisc_min = 0;   // valuation of the minimal discriminant
  unsigned rescalings = 0;  // u = p steps taken to reach minimality
  Curve minimal;            // p-minimal model reached by the run
};

// Local reduction data at p for an integral model (any p >= 2, arbitrary
// size).  Deterministic; pure integer arithmetic.
LocalData tate_local(const Curve& e, const mpz_class& p);

// The number of points on e over F_2 (including the point at infinity).
unsigned count_points_f2(const Curve& e);

// Exact order of the rational torsion subgroup of y^2 = x (x^2 + A x + B)
// for integral A, B with B (A^2 - 4B) != 0.  Covers every group order a
// curve with a rational 2-torsion point can have (2, 4, 6, 8, 10, 12, 16).
unsigned long torsion_order(const mpz_class& A, const mpz_class& B);

// A quadratic-twist quartet attached to a triple: four 2-isogenous curves
// sharing conductor and L-function.
struct IsogenyClass {
  AbcTriple triple;
  FactoredInteger q;              // square-free twist, positive or negative
  std::array<Curve, 4> curves;    // index 0..3 <-> curve 1..4

  FactoredInteger conductor;      // N, fully factored
  int s = 0;                      // N = 2^(s-1) q^2 r / gcd(q, r)
  std::array<mpz_class, 4> tamagawa;   // product of the local indices c_p
  std::array<mpz_class, 4> scale;      // u_k: rescale factor to the minimal model
  std::array<unsigned long, 4> torsion;  // |E_k(Q)_tors|
  // C_k: the integers tying the central value to the group order,
  //   L = pi * C_k * sha_k / (sqrt(|q| c) * agm(1, alpha)),
  // assembled as u_k * w_k * prod(c_p) / torsion^2 with w_k the ratio of the
  // model's real period to pi / (sqrt(|q| c) agm(1, alpha)).
  std::array<mpz_class, 4> cvals;
  int k_star = 1;                 // 1-based index of the smallest C_k
  int t = 0;                      // log_4(C_max / C_min)
  std::map<mpz_class, int> bad_ap;    // p | N -> a(p) in {0, +-1}
  bool good_at_2 = false;
  int a2_good = 0;                // a(2) when good_at_2
  Curve count_curve;              // curve 4 model used for point counting
  std::vector<mpz_class> sq_primes;   // ell with ell^2 | N
  // Local data per bad prime, one entry per curve.
  std::map<mpz_class, std::array<LocalData, 4>> local;
  std::string hash;               // 16 hex digits identifying (a, b, c, q)

  mpz_class c_min() const { return cvals[k_star - 1]; }
  const mpz_class& n_value() const { return conductor.value(); }
};

// Builds the quartet and all derived invariants; cross-checks the conductor
// against the closed form and throws InternalError on any inconsistency.
IsogenyClass build_class(const AbcTriple& triple, const FactoredInteger& q);

// alpha = sqrt(b/c) for q > 0, sqrt(a/c) for q < 0.
BigReal class_alpha(const IsogenyClass& cls, unsigned digits = 0);
// Period factor sqrt(|q| c) * agm(1, alpha) / (pi * C_k), 1-based k.
BigReal period_factor(const IsogenyClass& cls, int k, unsigned digits = 0);
// Analytic figure of merit per unit central value:
// sqrt(|q| c) * agm(1, alpha) / (pi * C_min * sqrt(N)).
BigReal g_over_l(const IsogenyClass& cls, unsigned digits = 0);

}  // namespace shabc

#endif
