#include "shabc/pointcount.hpp"

#include "shabc/factored.hpp"  // error types

#include <algorithm>
#include <optional>
#include <cmath>
#include <set>
#include <unordered_map>
#include <vector>

namespace shabc {

namespace {

uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m) {
  return static_cast<uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

uint64_t addmod(uint64_t a, uint64_t b, uint64_t m) {
  uint64_t s = a + b;
  if (s >= m || s < a) s -= m;
  return s;
}

uint64_t submod(uint64_t a, uint64_t b, uint64_t m) { return addmod(a, m - b, m); }

uint64_t powmod(uint64_t a, uint64_t e, uint64_t m) {
  uint64_t r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

uint64_t invmod(uint64_t a, uint64_t m) {
  // Extended Euclid on signed 128-bit intermediates.
  int64_t t = 0, nt = 1;
  uint64_t r = m, nr = a % m;
  while (nr != 0) {
    uint64_t q = r / nr;
    int64_t tmp = t - static_cast<int64_t>(q) * nt;
    t = nt;
    nt = tmp;
    uint64_t tmr = r - q * nr;
    r = nr;
    nr = tmr;
  }
  if (r != 1) throw InternalError("invmod: not invertible");
  return t < 0 ? static_cast<uint64_t>(t + static_cast<int64_t>(m)) : static_cast<uint64_t>(t);
}

int jacobi(uint64_t a, uint64_t n) {  // n odd > 0
  a %= n;
  int s = 1;
  while (a != 0) {
    while ((a & 1) == 0) {
      a >>= 1;
      uint64_t r = n & 7;
      if (r == 3 || r == 5) s = -s;
    }
    std::swap(a, n);
    if ((a & 3) == 3 && (n & 3) == 3) s = -s;
    a %= n;
  }
  return n == 1 ? s : 0;
}

// Tonelli-Shanks; requires jacobi(a, p) == 1.
uint64_t sqrtmod(uint64_t a, uint64_t p) {
  a %= p;
  if (a == 0) return 0;
  if ((p & 3) == 3) return powmod(a, (p + 1) / 4, p);
  uint64_t q = p - 1;
  unsigned s = 0;
  while ((q & 1) == 0) {
    q >>= 1;
    ++s;
  }
  uint64_t z = 2;
  while (jacobi(z, p) != -1) ++z;
  uint64_t m = s;
  uint64_t c = powmod(z, q, p);
  uint64_t t = powmod(a, q, p);
  uint64_t r = powmod(a, (q + 1) / 2, p);
  while (t != 1) {
    uint64_t t2 = t;
    unsigned i = 0;
    while (t2 != 1) {
      t2 = mulmod(t2, t2, p);
      ++i;
      if (i >= m) throw InternalError("sqrtmod: nonresidue input");
    }
    uint64_t b = c;
    for (unsigned j = 0; j + i + 1 < m; ++j) b = mulmod(b, b, p);
    m = i;
    c = mulmod(b, b, p);
    t = mulmod(t, c, p);
    r = mulmod(r, b, p);
  }
  return r;
}

uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

uint64_t isqrt_u64(uint64_t n) {
  uint64_t r = static_cast<uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

uint64_t fval(const CurveModP& e, uint64_t x) {
  uint64_t v = addmod(x, e.a2, e.p);
  v = mulmod(v, x, e.p);
  v = addmod(v, e.a4, e.p);
  v = mulmod(v, x, e.p);
  return addmod(v, e.a6, e.p);
}

bool curve_singular(const CurveModP& e) {
  // Discriminant of the cubic x^3 + Bx^2 + Cx + D mod p.
  uint64_t p = e.p, B = e.a2, C = e.a4, D = e.a6;
  uint64_t t1 = mulmod(mulmod(mulmod(18 % p, B, p), C, p), D, p);
  uint64_t t2 = mulmod(mulmod(mulmod(4 % p, B, p), mulmod(B, B, p), p), D, p);
  uint64_t t3 = mulmod(mulmod(B, B, p), mulmod(C, C, p), p);
  uint64_t t4 = mulmod(4 % p, mulmod(C, mulmod(C, C, p), p), p);
  uint64_t t5 = mulmod(27 % p, mulmod(D, D, p), p);
  uint64_t disc = submod(addmod(t1, t3, p), addmod(t2, addmod(t4, t5, p), p), p);
  return disc == 0;
}

struct Pt {
  uint64_t x = 0, y = 0;
  bool inf = true;
};

Pt pt_neg(const Pt& a, uint64_t p) {
  if (a.inf) return a;
  return Pt{a.x, a.y == 0 ? 0 : p - a.y, false};
}

Pt pt_add(const CurveModP& e, const Pt& a, const Pt& b) {
  uint64_t p = e.p;
  if (a.inf) return b;
  if (b.inf) return a;
  uint64_t lam;
  if (a.x == b.x) {
    if (addmod(a.y, b.y, p) == 0) return Pt{};  // includes y == 0 doubling
    uint64_t num = mulmod(3, mulmod(a.x, a.x, p), p);
    num = addmod(num, mulmod(2 % p, mulmod(e.a2, a.x, p), p), p);
    num = addmod(num, e.a4, p);
    lam = mulmod(num, invmod(addmod(a.y, a.y, p), p), p);
  } else {
    uint64_t dx = submod(b.x, a.x, p);
    uint64_t dy = submod(b.y, a.y, p);
    lam = mulmod(dy, invmod(dx, p), p);
  }
  uint64_t x3 = submod(mulmod(lam, lam, p), addmod(e.a2, addmod(a.x, b.x, p), p), p);
  uint64_t y3 = submod(mulmod(lam, submod(a.x, x3, p), p), a.y, p);
  return Pt{x3, y3, false};
}

Pt pt_mul(const CurveModP& e, Pt a, uint64_t k) {
  Pt r;
  while (k) {
    if (k & 1) r = pt_add(e, r, a);
    a = pt_add(e, a, a);
    k >>= 1;
  }
  return r;
}

Pt sample_point(const CurveModP& e, uint64_t& rng) {
  for (int tries = 0; tries < 4096; ++tries) {
    uint64_t x = splitmix64(rng) % e.p;
    uint64_t f = fval(e, x);
    if (f == 0) continue;  // 2-torsion: useless for order separation
    if (jacobi(f, e.p) != 1) continue;
    uint64_t y = sqrtmod(f, e.p);
    return Pt{x, y, false};
  }
  throw InternalError("sample_point: no point found");
}

// All m in [lo, hi] with m % d == 0 and m*P = infinity.
std::vector<uint64_t> bsgs_multiples(const CurveModP& e, const Pt& P,
                                     uint64_t lo, uint64_t hi, uint64_t d) {
  uint64_t m0 = ((lo + d - 1) / d) * d;
  if (m0 > hi) return {};
  uint64_t count = (hi - m0) / d + 1;
  uint64_t r = isqrt_u64(count);
  if (r * r < count) ++r;
  if (r == 0) r = 1;

  Pt D = pt_mul(e, P, d);
  if (D.inf) {
    // ord(P) | d: every stride value works; enumerate directly.
    std::vector<uint64_t> all;
    for (uint64_t m = m0; m <= hi; m += d) all.push_back(m);
    return all;
  }
  // Baby table: i * D for i in [0, r).  When ord(D) < r the walk passes
  // through infinity repeatedly; those indices must be kept, or giant
  // strides landing on infinity would miss every solution but i = 0.
  std::vector<Pt> baby(r);
  std::unordered_map<uint64_t, std::vector<uint32_t>> by_x;
  by_x.reserve(r * 2);
  std::vector<uint32_t> inf_i;
  Pt acc;
  for (uint64_t i = 0; i < r; ++i) {
    baby[i] = acc;
    if (acc.inf)
      inf_i.push_back(static_cast<uint32_t>(i));
    else
      by_x[acc.x].push_back(static_cast<uint32_t>(i));
    acc = pt_add(e, acc, D);
  }
  // Giant strides: solve j*D = -(m0*P) - u*(r*D), j = u*r + i.
  Pt Q = pt_mul(e, P, m0);
  Pt R = pt_neg(Q, e.p);
  Pt stepG = pt_neg(pt_mul(e, D, r), e.p);
  std::set<uint64_t> js;
  uint64_t umax = count / r + 1;
  for (uint64_t u = 0; u <= umax; ++u) {
    if (R.inf) {
      for (uint32_t i : inf_i) js.insert(u * r + i);
    } else {
      auto it = by_x.find(R.x);
      if (it != by_x.end()) {
        for (uint32_t i : it->second) {
          const Pt& bi = baby[i];
          if (bi.y == R.y) js.insert(u * r + i);
          if (addmod(bi.y, R.y, e.p) == 0 && u * r >= i) js.insert(u * r - i);
        }
      }
    }
    R = pt_add(e, R, stepG);
  }
  std::vector<uint64_t> out;
  for (uint64_t j : js) {
    if (j >= count) continue;
    uint64_t m = m0 + j * d;
    if (pt_mul(e, P, m).inf) out.push_back(m);
  }
  return out;
}

}  // namespace

int64_t ap_naive(const CurveModP& e) {
  uint64_t p = e.p;
  if (p < 3 || (p & 1) == 0)
    throw ValidationError("ap_naive: p must be an odd prime");
  if (p > (1ull << 26))
    throw ValidationError("ap_naive: p too large for the character-sum path");
  if (curve_singular(e)) throw ValidationError("ap_naive: singular reduction");
  thread_local std::vector<uint64_t> bits;
  size_t words = (p + 63) / 64;
  bits.assign(words, 0);
  for (uint64_t y = 1; y <= (p - 1) / 2; ++y) {
    uint64_t q = mulmod(y, y, p);
    bits[q >> 6] |= 1ull << (q & 63);
  }
  // Finite differences of f(x) = x^3 + a2 x^2 + a4 x + a6 at step 1.
  uint64_t f = e.a6 % p;
  uint64_t d1 = (1 + e.a2 + e.a4) % p;
  uint64_t d2 = (6 + 2 * e.a2) % p;
  int64_t chi_sum = 0;
  for (uint64_t x = 0; x < p; ++x) {
    if (f != 0) chi_sum += (bits[f >> 6] >> (f & 63)) & 1 ? 1 : -1;
    f = addmod(f, d1, p);
    d1 = addmod(d1, d2, p);
    d2 = addmod(d2, 6 % p, p);
  }
  // #E = p + 1 + sum chi(f(x)), so a(p) = -sum.
  return -chi_sum;
}

int64_t ap_bsgs(const CurveModP& e, unsigned order_divisor, uint64_t salt) {
  uint64_t p = e.p;
  if (p < 3 || (p & 1) == 0)
    throw ValidationError("ap_bsgs: p must be an odd prime");
  if (p >= (1ull << 62)) throw ValidationError("ap_bsgs: p too large");
  if (p < 2048) return ap_naive(e);
  if (curve_singular(e)) throw ValidationError("ap_bsgs: singular reduction");
  if (order_divisor == 0) order_divisor = 1;

  uint64_t w = 2 * isqrt_u64(p) + 2;
  uint64_t lo = p + 1 - w, hi = p + 1 + w;

  uint64_t rng = 0x8add5ca1eull ^ (p * 0x9e3779b97f4a7c15ull) ^
                 (e.a2 * 0xc2b2ae3d27d4eb4full) ^ (e.a4 * 0x165667b19e3779f9ull) ^
                 (e.a6 + 0x27220a95ull) ^ (salt * 0xd6e8feb86659fd93ull);

  // Quadratic twist by the smallest nonresidue.
  uint64_t d = 2;
  while (jacobi(d, p) != -1) ++d;
  CurveModP et{p, mulmod(d, e.a2, p), mulmod(mulmod(d, d, p), e.a4, p),
               mulmod(mulmod(d, mulmod(d, d, p), p), e.a6, p)};

  auto bsgs_side = [&](const CurveModP& c) {
    Pt P = sample_point(c, rng);
    return bsgs_multiples(c, P, lo, hi, order_divisor);
  };
  auto prune_side = [&](const CurveModP& c, std::vector<uint64_t>& ms) {
    Pt P = sample_point(c, rng);
    std::vector<uint64_t> keep;
    for (uint64_t m : ms)
      if (pt_mul(c, P, m).inf) keep.push_back(m);
    ms = std::move(keep);
  };

  std::vector<uint64_t> me = bsgs_side(e);   // candidate #E
  std::vector<uint64_t> mt = bsgs_side(et);  // candidate #twist
  if (me.empty() || mt.empty())
    throw InternalError("ap_bsgs: window search lost the group order");

  auto answer = [&]() -> std::optional<int64_t> {
    // a = p + 1 - m on the curve, a = m' - (p + 1) on the twist.
    std::set<int64_t> ae, at;
    for (uint64_t m : me)
      ae.insert(static_cast<int64_t>(p + 1) - static_cast<int64_t>(m));
    for (uint64_t m : mt)
      at.insert(static_cast<int64_t>(m) - static_cast<int64_t>(p + 1));
    std::vector<int64_t> inter;
    std::set_intersection(ae.begin(), ae.end(), at.begin(), at.end(),
                          std::back_inserter(inter));
    if (inter.size() == 1) return inter[0];
    if (inter.empty())
      throw InternalError("ap_bsgs: inconsistent curve/twist candidates");
    return std::nullopt;
  };

  for (int round = 0; round < 64; ++round) {
    if (auto a = answer()) {
      // Independent verification on fresh points.
      uint64_t m = static_cast<uint64_t>(static_cast<int64_t>(p + 1) - *a);
      Pt V = sample_point(e, rng);
      Pt Vt = sample_point(et, rng);
      if (!pt_mul(e, V, m).inf || !pt_mul(et, Vt, 2 * (p + 1) - m).inf)
        throw InternalError("ap_bsgs: verification failed");
      return *a;
    }
    if (me.size() > 1) prune_side(e, me);
    if (mt.size() > 1) prune_side(et, mt);
  }
  throw InternalError("ap_bsgs: failed to isolate the group order");
}

}  // namespace shabc
