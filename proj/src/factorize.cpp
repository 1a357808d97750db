#include "shabc/factorize.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <vector>

namespace shabc {

const std::vector<uint32_t>& primes_below(uint32_t bound) {
  static std::mutex mu;
  static std::vector<uint32_t> primes;
  static uint32_t have = 0;
  std::scoped_lock lk(mu);
  if (bound <= have) return primes;
  // Simple sieve; bounds here are modest (<= a few 10^6).
  std::vector<bool> comp(bound, false);
  primes.clear();
  for (uint32_t i = 2; i < bound; ++i) {
    if (comp[i]) continue;
    primes.push_back(i);
    for (uint64_t j = static_cast<uint64_t>(i) * i; j < bound; j += i)
      comp[j] = true;
  }
  have = bound;
  return primes;
}

namespace {

struct RhoBudget {
  uint64_t remaining;
};

// Pollard rho, Brent cycle variant with batched gcds.  Deterministic: the
// polynomial constant steps 1,2,3,... on retry.
mpz_class rho_factor(const mpz_class& n, RhoBudget& budget) {
  if (mpz_even_p(n.get_mpz_t())) return 2;
  for (unsigned long c = 1;; ++c) {
    mpz_class y = 2, r = 1, q = 1, g = 1, x, ys;
    const unsigned batch = 128;
    while (g == 1) {
      x = y;
      for (mpz_class i = 0; i < r; ++i) y = (y * y + c) % n;
      mpz_class k = 0;
      while (k < r && g == 1) {
        ys = y;
        unsigned long lim = batch;
        if (r - k < lim) lim = mpz_class(r - k).get_ui();
        if (budget.remaining < lim) {
          throw FactorizationError(
              "factorization budget exhausted on " + n.get_str(), n);
        }
        budget.remaining -= lim;
        for (unsigned long i = 0; i < lim; ++i) {
          y = (y * y + c) % n;
          q = q * (x > y ? x - y : y - x) % n;
        }
        mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        k += lim;
      }
      r *= 2;
    }
    if (g == n) {
      // Backtrack one step at a time.
      g = 1;
      while (g == 1) {
        ys = (ys * ys + c) % n;
        mpz_class d = x > ys ? x - ys : ys - x;
        mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
      }
    }
    if (g != n) return g;
    // Whole cycle collapsed; retry with the next constant.
  }
}

void factor_into(const mpz_class& n, std::map<mpz_class, unsigned>& out,
                 RhoBudget& budget) {
  if (n == 1) return;
  if (is_prime(n)) {
    out[n] += 1;
    return;
  }
  // Perfect powers: factor the root once, multiply exponents.
  if (mpz_perfect_power_p(n.get_mpz_t())) {
    for (unsigned long e = 2; e <= mpz_sizeinbase(n.get_mpz_t(), 2); ++e) {
      mpz_class root;
      if (mpz_root(root.get_mpz_t(), n.get_mpz_t(), e) != 0) {
        std::map<mpz_class, unsigned> sub;
        factor_into(root, sub, budget);
        for (auto& [p, k] : sub) out[p] += k * e;
        return;
      }
    }
  }
  mpz_class d = rho_factor(n, budget);
  if (d == 1 || d == n)
    throw FactorizationError("rho made no progress on " + n.get_str(), n);
  factor_into(d, out, budget);
  factor_into(n / d, out, budget);
}

}  // namespace

FactoredInteger factorize(const mpz_class& n, const FactorBudget& budget) {
  if (n == 0) throw ValidationError("factorize: zero has no factorization");
  int sign = n < 0 ? -1 : 1;
  mpz_class m = ::abs(n);
  std::map<mpz_class, unsigned> found;
  for (uint32_t p : primes_below(static_cast<uint32_t>(
           std::min<uint64_t>(budget.trial_bound, 1u << 26)))) {
    if (m == 1) break;
    if (mpz_class(p) * p > m) break;
    while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
      mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), p);
      found[p] += 1;
    }
  }
  if (m > 1) {
    RhoBudget rb{budget.rho_iterations};
    factor_into(m, found, rb);
  }
  std::vector<PrimePower> factors;
  factors.reserve(found.size());
  for (auto& [p, e] : found) factors.push_back(PrimePower{p, e});
  if (factors.empty()) return sign < 0 ? FactoredInteger().negate()
                                       : FactoredInteger();
  return FactoredInteger(sign, std::move(factors));
}

}  // namespace shabc
