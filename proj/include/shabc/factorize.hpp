#ifndef SHABC_FACTORIZE_HPP
#define SHABC_FACTORIZE_HPP

#include "shabc/factored.hpp"

#include <cstdint>

namespace shabc {

struct FactorizationError : Error {
  FactorizationError(std::string msg, mpz_class stuck)
      : Error(std::move(msg)), cofactor(std::move(stuck)) {}
  mpz_class cofactor;  // the part that resisted the budget
};

struct FactorBudget {
  // Trial division bound (primes below this are always removed).
  uint64_t trial_bound = 1'000'000;
  // Total rho iterations across the whole factorization.
  uint64_t rho_iterations = 200'000'000;
};

// Full factorization of a nonzero integer.  Deterministic; throws
// FactorizationError with the stubborn cofactor if the budget runs out.
FactoredInteger factorize(const mpz_class& n, const FactorBudget& budget = {});

// Primes below `bound`, cached and shared (bound <= 2^31).
const std::vector<uint32_t>& primes_below(uint32_t bound);

}  // namespace shabc

#endif
